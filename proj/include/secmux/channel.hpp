#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "secmux/common.hpp"

namespace secmux {

/// Probability vector over a finite alphabet.
class Distribution {
 public:
  explicit Distribution(std::vector<double> probs) : p_(std::move(probs)) {
    if (p_.empty()) throw std::invalid_argument("empty distribution");
    double sum = 0.0;
    for (double x : p_) {
      if (!(x >= 0.0)) throw std::invalid_argument("negative probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw std::invalid_argument("probabilities sum to " + std::to_string(sum));
    }
  }

  static Distribution uniform(std::size_t n) {
    return Distribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
  }
  static Distribution point(std::size_t n, std::size_t i) {
    std::vector<double> p(n, 0.0);
    p.at(i) = 1.0;
    return Distribution(std::move(p));
  }

  std::size_t size() const { return p_.size(); }
  double operator[](std::size_t i) const { return p_[i]; }
  std::span<const double> values() const { return p_; }

  bool is_uniform(double tol = kSimplexTol) const {
    const double u = 1.0 / static_cast<double>(p_.size());
    for (double x : p_) {
      if (std::abs(x - u) > tol) return false;
    }
    return true;
  }

 private:
  std::vector<double> p_;
};

/// Row-stochastic conditional-probability matrix.
class Channel {
 public:
  Channel(std::size_t inputs, std::size_t outputs, std::vector<double> rows)
      : in_(inputs), out_(outputs), w_(std::move(rows)) {
    if (in_ == 0 || out_ == 0) throw std::invalid_argument("empty channel");
    if (w_.size() != in_ * out_) throw std::invalid_argument("channel row data size mismatch");
    for (std::size_t x = 0; x < in_; ++x) {
      double sum = 0.0;
      for (std::size_t z = 0; z < out_; ++z) {
        const double v = w_[x * out_ + z];
        if (!(v >= 0.0)) throw std::invalid_argument("negative channel probability");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw std::invalid_argument("channel row " + std::to_string(x) + " sums to " +
                                    std::to_string(sum));
      }
    }
  }

  /// Binary symmetric channel with crossover probability p.
  static Channel bsc(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bsc crossover out of range");
    return Channel(2, 2, {1.0 - p, p, p, 1.0 - p});
  }

  /// Binary erasure channel; output alphabet {0, 1, erasure}.
  static Channel bec(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw std::invalid_argument("bec erasure out of range");
    return Channel(2, 3, {1.0 - eps, 0.0, eps, 0.0, 1.0 - eps, eps});
  }

  static Channel identity(std::size_t n) {
    std::vector<double> w(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) w[i * n + i] = 1.0;
    return Channel(n, n, std::move(w));
  }

  /// Channel ignoring its input: every row equals `out`.
  static Channel constant(std::size_t inputs, const Distribution& out) {
    std::vector<double> w;
    w.reserve(inputs * out.size());
    for (std::size_t x = 0; x < inputs; ++x) {
      w.insert(w.end(), out.values().begin(), out.values().end());
    }
    return Channel(inputs, out.size(), std::move(w));
  }

  std::size_t inputs() const { return in_; }
  std::size_t outputs() const { return out_; }
  double at(std::size_t x, std::size_t z) const { return w_[x * out_ + z]; }
  std::span<const double> row(std::size_t x) const {
    return std::span<const double>(w_).subspan(x * out_, out_);
  }
  Distribution row_dist(std::size_t x) const {
    return Distribution(std::vector<double>(row(x).begin(), row(x).end()));
  }

  /// Output distribution of an input distribution pushed through the channel.
  Distribution apply(const Distribution& in) const {
    if (in.size() != in_) throw std::invalid_argument("channel input dimension mismatch");
    std::vector<double> out(out_, 0.0);
    for (std::size_t x = 0; x < in_; ++x) {
      const double px = in[x];
      if (px == 0.0) continue;
      for (std::size_t z = 0; z < out_; ++z) out[z] += px * at(x, z);
    }
    return Distribution(std::move(out));
  }

  bool is_identity(double tol = kSimplexTol) const {
    if (in_ != out_) return false;
    for (std::size_t x = 0; x < in_; ++x) {
      for (std::size_t z = 0; z < out_; ++z) {
        if (std::abs(at(x, z) - (x == z ? 1.0 : 0.0)) > tol) return false;
      }
    }
    return true;
  }

 private:
  std::size_t in_, out_;
  std::vector<double> w_;
};

/// Cascade a then b (matrix product of the stochastic matrices).
inline Channel compose(const Channel& a, const Channel& b) {
  if (a.outputs() != b.inputs()) throw std::invalid_argument("compose dimension mismatch");
  std::vector<double> w(a.inputs() * b.outputs(), 0.0);
  for (std::size_t x = 0; x < a.inputs(); ++x) {
    for (std::size_t m = 0; m < a.outputs(); ++m) {
      const double axm = a.at(x, m);
      if (axm == 0.0) continue;
      for (std::size_t z = 0; z < b.outputs(); ++z) {
        w[x * b.outputs() + z] += axm * b.at(m, z);
      }
    }
  }
  return Channel(a.inputs(), b.outputs(), std::move(w));
}

/// Memoryless n-fold extension; joint symbols indexed lexicographically with
/// position 0 most significant.
inline Channel product_extend(const Channel& c, unsigned n, const Guards& guards = {}) {
  if (n == 0) throw std::invalid_argument("product_extend needs n >= 1");
  const std::uint64_t in_n = pow_u64(c.inputs(), n);
  const std::uint64_t out_n = pow_u64(c.outputs(), n);
  const std::uint64_t entries =
      (in_n > guards.product_entries / std::max<std::uint64_t>(out_n, 1))
          ? std::numeric_limits<std::uint64_t>::max()
          : in_n * out_n;
  if (entries > guards.product_entries) {
    throw_guard("product_entries", entries, guards.product_entries);
  }
  std::vector<double> w(static_cast<std::size_t>(in_n * out_n), 0.0);
  std::vector<std::size_t> xd(n), zd(n);
  for (std::uint64_t x = 0; x < in_n; ++x) {
    std::uint64_t xv = x;
    for (std::size_t t = n; t-- > 0;) {
      xd[t] = static_cast<std::size_t>(xv % c.inputs());
      xv /= c.inputs();
    }
    for (std::uint64_t z = 0; z < out_n; ++z) {
      std::uint64_t zv = z;
      for (std::size_t t = n; t-- > 0;) {
        zd[t] = static_cast<std::size_t>(zv % c.outputs());
        zv /= c.outputs();
      }
      double p = 1.0;
      for (std::size_t t = 0; t < n; ++t) p *= c.at(xd[t], zd[t]);
      w[static_cast<std::size_t>(x * out_n + z)] = p;
    }
  }
  return Channel(static_cast<std::size_t>(in_n), static_cast<std::size_t>(out_n),
                 std::move(w));
}

/// Dense joint distribution over a tuple of finite variables.
class Joint {
 public:
  Joint(std::vector<std::size_t> card, std::vector<double> p)
      : card_(std::move(card)), p_(std::move(p)) {
    std::size_t total = 1;
    for (std::size_t c : card_) {
      if (c == 0) throw std::invalid_argument("zero cardinality axis");
      total *= c;
    }
    if (card_.empty() || p_.size() != total) {
      throw std::invalid_argument("joint shape/data mismatch");
    }
    double sum = 0.0;
    for (double x : p_) {
      if (!(x >= 0.0)) throw std::invalid_argument("negative joint probability");
      sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-8) {
      throw std::invalid_argument("joint sums to " + std::to_string(sum));
    }
    strides_.assign(card_.size(), 1);
    for (std::size_t i = card_.size() - 1; i-- > 0;) {
      strides_[i] = strides_[i + 1] * card_[i + 1];
    }
  }

  /// Product joint P(l, z) = prior(l) * channel(z | l).
  static Joint from_prior_and_channel(const Distribution& prior, const Channel& ch) {
    if (prior.size() != ch.inputs()) throw std::invalid_argument("prior/channel mismatch");
    std::vector<double> p(prior.size() * ch.outputs());
    for (std::size_t l = 0; l < prior.size(); ++l) {
      for (std::size_t z = 0; z < ch.outputs(); ++z) {
        p[l * ch.outputs() + z] = prior[l] * ch.at(l, z);
      }
    }
    return Joint({prior.size(), ch.outputs()}, std::move(p));
  }

  std::size_t rank() const { return card_.size(); }
  std::size_t card(std::size_t axis) const { return card_.at(axis); }
  const std::vector<std::size_t>& cards() const { return card_; }
  std::size_t size() const { return p_.size(); }
  std::span<const double> values() const { return p_; }
  double sum() const { return std::accumulate(p_.begin(), p_.end(), 0.0); }

  double at_flat(std::size_t i) const { return p_[i]; }
  double at(std::span<const std::size_t> idx) const { return p_[flat_index(idx)]; }

  std::size_t flat_index(std::span<const std::size_t> idx) const {
    if (idx.size() != card_.size()) throw std::invalid_argument("index rank mismatch");
    std::size_t f = 0;
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] >= card_[i]) throw std::invalid_argument("index out of range");
      f += idx[i] * strides_[i];
    }
    return f;
  }

  /// Marginal over the listed axes, in the listed order.
  Joint marginal(std::span<const std::size_t> axes) const {
    std::vector<std::size_t> out_card;
    out_card.reserve(axes.size());
    for (std::size_t a : axes) out_card.push_back(card_.at(a));
    std::size_t out_total = 1;
    for (std::size_t c : out_card) out_total *= c;
    std::vector<double> out(out_total, 0.0);
    std::vector<std::size_t> idx(card_.size(), 0);
    for (std::size_t f = 0; f < p_.size(); ++f) {
      std::size_t o = 0;
      for (std::size_t j = 0; j < axes.size(); ++j) {
        o = o * card_[axes[j]] + idx[axes[j]];
      }
      out[o] += p_[f];
      for (std::size_t i = card_.size(); i-- > 0;) {
        if (++idx[i] < card_[i]) break;
        idx[i] = 0;
      }
    }
    return Joint(std::move(out_card), std::move(out));
  }

  Joint marginal(std::initializer_list<std::size_t> axes) const {
    return marginal(std::span<const std::size_t>(axes.begin(), axes.size()));
  }

  Distribution marginal_dist(std::size_t axis) const {
    const Joint m = marginal({axis});
    return Distribution(std::vector<double>(m.p_.begin(), m.p_.end()));
  }

 private:
  std::vector<std::size_t> card_;
  std::vector<double> p_;
  std::vector<std::size_t> strides_;
};

/// Auxiliary-chain description: P_U, P_{V|U}, P_{X|V}.
struct MarkovSpec {
  Distribution p_u;
  Channel v_given_u;
  Channel x_given_v;

  MarkovSpec(Distribution pu, Channel vu, Channel xv)
      : p_u(std::move(pu)), v_given_u(std::move(vu)), x_given_v(std::move(xv)) {
    if (p_u.size() != v_given_u.inputs() || v_given_u.outputs() != x_given_v.inputs()) {
      throw std::invalid_argument("markov chain dimension mismatch");
    }
  }
};

/// Full joint over (U, V, X, Y, Z):
/// P(u,v,x,y,z) = P_U(u) P_{V|U}(v|u) P_{X|V}(x|v) P_{Y|X}(y|x) P_{Z|X}(z|x).
inline Joint joint_from_spec(const MarkovSpec& spec, const Channel& bob, const Channel& eve) {
  if (bob.inputs() != spec.x_given_v.outputs() || eve.inputs() != spec.x_given_v.outputs()) {
    throw std::invalid_argument("receiver channel dimension mismatch");
  }
  const std::size_t nu = spec.p_u.size();
  const std::size_t nv = spec.v_given_u.outputs();
  const std::size_t nx = spec.x_given_v.outputs();
  const std::size_t ny = bob.outputs();
  const std::size_t nz = eve.outputs();
  std::vector<double> p(nu * nv * nx * ny * nz, 0.0);
  std::size_t f = 0;
  for (std::size_t u = 0; u < nu; ++u) {
    for (std::size_t v = 0; v < nv; ++v) {
      const double puv = spec.p_u[u] * spec.v_given_u.at(u, v);
      for (std::size_t x = 0; x < nx; ++x) {
        const double puvx = puv * spec.x_given_v.at(v, x);
        for (std::size_t y = 0; y < ny; ++y) {
          const double puvxy = puvx * bob.at(x, y);
          for (std::size_t z = 0; z < nz; ++z) {
            p[f++] = puvxy * eve.at(x, z);
          }
        }
      }
    }
  }
  return Joint({nu, nv, nx, ny, nz}, std::move(p));
}

}  // namespace secmux
