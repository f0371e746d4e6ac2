#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "secmux/channel.hpp"

namespace secmux {

// All information quantities are in nats.

inline double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log(x);
  }
  return h;
}

inline double entropy(const Distribution& p) { return entropy(p.values()); }
inline double entropy(const Joint& j) { return entropy(j.values()); }

inline double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

/// I(A; B) where A and B are disjoint axis groups of the joint. Computed in
/// KL form over the (A, B) marginal, so exact zeros stay zero.
inline double mutual_information(const Joint& joint, std::span<const std::size_t> axes_a,
                                 std::span<const std::size_t> axes_b) {
  std::vector<std::size_t> both(axes_a.begin(), axes_a.end());
  both.insert(both.end(), axes_b.begin(), axes_b.end());
  const Joint pab = joint.marginal(both);
  std::size_t na = 1, nb = 1;
  for (std::size_t a : axes_a) na *= joint.card(a);
  for (std::size_t b : axes_b) nb *= joint.card(b);

  std::vector<double> pa(na, 0.0), pb(nb, 0.0);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double p = pab.at_flat(i * nb + j);
      pa[i] += p;
      pb[j] += p;
    }
  }
  double mi = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double p = pab.at_flat(i * nb + j);
      if (p > 0.0) mi += p * std::log(p / (pa[i] * pb[j]));
    }
  }
  return mi;
}

inline double mutual_information(const Joint& joint,
                                 std::initializer_list<std::size_t> axes_a,
                                 std::initializer_list<std::size_t> axes_b) {
  return mutual_information(joint, std::span<const std::size_t>(axes_a.begin(), axes_a.size()),
                            std::span<const std::size_t>(axes_b.begin(), axes_b.size()));
}

/// Convenience for a two-axis joint.
inline double mutual_information(const Joint& joint) {
  if (joint.rank() != 2) throw std::invalid_argument("expected a two-axis joint");
  return mutual_information(joint, {0}, {1});
}

/// I(A; B | C) over disjoint axis groups of the joint.
inline double conditional_mutual_information(const Joint& joint,
                                             std::span<const std::size_t> axes_a,
                                             std::span<const std::size_t> axes_b,
                                             std::span<const std::size_t> axes_c) {
  std::vector<std::size_t> abc(axes_a.begin(), axes_a.end());
  abc.insert(abc.end(), axes_b.begin(), axes_b.end());
  abc.insert(abc.end(), axes_c.begin(), axes_c.end());
  const Joint pabc = joint.marginal(abc);
  std::size_t na = 1, nb = 1, nc = 1;
  for (std::size_t a : axes_a) na *= joint.card(a);
  for (std::size_t b : axes_b) nb *= joint.card(b);
  for (std::size_t c : axes_c) nc *= joint.card(c);

  std::vector<double> pac(na * nc, 0.0), pbc(nb * nc, 0.0), pc(nc, 0.0);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      for (std::size_t k = 0; k < nc; ++k) {
        const double p = pabc.at_flat((i * nb + j) * nc + k);
        pac[i * nc + k] += p;
        pbc[j * nc + k] += p;
        pc[k] += p;
      }
    }
  }
  double cmi = 0.0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      for (std::size_t k = 0; k < nc; ++k) {
        const double p = pabc.at_flat((i * nb + j) * nc + k);
        if (p > 0.0) {
          cmi += p * std::log(p * pc[k] / (pac[i * nc + k] * pbc[j * nc + k]));
        }
      }
    }
  }
  return cmi;
}

inline double conditional_mutual_information(const Joint& joint,
                                             std::initializer_list<std::size_t> axes_a,
                                             std::initializer_list<std::size_t> axes_b,
                                             std::initializer_list<std::size_t> axes_c) {
  return conditional_mutual_information(
      joint, std::span<const std::size_t>(axes_a.begin(), axes_a.size()),
      std::span<const std::size_t>(axes_b.begin(), axes_b.size()),
      std::span<const std::size_t>(axes_c.begin(), axes_c.size()));
}

// psi(rho, P_{Z|L}, P_L) = log sum_{z,l} P_L(l) P_{Z|L}(z|l)^{1+rho} P_Z(z)^{-rho},
// defined for 0 < rho <= 1. Terms with P_L(l) = 0 or P_{Z|L}(z|l) = 0 contribute
// nothing before any negative power is taken. Evaluated in log domain with a
// max shift, so exponentially small P_Z (n-fold channels) stays stable.
inline double psi(double rho, const Channel& z_given_l, const Distribution& p_l) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("psi needs rho in (0, 1]");
  if (p_l.size() != z_given_l.inputs()) throw std::invalid_argument("psi dimension mismatch");
  const Distribution p_z = z_given_l.apply(p_l);
  std::vector<double> terms;
  terms.reserve(p_l.size() * z_given_l.outputs());
  for (std::size_t z = 0; z < z_given_l.outputs(); ++z) {
    if (p_z[z] == 0.0) continue;
    const double log_pz = std::log(p_z[z]);
    for (std::size_t l = 0; l < p_l.size(); ++l) {
      const double w = z_given_l.at(l, z);
      if (p_l[l] == 0.0 || w == 0.0) continue;
      terms.push_back(std::log(p_l[l]) + (1.0 + rho) * std::log(w) - rho * log_pz);
    }
  }
  return log_sum_exp(terms);
}

// phi(rho, P_{Z|L}, P_L) = log sum_z ( sum_l P_L(l) P_{Z|L}(z|l)^{1/(1-rho)} )^{1-rho}
// for 0 < rho < 1; at rho = 1 the continuous limit log sum_z max_{l: P_L(l)>0}
// P_{Z|L}(z|l) is used.
inline double phi(double rho, const Channel& z_given_l, const Distribution& p_l) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("phi needs rho in (0, 1]");
  if (p_l.size() != z_given_l.inputs()) throw std::invalid_argument("phi dimension mismatch");
  std::vector<double> outer;
  outer.reserve(z_given_l.outputs());
  if (rho == 1.0) {
    for (std::size_t z = 0; z < z_given_l.outputs(); ++z) {
      double best = 0.0;
      for (std::size_t l = 0; l < p_l.size(); ++l) {
        if (p_l[l] > 0.0 && z_given_l.at(l, z) > best) best = z_given_l.at(l, z);
      }
      if (best > 0.0) outer.push_back(std::log(best));
    }
    return log_sum_exp(outer);
  }
  const double s = 1.0 / (1.0 - rho);
  std::vector<double> inner;
  for (std::size_t z = 0; z < z_given_l.outputs(); ++z) {
    inner.clear();
    for (std::size_t l = 0; l < p_l.size(); ++l) {
      const double w = z_given_l.at(l, z);
      if (p_l[l] == 0.0 || w == 0.0) continue;
      inner.push_back(std::log(p_l[l]) + s * std::log(w));
    }
    if (!inner.empty()) outer.push_back((1.0 - rho) * log_sum_exp(inner));
  }
  return log_sum_exp(outer);
}

/// (1/rho) log sum_u P_U(u) exp(phi(rho, P_{Z|V}, P_{V|U=u})); converges to
/// I(V; Z | U) as rho -> 0.
inline double averaged_phi_rate(double rho, const Distribution& p_u,
                                const Channel& v_given_u, const Channel& z_given_v) {
  if (p_u.size() != v_given_u.inputs()) throw std::invalid_argument("dimension mismatch");
  std::vector<double> terms;
  terms.reserve(p_u.size());
  for (std::size_t u = 0; u < p_u.size(); ++u) {
    if (p_u[u] == 0.0) continue;
    terms.push_back(std::log(p_u[u]) + phi(rho, z_given_v, v_given_u.row_dist(u)));
  }
  return log_sum_exp(terms) / rho;
}

/// The four single-letter quantities entering the rate regions.
struct InfoQuantities {
  double i_uy = 0.0;    // I(U; Y)
  double i_uz = 0.0;    // I(U; Z)
  double i_vy_u = 0.0;  // I(V; Y | U)
  double i_vz_u = 0.0;  // I(V; Z | U)

  double min_i_u() const { return std::min(i_uy, i_uz); }
};

namespace detail {

inline double mi_2d(std::span<const double> p, std::size_t na, std::size_t nb) {
  std::vector<double> pa(na, 0.0), pb(nb, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      pa[a] += p[a * nb + b];
      pb[b] += p[a * nb + b];
    }
  }
  double mi = 0.0;
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t b = 0; b < nb; ++b) {
      const double x = p[a * nb + b];
      if (x > 0.0) mi += x * std::log(x / (pa[a] * pb[b]));
    }
  }
  return mi;
}

}  // namespace detail

/// I(U;Y), I(U;Z), I(V;Y|U), I(V;Z|U) for the chain U -> V -> X -> (Y, Z),
/// computed with dense per-u loops (fast enough for grid scans).
inline InfoQuantities markov_informations(const MarkovSpec& spec, const Channel& bob,
                                          const Channel& eve) {
  const Channel wy = compose(spec.x_given_v, bob);
  const Channel wz = compose(spec.x_given_v, eve);
  const std::size_t nu = spec.p_u.size();
  const std::size_t nv = spec.v_given_u.outputs();
  const std::size_t ny = wy.outputs();
  const std::size_t nz = wz.outputs();

  InfoQuantities iq;
  std::vector<double> puy(nu * ny, 0.0), puz(nu * nz, 0.0);
  std::vector<double> pvy(nv * ny), pvz(nv * nz);
  for (std::size_t u = 0; u < nu; ++u) {
    const double pu = spec.p_u[u];
    std::fill(pvy.begin(), pvy.end(), 0.0);
    std::fill(pvz.begin(), pvz.end(), 0.0);
    for (std::size_t v = 0; v < nv; ++v) {
      const double pv_u = spec.v_given_u.at(u, v);
      if (pv_u == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) pvy[v * ny + y] = pv_u * wy.at(v, y);
      for (std::size_t z = 0; z < nz; ++z) pvz[v * nz + z] = pv_u * wz.at(v, z);
    }
    for (std::size_t v = 0; v < nv; ++v) {
      for (std::size_t y = 0; y < ny; ++y) puy[u * ny + y] += pu * pvy[v * ny + y];
      for (std::size_t z = 0; z < nz; ++z) puz[u * nz + z] += pu * pvz[v * nz + z];
    }
    if (pu > 0.0) {
      iq.i_vy_u += pu * detail::mi_2d(pvy, nv, ny);
      iq.i_vz_u += pu * detail::mi_2d(pvz, nv, nz);
    }
  }
  iq.i_uy = detail::mi_2d(puy, nu, ny);
  iq.i_uz = detail::mi_2d(puz, nu, nz);
  return iq;
}

}  // namespace secmux
