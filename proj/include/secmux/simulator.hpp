#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "secmux/hash_family.hpp"
#include "secmux/info.hpp"
#include "secmux/privacy_amplification.hpp"
#include "secmux/regions.hpp"

namespace secmux {

// Random code: one u-word per common message e, one v-word per (e, b).
struct Codebook {
  std::size_t n = 0;
  std::vector<std::vector<std::uint32_t>> u_words;               // [e][t]
  std::vector<std::vector<std::vector<std::uint32_t>>> v_words;  // [e][b][t]

  std::size_t num_common() const { return u_words.size(); }
  std::size_t num_private() const { return v_words.empty() ? 0 : v_words[0].size(); }
};

namespace detail {

inline std::size_t sample_index(std::span<const double> p, Rng& rng) {
  const double r = rng.unit();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    acc += p[i];
    last = i;
    if (r < acc) return i;
  }
  return last;
}

}  // namespace detail

/// Draws the random codebook: u-words i.i.d. from P_U, then per common
/// message num_private v-words drawn position-wise from P_{V|U=u_t}.
/// Deterministic under the seed (draw order is part of the contract).
inline Codebook build_codebook(std::size_t n, const Distribution& p_u,
                               const Channel& v_given_u, std::size_t num_common,
                               std::size_t num_private, Rng& rng,
                               const Guards& guards = {}) {
  if (n == 0 || num_common == 0 || num_private == 0) {
    throw std::invalid_argument("codebook needs positive n and message counts");
  }
  if (p_u.size() != v_given_u.inputs()) throw std::invalid_argument("codebook chain mismatch");
  const std::uint64_t v_space = pow_u64(v_given_u.outputs(), n);
  if (v_space > guards.joint_entries) {
    throw_guard("joint_entries", v_space, guards.joint_entries);
  }
  Codebook cb;
  cb.n = n;
  cb.u_words.resize(num_common);
  cb.v_words.resize(num_common);
  for (std::size_t e = 0; e < num_common; ++e) {
    auto& u = cb.u_words[e];
    u.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
      u[t] = static_cast<std::uint32_t>(detail::sample_index(p_u.values(), rng));
    }
    cb.v_words[e].resize(num_private);
    for (std::size_t b = 0; b < num_private; ++b) {
      auto& v = cb.v_words[e][b];
      v.resize(n);
      for (std::size_t t = 0; t < n; ++t) {
        v[t] = static_cast<std::uint32_t>(detail::sample_index(v_given_u.row(u[t]), rng));
      }
    }
  }
  return cb;
}

// One multiplex encoder instance: the message factorization, the bijection f
// (and its inverse) on B, the codebook, the artificial-noise channel, and the
// common-message distribution.
struct EncoderConfig {
  MessageLayout layout;
  Bijection f;
  Bijection f_inv;
  Codebook codebook;
  Channel x_given_v;
  Distribution common_dist;

  EncoderConfig(MessageLayout lay, Bijection bij, Codebook cb, Channel xv,
                Distribution common)
      : layout(std::move(lay)),
        f(std::move(bij)),
        f_inv(),
        codebook(std::move(cb)),
        x_given_v(std::move(xv)),
        common_dist(std::move(common)) {
    if (f.size() != layout.space_size()) {
      throw std::invalid_argument("bijection does not act on the layout space");
    }
    if (!is_bijection_table(f)) throw std::invalid_argument("f is not a bijection");
    if (codebook.num_private() != layout.space_size()) {
      throw std::invalid_argument("codebook must carry one v-word per private message");
    }
    if (codebook.num_common() != common_dist.size()) {
      throw std::invalid_argument("common-message distribution size mismatch");
    }
    f_inv = invert_bijection(f);
  }
};

struct EncodeResult {
  std::vector<std::uint32_t> x;       // transmitted word
  std::uint64_t b = 0;                // private message fed to the code
  std::vector<std::uint32_t> s_full;  // (s_1 .. s_T, s_{T+1}) factor values
};

/// Multiplex encoding: draw the randomness factor uniformly, pull the stacked
/// message back through f^{-1}, look up the v-word, apply artificial noise.
inline EncodeResult encode(std::span<const std::uint32_t> secrets, std::uint32_t common,
                           const EncoderConfig& cfg, Rng& rng) {
  const auto& layout = cfg.layout;
  const std::size_t t = layout.num_secrets();
  if (secrets.size() != t) throw std::invalid_argument("expected one value per secret factor");
  for (std::size_t i = 0; i < t; ++i) {
    if (secrets[i] >= layout.factor_size(i + 1)) {
      throw std::invalid_argument("secret message out of range");
    }
  }
  if (common >= cfg.codebook.num_common()) {
    throw std::invalid_argument("common message out of range");
  }

  EncodeResult out;
  out.s_full.assign(secrets.begin(), secrets.end());
  const std::uint64_t randomness = rng.below(layout.factor_size(t + 1));
  out.s_full.push_back(static_cast<std::uint32_t>(randomness));

  // stack factor values into the index of B
  std::uint64_t s_index = 0;
  for (std::size_t i = 0; i < out.s_full.size(); ++i) {
    s_index = s_index * layout.factor_size(i + 1) + out.s_full[i];
  }
  out.b = cfg.f_inv[static_cast<std::size_t>(s_index)];

  const auto& v = cfg.codebook.v_words[common][static_cast<std::size_t>(out.b)];
  out.x.resize(v.size());
  for (std::size_t pos = 0; pos < v.size(); ++pos) {
    out.x[pos] = static_cast<std::uint32_t>(
        detail::sample_index(cfg.x_given_v.row(v[pos]), rng));
  }
  return out;
}

struct LeakageEntry {
  Subset subset;
  double r_i = 0.0;               // log prod_{i in I} |S_i| / n
  double mi = 0.0;                // I(S_I; Z^n)
  double mi_given_common = 0.0;   // I(S_I; Z^n | E)
  double equivocation = 0.0;      // H(S_I | Z^n)
  double equivocation_rate = 0.0; // per symbol
  double message_entropy = 0.0;   // log prod |S_i|
};

/// Exact leakage of the subset's messages to a receiver observing through
/// `eve` (P_{Z|X}), marginalized over the other factors, the randomness slot,
/// the common message, and channel noise. Brute force over the full joint.
inline LeakageEntry exact_leakage(const EncoderConfig& cfg, const Subset& subset,
                                  const Channel& eve, const Guards& guards = {}) {
  const auto& layout = cfg.layout;
  validate_subset(layout, subset, false);
  if (eve.inputs() != cfg.x_given_v.outputs()) {
    throw std::invalid_argument("eavesdropper channel dimension mismatch");
  }
  const Channel z_given_v = compose(cfg.x_given_v, eve);
  const std::size_t n = cfg.codebook.n;
  const std::uint64_t space = layout.space_size();
  const std::size_t ne = cfg.codebook.num_common();
  const std::uint64_t zn = pow_u64(eve.outputs(), n);
  const std::uint64_t need = mul_sat_u64(mul_sat_u64(space, ne), zn);
  if (need > guards.joint_entries) throw_guard("joint_entries", need, guards.joint_entries);

  const auto proj = projection_table(layout, subset);
  const std::uint64_t m_size = projected_size(layout, subset);

  std::vector<double> p(static_cast<std::size_t>(m_size * ne * zn), 0.0);
  std::vector<std::size_t> zd(n);
  const double pb = 1.0 / static_cast<double>(space);
  for (std::uint64_t b = 0; b < space; ++b) {
    const std::size_t m = proj[cfg.f[static_cast<std::size_t>(b)]];
    for (std::size_t e = 0; e < ne; ++e) {
      const double base = pb * cfg.common_dist[e];
      if (base == 0.0) continue;
      const auto& v = cfg.codebook.v_words[e][static_cast<std::size_t>(b)];
      for (std::uint64_t zi = 0; zi < zn; ++zi) {
        std::uint64_t zv = zi;
        for (std::size_t t = n; t-- > 0;) {
          zd[t] = static_cast<std::size_t>(zv % eve.outputs());
          zv /= eve.outputs();
        }
        double lik = 1.0;
        for (std::size_t t = 0; t < n; ++t) lik *= z_given_v.at(v[t], zd[t]);
        p[static_cast<std::size_t>((m * ne + e) * zn + zi)] += base * lik;
      }
    }
  }

  const Joint joint({static_cast<std::size_t>(m_size), ne, static_cast<std::size_t>(zn)},
                    std::move(p));
  LeakageEntry entry;
  entry.subset = subset;
  entry.message_entropy = std::log(static_cast<double>(m_size));
  entry.r_i = entry.message_entropy / static_cast<double>(n);
  entry.mi = mutual_information(joint, {0}, {2});
  entry.mi_given_common = conditional_mutual_information(joint, {0}, {2}, {1});
  const Joint mz = joint.marginal({0, 2});
  entry.equivocation = entropy(mz) - entropy(joint.marginal({2}));
  entry.equivocation_rate = entry.equivocation / static_cast<double>(n);
  return entry;
}

namespace detail {

/// Exact average maximum-likelihood decoding error over (e, b) pairs; the
/// `wrong` predicate decides whether a decoded pair is an error for the sent
/// pair, so the multiplexed and raw schemes share one enumeration.
inline double ml_error(const Codebook& cb, const Channel& y_given_v,
                       const Distribution& common_dist,
                       const std::function<bool(std::size_t, std::uint64_t, std::size_t,
                                                std::uint64_t)>& wrong,
                       const Guards& guards) {
  const std::size_t n = cb.n;
  const std::size_t ne = cb.num_common();
  const std::size_t nb = cb.num_private();
  const std::uint64_t yn = pow_u64(y_given_v.outputs(), n);
  const std::uint64_t need = mul_sat_u64(mul_sat_u64(yn, ne), nb);
  if (need > guards.joint_entries) throw_guard("joint_entries", need, guards.joint_entries);

  const double pb = 1.0 / static_cast<double>(nb);
  std::vector<std::size_t> yd(n);
  std::vector<double> lik(ne * nb);
  double err = 0.0;
  for (std::uint64_t yi = 0; yi < yn; ++yi) {
    std::uint64_t yv = yi;
    for (std::size_t t = n; t-- > 0;) {
      yd[t] = static_cast<std::size_t>(yv % y_given_v.outputs());
      yv /= y_given_v.outputs();
    }
    std::size_t best_e = 0;
    std::uint64_t best_b = 0;
    double best = -1.0;
    for (std::size_t e = 0; e < ne; ++e) {
      for (std::size_t b = 0; b < nb; ++b) {
        double l = 1.0;
        const auto& v = cb.v_words[e][b];
        for (std::size_t t = 0; t < n; ++t) l *= y_given_v.at(v[t], yd[t]);
        lik[e * nb + b] = l;
        if (l > best) {  // ties stay with the lowest codeword index
          best = l;
          best_e = e;
          best_b = b;
        }
      }
    }
    for (std::size_t e = 0; e < ne; ++e) {
      for (std::size_t b = 0; b < nb; ++b) {
        if (wrong(best_e, best_b, e, b)) {
          err += common_dist[e] * pb * lik[e * nb + b];
        }
      }
    }
  }
  return err;
}

}  // namespace detail

/// ML decoding error of the underlying code (no multiplexing), messages
/// (e, b) uniform in b, e distributed per the config.
inline double bob_error_probability(const EncoderConfig& cfg, const Channel& bob,
                                    const Guards& guards = {}) {
  const Channel y_given_v = compose(cfg.x_given_v, bob);
  return detail::ml_error(
      cfg.codebook, y_given_v, cfg.common_dist,
      [](std::size_t de, std::uint64_t db, std::size_t e, std::uint64_t b) {
        return de != e || db != b;
      },
      guards);
}

/// ML decoding error of the multiplexed scheme: an error is a wrong common
/// message or a wrong recovered message stack f(b). Since f is a bijection
/// this matches the raw error term for term.
inline double multiplex_error_probability(const EncoderConfig& cfg, const Channel& bob,
                                          const Guards& guards = {}) {
  const Channel y_given_v = compose(cfg.x_given_v, bob);
  const auto& f = cfg.f;
  return detail::ml_error(
      cfg.codebook, y_given_v, cfg.common_dist,
      [&f](std::size_t de, std::uint64_t db, std::size_t e, std::uint64_t b) {
        return de != e || f[static_cast<std::size_t>(db)] != f[static_cast<std::size_t>(b)];
      },
      guards);
}

// Everything needed to evaluate candidate (f, codebook) pairs.
struct SimulationSetup {
  MessageLayout layout;
  std::size_t n;
  Distribution p_u;      // codebook-generating distributions
  Channel v_given_u;
  Channel x_given_v;
  Channel bob;           // P_{Y|X}
  Channel eve;           // P_{Z|X}
  std::size_t num_common;
  Distribution common_dist;

  SimulationSetup(MessageLayout lay, std::size_t block, Distribution pu, Channel vu,
                  Channel xv, Channel pyx, Channel pzx, std::size_t ne,
                  std::optional<Distribution> e_dist = std::nullopt)
      : layout(std::move(lay)),
        n(block),
        p_u(std::move(pu)),
        v_given_u(std::move(vu)),
        x_given_v(std::move(xv)),
        bob(std::move(pyx)),
        eve(std::move(pzx)),
        num_common(ne),
        common_dist(e_dist ? std::move(*e_dist) : Distribution::uniform(ne)) {
    if (p_u.size() != v_given_u.inputs() || v_given_u.outputs() != x_given_v.inputs()) {
      throw std::invalid_argument("setup chain dimension mismatch");
    }
    if (bob.inputs() != x_given_v.outputs() || eve.inputs() != x_given_v.outputs()) {
      throw std::invalid_argument("receiver channel dimension mismatch");
    }
    if (common_dist.size() != num_common) {
      throw std::invalid_argument("common-message distribution size mismatch");
    }
  }

  double rate_private() const {  // R_p = log|B| / n
    return std::log(static_cast<double>(layout.space_size())) / static_cast<double>(n);
  }
  double rate_common() const {
    return std::log(static_cast<double>(num_common)) / static_cast<double>(n);
  }
  EncoderConfig make_config(Bijection f, Codebook cb) const {
    return EncoderConfig(layout, std::move(f), std::move(cb), x_given_v, common_dist);
  }
};

struct PairEvaluation {
  std::size_t f_index = 0;
  std::size_t cb_index = 0;
  std::vector<LeakageEntry> leakage;  // one entry per requested subset
  double error = 0.0;
};

struct ExistenceResult {
  bool found = false;
  std::size_t best_f = 0;
  std::size_t best_cb = 0;
  double multiplier = 0.0;
  std::vector<Subset> subsets;
  std::vector<double> average_leakage;     // ensemble mean of I(S_I; Z^n) per subset
  std::vector<double> leakage_thresholds;  // multiplier * average
  double average_error = 0.0;
  double error_threshold = 0.0;
  std::vector<PairEvaluation> evaluations;
};

/// Scans all candidate pairs and returns one meeting, for every subset, the
/// multiplier-inflated ensemble averages of leakage and decoding error. The
/// default multiplier is 2 * 2^T. Among qualifying pairs the one with the
/// smallest worst-subset leakage wins (ties to the lowest pair index).
inline ExistenceResult existence_search(const SimulationSetup& setup,
                                        const std::vector<Bijection>& fs,
                                        const std::vector<Codebook>& codebooks,
                                        const std::vector<Subset>& subsets,
                                        double multiplier = 0.0,
                                        const Guards& guards = {}) {
  if (fs.empty() || codebooks.empty()) {
    throw std::invalid_argument("existence search needs candidates");
  }
  if (subsets.empty()) throw std::invalid_argument("existence search needs subsets");
  ExistenceResult result;
  result.subsets = subsets;
  result.multiplier = multiplier > 0.0
                          ? multiplier
                          : 2.0 * std::pow(2.0, static_cast<double>(setup.layout.num_secrets()));

  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    for (std::size_t ci = 0; ci < codebooks.size(); ++ci) {
      const EncoderConfig cfg = setup.make_config(fs[fi], codebooks[ci]);
      PairEvaluation ev;
      ev.f_index = fi;
      ev.cb_index = ci;
      for (const auto& subset : subsets) {
        ev.leakage.push_back(exact_leakage(cfg, subset, setup.eve, guards));
      }
      ev.error = bob_error_probability(cfg, setup.bob, guards);
      result.evaluations.push_back(std::move(ev));
    }
  }

  const double count = static_cast<double>(result.evaluations.size());
  result.average_leakage.assign(subsets.size(), 0.0);
  for (const auto& ev : result.evaluations) {
    for (std::size_t s = 0; s < subsets.size(); ++s) {
      result.average_leakage[s] += ev.leakage[s].mi;
    }
    result.average_error += ev.error;
  }
  for (double& v : result.average_leakage) v /= count;
  result.average_error /= count;
  result.leakage_thresholds.resize(subsets.size());
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    result.leakage_thresholds[s] = result.multiplier * result.average_leakage[s];
  }
  result.error_threshold = result.multiplier * result.average_error;

  double best_worst = -1.0;
  for (const auto& ev : result.evaluations) {
    bool ok = ev.error <= result.error_threshold;
    double worst = 0.0;
    for (std::size_t s = 0; s < subsets.size() && ok; ++s) {
      if (ev.leakage[s].mi > result.leakage_thresholds[s]) ok = false;
      worst = std::max(worst, ev.leakage[s].mi);
    }
    if (!ok) continue;
    if (!result.found || worst < best_worst) {
      result.found = true;
      result.best_f = ev.f_index;
      result.best_cb = ev.cb_index;
      best_worst = worst;
    }
  }
  return result;
}

struct BoundCheckRow {
  double rho = 0.0;
  double lhs_avg_exp = 0.0;   // ensemble mean of exp(rho * I(S_I; Z^n | E))
  double rhs = 0.0;           // 1 + [exp(rho (R_I - R_p)) sum_u P_U exp(phi)]^n
  double phi_term = 0.0;      // log sum_u P_U(u) exp(phi(rho, P_{Z|V}, P_{V|U=u}))
  double i_vz_u = 0.0;
  double eps_rho = 0.0;       // (1/rho) phi_term - I(V;Z|U)
  double rate_gap = 0.0;      // R_I - R_p
  double equivocation_bound = 0.0;  // (1 + log(2*2^T))/(n rho) + rate_gap + I(V;Z|U) + eps
  bool bound_applicable = false;    // the log(1+exp(x)) <= 1+x step needs x >= 0
  bool holds = false;               // lhs <= rhs
};

/// Compares the exact ensemble average of exp(rho I) against the single-letter
/// bound for each rho on the grid, and reports the per-symbol equivocation
/// bound components alongside.
inline std::vector<BoundCheckRow> bound_check(const SimulationSetup& setup,
                                              const std::vector<Bijection>& fs,
                                              const std::vector<Codebook>& codebooks,
                                              const Subset& subset,
                                              std::span<const double> rho_grid,
                                              const Guards& guards = {}) {
  if (fs.empty() || codebooks.empty()) throw std::invalid_argument("bound check needs candidates");
  const Channel z_given_v = compose(setup.x_given_v, setup.eve);
  const double r_i = std::log(static_cast<double>(projected_size(setup.layout, subset))) /
                     static_cast<double>(setup.n);
  const double r_p = setup.rate_private();

  std::vector<double> mis;
  mis.reserve(fs.size() * codebooks.size());
  for (const auto& f : fs) {
    for (const auto& cb : codebooks) {
      const EncoderConfig cfg = setup.make_config(f, cb);
      mis.push_back(exact_leakage(cfg, subset, setup.eve, guards).mi_given_common);
    }
  }

  const Joint uvz = uvz_joint(setup.p_u, setup.v_given_u, z_given_v);
  const double i_vz_u = conditional_mutual_information(uvz, {1}, {2}, {0});
  const double t_count = static_cast<double>(setup.layout.num_secrets());
  const double log_mult = std::log(2.0 * std::pow(2.0, t_count));

  std::vector<BoundCheckRow> rows;
  rows.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    BoundCheckRow row;
    row.rho = rho;
    row.rate_gap = r_i - r_p;
    row.i_vz_u = i_vz_u;
    double acc = 0.0;
    for (double mi : mis) acc += std::exp(rho * mi);
    row.lhs_avg_exp = acc / static_cast<double>(mis.size());

    std::vector<double> terms;
    for (std::size_t u = 0; u < setup.p_u.size(); ++u) {
      if (setup.p_u[u] == 0.0) continue;
      terms.push_back(std::log(setup.p_u[u]) +
                      phi(rho, z_given_v, setup.v_given_u.row_dist(u)));
    }
    row.phi_term = log_sum_exp(terms);
    row.rhs = 1.0 + std::pow(std::exp(rho * row.rate_gap + row.phi_term),
                             static_cast<double>(setup.n));
    row.eps_rho = row.phi_term / rho - i_vz_u;
    const double x = row.rate_gap + i_vz_u + row.eps_rho;
    row.bound_applicable = x >= 0.0;
    row.equivocation_bound =
        (1.0 + log_mult) / (static_cast<double>(setup.n) * rho) + x;
    row.holds = row.lhs_avg_exp <= row.rhs + kDerivedTol;
    rows.push_back(row);
  }
  return rows;
}

// Full desk-scale run description: candidate bijections (an explicit list, an
// enumerable family, or sampled members), seeded codebooks, and the rho grid
// for the bound comparison.
struct SimulationRun {
  SimulationSetup setup;
  std::vector<std::uint64_t> codebook_seeds;
  std::optional<HashFamily> family;                 // candidate source
  std::optional<std::vector<Bijection>> f_tables;   // explicit candidates
  std::size_t num_sampled_f = 0;                    // > 0: sample instead of enumerating
  std::uint64_t f_seed = 0;
  std::vector<double> rho_grid;
  std::vector<Subset> subsets;                      // default: all nonempty of {1..T}
  std::map<Subset, double> target_re;               // optional feasibility targets
  double existence_multiplier = 0.0;                // <= 0: default 2 * 2^T
};

struct SimulationReport {
  std::size_t n = 0;
  double r_p = 0.0;
  double r_common = 0.0;
  std::vector<double> r_secret;  // realized per-factor rates k_i log q / n
  std::vector<Subset> subsets;
  std::size_t num_f = 0;
  std::size_t num_codebooks = 0;
  ExistenceResult existence;
  std::vector<LeakageEntry> best_pair_leakage;
  double best_pair_error = 0.0;
  double best_pair_multiplex_error = 0.0;
  std::map<Subset, std::vector<BoundCheckRow>> bound_rows;
  std::map<Subset, bool> feasibility;  // R_I - R_{e,I} > R_I - R_p + I(V;Z|U)
  double i_vz_u = 0.0;
};

inline SimulationReport run_simulation(const SimulationRun& run, const Guards& guards = {}) {
  const auto& setup = run.setup;
  if (run.codebook_seeds.empty()) throw std::invalid_argument("need at least one codebook seed");

  std::vector<Bijection> fs;
  if (run.f_tables) {
    fs = *run.f_tables;
    for (const auto& f : fs) {
      if (f.size() != setup.layout.space_size() || !is_bijection_table(f)) {
        throw std::invalid_argument("candidate table is not a bijection on B");
      }
    }
  } else if (run.family) {
    if (run.num_sampled_f > 0) {
      Rng rng(run.f_seed);
      for (std::size_t i = 0; i < run.num_sampled_f; ++i) {
        fs.push_back(run.family->sample_member(rng));
      }
    } else {
      fs = run.family->enumerate_members(guards);
    }
  } else {
    throw std::invalid_argument("simulation needs candidate bijections");
  }
  if (fs.empty()) throw std::invalid_argument("empty candidate set");

  std::vector<Codebook> codebooks;
  codebooks.reserve(run.codebook_seeds.size());
  for (std::uint64_t seed : run.codebook_seeds) {
    Rng rng(seed);
    codebooks.push_back(build_codebook(setup.n, setup.p_u, setup.v_given_u, setup.num_common,
                                       static_cast<std::size_t>(setup.layout.space_size()),
                                       rng, guards));
  }

  std::vector<Subset> subsets =
      run.subsets.empty() ? all_nonempty_subsets(setup.layout.num_secrets()) : run.subsets;
  for (const auto& s : subsets) validate_subset(setup.layout, s, false);

  SimulationReport report;
  report.n = setup.n;
  report.r_p = setup.rate_private();
  report.r_common = setup.rate_common();
  for (std::size_t i = 1; i <= setup.layout.num_secrets(); ++i) {
    report.r_secret.push_back(std::log(static_cast<double>(setup.layout.factor_size(i))) /
                              static_cast<double>(setup.n));
  }
  report.subsets = subsets;
  report.num_f = fs.size();
  report.num_codebooks = codebooks.size();
  report.existence =
      existence_search(setup, fs, codebooks, subsets, run.existence_multiplier, guards);

  const std::size_t best_f = report.existence.found ? report.existence.best_f : 0;
  const std::size_t best_cb = report.existence.found ? report.existence.best_cb : 0;
  const EncoderConfig best_cfg = setup.make_config(fs[best_f], codebooks[best_cb]);
  for (const auto& subset : subsets) {
    report.best_pair_leakage.push_back(exact_leakage(best_cfg, subset, setup.eve, guards));
  }
  report.best_pair_error = bob_error_probability(best_cfg, setup.bob, guards);
  report.best_pair_multiplex_error = multiplex_error_probability(best_cfg, setup.bob, guards);

  const Joint uvz = uvz_joint(setup.p_u, setup.v_given_u, compose(setup.x_given_v, setup.eve));
  report.i_vz_u = conditional_mutual_information(uvz, {1}, {2}, {0});
  for (const auto& subset : subsets) {
    if (!run.rho_grid.empty()) {
      report.bound_rows[subset] =
          bound_check(setup, fs, codebooks, subset, run.rho_grid, guards);
    }
    const auto it = run.target_re.find(subset);
    if (it != run.target_re.end()) {
      // decay condition: R_I - R_{e,I} > R_I - R_p + I(V;Z|U)
      report.feasibility[subset] = -it->second > -report.r_p + report.i_vz_u;
    }
  }
  return report;
}

}  // namespace secmux
