#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "secmux/hash_family.hpp"
#include "secmux/info.hpp"

namespace secmux {

// Right-hand side of the strengthened privacy-amplification bound,
// 1 + |M|^rho E[P_{L|Z}(L|Z)^rho], together with its two specializations:
// the uniform-L rewriting and, on top of that, the psi-based discrete form
// (|M|/|L|)^rho exp(psi(rho, P_{Z|L}, P_L)).
struct PaBound {
  double rho = 0.0;
  std::uint64_t m_size = 0;
  double expectation = 0.0;  // E[P_{L|Z}(L|Z)^rho]
  double rhs = 0.0;          // 1 + |M|^rho * expectation
  std::optional<double> rhs_uniform;   // requires uniform L
  std::optional<double> rhs_discrete;  // requires uniform L and discrete Z
};

inline PaBound pa_rhs(double rho, std::uint64_t m_size, const Joint& lz,
                      bool require_uniform = false) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("pa_rhs needs rho in (0, 1]");
  if (lz.rank() != 2) throw std::invalid_argument("pa_rhs expects a joint over (L, Z)");
  if (m_size == 0) throw std::invalid_argument("pa_rhs needs a nonempty hash range");
  const std::size_t nl = lz.card(0);
  const std::size_t nz = lz.card(1);
  const Distribution p_l = lz.marginal_dist(0);
  const Distribution p_z = lz.marginal_dist(1);

  const bool uniform = p_l.is_uniform();
  if (require_uniform && !uniform) {
    throw std::invalid_argument("uniform form requested on a non-uniform L");
  }

  PaBound out;
  out.rho = rho;
  out.m_size = m_size;
  double expectation = 0.0;
  for (std::size_t l = 0; l < nl; ++l) {
    for (std::size_t z = 0; z < nz; ++z) {
      const double p = lz.at_flat(l * nz + z);
      if (p == 0.0 || p_z[z] == 0.0) continue;
      expectation += p * std::pow(p / p_z[z], rho);
    }
  }
  out.expectation = expectation;
  out.rhs = 1.0 + std::pow(static_cast<double>(m_size), rho) * expectation;

  if (uniform) {
    // |M|^rho E[P_{L|Z}^rho P_L^{-rho}] / |L|^rho, evaluated literally
    double e2 = 0.0;
    for (std::size_t l = 0; l < nl; ++l) {
      for (std::size_t z = 0; z < nz; ++z) {
        const double p = lz.at_flat(l * nz + z);
        if (p == 0.0 || p_z[z] == 0.0) continue;
        e2 += p * std::pow(p / p_z[z], rho) * std::pow(p_l[l], -rho);
      }
    }
    const double scale = std::pow(static_cast<double>(m_size) / static_cast<double>(nl), rho);
    out.rhs_uniform = 1.0 + scale * e2;

    // psi-based discrete form from the conditional channel P_{Z|L}
    std::vector<double> rows(nl * nz, 0.0);
    for (std::size_t l = 0; l < nl; ++l) {
      if (p_l[l] == 0.0) {
        rows[l * nz] = 1.0;  // arbitrary valid row; weight is zero
        continue;
      }
      for (std::size_t z = 0; z < nz; ++z) rows[l * nz + z] = lz.at_flat(l * nz + z) / p_l[l];
    }
    const Channel z_given_l(nl, nz, std::move(rows));
    out.rhs_discrete = 1.0 + scale * std::exp(psi(rho, z_given_l, p_l));
  }
  return out;
}

struct PaLhs {
  double average = 0.0;                // E_f exp(rho * I(proj(f(L)); Z))
  std::vector<double> per_member_mi;   // I(proj(f(L)); Z) per member, nats
};

/// Exact ensemble average of exp(rho * I(proj(f(L)); Z)) over every family
/// member, each mutual information computed from the deterministic
/// pushforward of the (L, Z) joint.
inline PaLhs pa_lhs_detail(const HashFamily& family, double rho, const Joint& lz,
                           const Subset& subset, const Guards& guards = {}) {
  if (!(rho > 0.0 && rho <= 1.0)) throw std::invalid_argument("pa_lhs needs rho in (0, 1]");
  if (lz.rank() != 2) throw std::invalid_argument("pa_lhs expects a joint over (L, Z)");
  const auto& layout = family.layout();
  if (lz.card(0) != layout.space_size()) {
    throw std::invalid_argument("L alphabet must equal the family's message space B");
  }
  validate_subset(layout, subset, true);
  const std::size_t nz = lz.card(1);
  const std::size_t nm = static_cast<std::size_t>(projected_size(layout, subset));
  const auto proj = projection_table(layout, subset);
  const auto members = family.enumerate_members(guards);

  PaLhs out;
  out.per_member_mi.reserve(members.size());
  double acc = 0.0;
  std::vector<double> pushforward(nm * nz);
  for (const auto& f : members) {
    std::fill(pushforward.begin(), pushforward.end(), 0.0);
    for (std::size_t l = 0; l < lz.card(0); ++l) {
      const std::size_t m = proj[f[l]];
      for (std::size_t z = 0; z < nz; ++z) {
        pushforward[m * nz + z] += lz.at_flat(l * nz + z);
      }
    }
    const double mi = detail::mi_2d(pushforward, nm, nz);
    out.per_member_mi.push_back(mi);
    acc += std::exp(rho * mi);
  }
  out.average = acc / static_cast<double>(members.size());
  return out;
}

inline double pa_lhs_exact(const HashFamily& family, double rho, const Joint& lz,
                           const Subset& subset, const Guards& guards = {}) {
  return pa_lhs_detail(family, rho, lz, subset, guards).average;
}

}  // namespace secmux
