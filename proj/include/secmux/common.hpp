#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>

namespace secmux {

// Shared tolerance constants. Probability vectors must renormalize within
// kSimplexTol; derived identities (marginalization, conservation) are checked
// against kDerivedTol; region-membership slacks may dip to -kSlackTol.
inline constexpr double kSimplexTol = 1e-12;
inline constexpr double kDerivedTol = 1e-10;
inline constexpr double kSlackTol = 1e-9;

/// Thrown when an exact computation would exceed its enumeration budget.
class guard_error : public std::runtime_error {
 public:
  explicit guard_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown by matrix inversion when the map is not bijective.
class singular_matrix_error : public std::domain_error {
 public:
  singular_matrix_error() : std::domain_error("matrix is singular over F_q") {}
};

// Enumeration budgets for the exact (brute-force) code paths. The CLI can
// scale them via the SECMUX_GUARD_OVERRIDE environment variable.
struct Guards {
  std::uint64_t gl_candidates = std::uint64_t{1} << 24;    // q^(k*k) cap for GL enumeration
  std::uint64_t permutation_domain = 8;                    // |B| cap for |B|! enumeration
  std::uint64_t pair_scan_domain = 512;                    // |B| cap for exhaustive pair scans
  std::uint64_t product_entries = std::uint64_t{1} << 20;  // entries of an n-fold channel matrix
  std::uint64_t joint_entries = std::uint64_t{1} << 26;    // entries of an exact leakage joint
  std::uint64_t scan_points = 10'000'000;                  // region-scan grid budget

  Guards scaled(double factor) const {
    auto scale = [factor](std::uint64_t v) {
      const double s = static_cast<double>(v) * factor;
      if (s >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
        return std::numeric_limits<std::uint64_t>::max();
      }
      return static_cast<std::uint64_t>(s);
    };
    Guards g;
    g.gl_candidates = scale(gl_candidates);
    g.permutation_domain = scale(permutation_domain);
    g.pair_scan_domain = scale(pair_scan_domain);
    g.product_entries = scale(product_entries);
    g.joint_entries = scale(joint_entries);
    g.scan_points = scale(scan_points);
    return g;
  }
};

[[noreturn]] inline void throw_guard(const std::string& name, std::uint64_t need,
                                     std::uint64_t cap) {
  throw guard_error("guard '" + name + "' exceeded: need " + std::to_string(need) +
                    ", cap " + std::to_string(cap));
}

/// a * b in uint64, saturating at the maximum on overflow.
inline std::uint64_t mul_sat_u64(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    return std::numeric_limits<std::uint64_t>::max();
  }
  return a * b;
}

/// base^exp in uint64, saturating at the maximum on overflow.
inline std::uint64_t pow_u64(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r *= base;
  }
  return r;
}

// Deterministic RNG facade. std::mt19937_64 has a standardized output stream,
// and the derived draws below avoid the implementation-defined
// std::*_distribution wrappers, so seeded runs reproduce byte-identically
// across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % n;
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 eng_;
};

inline double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace secmux
