#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <thread>
#include <unordered_set>
#include <vector>

#include "secmux/layout.hpp"
#include "secmux/rational.hpp"

namespace secmux {

enum class FamilyKind { all_permutations, bijective_linear };

/// A bijection on B represented as an index table: f[b] = image of b.
using Bijection = std::vector<std::uint32_t>;

inline bool is_bijection_table(const Bijection& f) {
  std::vector<bool> seen(f.size(), false);
  for (std::uint32_t y : f) {
    if (y >= f.size() || seen[y]) return false;
    seen[y] = true;
  }
  return true;
}

inline Bijection invert_bijection(const Bijection& f) {
  Bijection inv(f.size(), 0);
  for (std::uint32_t b = 0; b < f.size(); ++b) inv[f[b]] = b;
  return inv;
}

inline Bijection bijection_from_matrix(const MessageLayout& layout, const GfMatrix& m) {
  if (m.modulus() != layout.modulus() || m.rows() != layout.total_dim() ||
      m.cols() != layout.total_dim()) {
    throw std::invalid_argument("matrix does not act on the layout space");
  }
  const std::uint64_t space = layout.space_size();
  Bijection table(static_cast<std::size_t>(space), 0);
  for (std::uint64_t b = 0; b < space; ++b) {
    const GfVector image = m.apply(layout.vector_of(b));
    table[static_cast<std::size_t>(b)] =
        static_cast<std::uint32_t>(layout.index_of(image.v));
  }
  return table;
}

// A family of bijections on B whose subset projections are meant to act as
// hash functions. Two built-in constructions: the set of all permutations of
// B, and bijective linear maps (the full GL(K, q) or an explicit member list,
// e.g. a subgroup).
class HashFamily {
 public:
  static HashFamily all_permutations(MessageLayout layout) {
    return HashFamily(FamilyKind::all_permutations, std::move(layout), std::nullopt);
  }

  static HashFamily full_linear(MessageLayout layout) {
    if (layout.total_dim() == 0) {
      throw std::invalid_argument("linear family needs a positive total dimension");
    }
    return HashFamily(FamilyKind::bijective_linear, std::move(layout), std::nullopt);
  }

  /// Explicit member list (e.g. a subgroup of GL). Members are verified
  /// invertible at construction.
  static HashFamily linear_members(MessageLayout layout, std::vector<GfMatrix> members) {
    if (members.empty()) throw std::invalid_argument("family needs at least one member");
    for (const auto& m : members) {
      if (m.modulus() != layout.modulus() || m.rows() != layout.total_dim() ||
          m.cols() != layout.total_dim()) {
        throw std::invalid_argument("member does not act on the layout space");
      }
      if (m.det() == 0) throw std::invalid_argument("family member is not bijective");
    }
    return HashFamily(FamilyKind::bijective_linear, std::move(layout), std::move(members));
  }

  FamilyKind kind() const { return kind_; }
  const MessageLayout& layout() const { return layout_; }
  bool has_explicit_members() const { return members_.has_value(); }
  const std::vector<GfMatrix>& explicit_members() const { return *members_; }

  std::uint64_t member_count(const Guards& guards = {}) const {
    if (members_) return members_->size();
    if (kind_ == FamilyKind::all_permutations) {
      const std::uint64_t space = layout_.space_size();
      if (space > guards.permutation_domain) {
        throw_guard("permutation_domain", space, guards.permutation_domain);
      }
      std::uint64_t f = 1;
      for (std::uint64_t i = 2; i <= space; ++i) f *= i;
      return f;
    }
    return gl_order(layout_.total_dim(), layout_.modulus());
  }

  /// Materializes every member as an index table. Guarded: |B|! for the
  /// permutation family, q^(K*K) candidates for the full linear family.
  std::vector<Bijection> enumerate_members(const Guards& guards = {}) const {
    const std::uint64_t space = layout_.space_size();
    std::vector<Bijection> out;
    if (kind_ == FamilyKind::all_permutations) {
      if (space > guards.permutation_domain) {
        throw_guard("permutation_domain", space, guards.permutation_domain);
      }
      Bijection perm(static_cast<std::size_t>(space));
      std::iota(perm.begin(), perm.end(), 0u);
      out.reserve(static_cast<std::size_t>(member_count(guards)));
      do {
        out.push_back(perm);
      } while (std::next_permutation(perm.begin(), perm.end()));
      return out;
    }
    const auto matrices = members_
                              ? *members_
                              : enumerate_gl(layout_.total_dim(), layout_.modulus(), guards);
    out.reserve(matrices.size());
    for (const auto& m : matrices) out.push_back(bijection_from_matrix(layout_, m));
    return out;
  }

  /// Matrix view of the members (linear kinds only).
  std::vector<GfMatrix> member_matrices(const Guards& guards = {}) const {
    if (kind_ != FamilyKind::bijective_linear) {
      throw std::invalid_argument("matrix members exist only for linear families");
    }
    return members_ ? *members_
                    : enumerate_gl(layout_.total_dim(), layout_.modulus(), guards);
  }

  Bijection sample_member(Rng& rng) const {
    if (kind_ == FamilyKind::all_permutations) {
      const std::uint64_t space = layout_.space_size();
      Bijection perm(static_cast<std::size_t>(space));
      std::iota(perm.begin(), perm.end(), 0u);
      for (std::size_t i = perm.size(); i > 1; --i) {  // Fisher-Yates
        std::swap(perm[i - 1], perm[static_cast<std::size_t>(rng.below(i))]);
      }
      return perm;
    }
    if (members_) {
      return bijection_from_matrix(layout_,
                                   (*members_)[static_cast<std::size_t>(rng.below(members_->size()))]);
    }
    return bijection_from_matrix(layout_,
                                 sample_gl(layout_.total_dim(), layout_.modulus(), rng));
  }

 private:
  HashFamily(FamilyKind kind, MessageLayout layout, std::optional<std::vector<GfMatrix>> members)
      : kind_(kind), layout_(std::move(layout)), members_(std::move(members)) {}

  FamilyKind kind_;
  MessageLayout layout_;
  std::optional<std::vector<GfMatrix>> members_;
};

/// Exact fraction of members f with proj(f(x1)) = proj(f(x2)).
inline Rational collision_probability(const HashFamily& family, const Subset& subset,
                                      std::uint64_t x1, std::uint64_t x2,
                                      const Guards& guards = {}) {
  validate_subset(family.layout(), subset, true);
  const std::uint64_t space = family.layout().space_size();
  if (x1 >= space || x2 >= space) throw std::invalid_argument("point outside B");
  if (x1 == x2) throw std::invalid_argument("collision probability needs x1 != x2");
  const auto proj = projection_table(family.layout(), subset);
  const auto members = family.enumerate_members(guards);
  std::int64_t hits = 0;
  for (const auto& f : members) {
    if (proj[f[static_cast<std::size_t>(x1)]] == proj[f[static_cast<std::size_t>(x2)]]) ++hits;
  }
  return Rational(hits, static_cast<std::int64_t>(members.size()));
}

inline Rational collision_probability(const HashFamily& family, const Subset& subset,
                                      const GfVector& x1, const GfVector& x2,
                                      const Guards& guards = {}) {
  const auto& layout = family.layout();
  return collision_probability(family, subset, layout.index_of(x1.v),
                               layout.index_of(x2.v), guards);
}

struct TwoUniversalReport {
  Rational max_ratio;
  Rational bound;
  bool pass = false;
  std::uint64_t worst_x1 = 0, worst_x2 = 0;
  std::uint64_t member_count = 0;
};

/// Exhaustive two-universality check: max over all x1 != x2 of the exact
/// collision probability of proj o f, compared against 1/prod_{i in I}|S_i|.
inline TwoUniversalReport verify_two_universal(const HashFamily& family, const Subset& subset,
                                               const Guards& guards = {},
                                               unsigned threads = 1) {
  validate_subset(family.layout(), subset, true);
  const std::uint64_t space = family.layout().space_size();
  if (space > guards.pair_scan_domain) {
    throw_guard("pair_scan_domain", space, guards.pair_scan_domain);
  }
  const auto proj = projection_table(family.layout(), subset);
  const auto members = family.enumerate_members(guards);

  struct Best {
    std::int64_t hits = -1;
    std::uint64_t x1 = 0, x2 = 0;
  };
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t a = 0; a < space; ++a) {
    for (std::uint32_t b = a + 1; b < space; ++b) pairs.emplace_back(a, b);
  }
  if (pairs.empty()) {
    TwoUniversalReport report;
    report.member_count = members.size();
    report.max_ratio = Rational(0, 1);
    report.bound = Rational(1, static_cast<std::int64_t>(projected_size(family.layout(), subset)));
    report.pass = true;
    return report;
  }

  auto scan = [&](std::size_t begin, std::size_t end) {
    Best best;
    for (std::size_t p = begin; p < end; ++p) {
      const auto [a, b] = pairs[p];
      std::int64_t hits = 0;
      for (const auto& f : members) {
        if (proj[f[a]] == proj[f[b]]) ++hits;
      }
      if (hits > best.hits) best = {hits, a, b};
    }
    return best;
  };

  Best best;
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, std::thread::hardware_concurrency()));
  if (workers <= 1 || pairs.size() < 64) {
    best = scan(0, pairs.size());
  } else {
    std::vector<Best> partial(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (pairs.size() + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(pairs.size(), w * chunk);
      const std::size_t end = std::min(pairs.size(), begin + chunk);
      pool.emplace_back([&, w, begin, end] { partial[w] = scan(begin, end); });
    }
    for (auto& t : pool) t.join();
    // deterministic merge: higher hit count wins, earlier pair breaks ties
    for (const auto& b : partial) {
      if (b.hits > best.hits) best = b;
    }
  }

  TwoUniversalReport report;
  report.member_count = members.size();
  report.max_ratio = Rational(best.hits, static_cast<std::int64_t>(members.size()));
  report.bound = Rational(1, static_cast<std::int64_t>(projected_size(family.layout(), subset)));
  report.pass = report.max_ratio <= report.bound;
  report.worst_x1 = best.x1;
  report.worst_x2 = best.x2;
  return report;
}

struct OrbitReport {
  Rational ratio;
  Rational bound;
  bool pass = false;
  std::uint64_t orbit_size = 0;
  std::uint64_t hit_count = 0;  // orbit points whose subset coordinates all vanish
};

/// Orbit test for linear families: the fraction of the orbit of v lying in
/// {0} x prod_{i not in I} S_i, compared against 1/prod_{i in I}|S_i|. The
/// orbit is closed under repeated application of the member maps, so the
/// members may form a generating set of the intended subgroup.
inline OrbitReport orbit_criterion(const HashFamily& family, const Subset& subset,
                                   const GfVector& v, const Guards& guards = {}) {
  if (family.kind() != FamilyKind::bijective_linear) {
    throw std::invalid_argument("orbit criterion applies to linear families only");
  }
  validate_subset(family.layout(), subset, true);
  const auto& layout = family.layout();
  if (v.q != layout.modulus() || v.size() != layout.total_dim()) {
    throw std::invalid_argument("vector does not match layout");
  }
  if (v.is_zero()) throw std::invalid_argument("orbit criterion needs a nonzero vector");

  const auto members = family.enumerate_members(guards);
  const auto proj = projection_table(layout, subset);
  const std::uint64_t start = layout.index_of(v.v);

  std::unordered_set<std::uint32_t> orbit{static_cast<std::uint32_t>(start)};
  std::vector<std::uint32_t> frontier{static_cast<std::uint32_t>(start)};
  while (!frontier.empty()) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t x : frontier) {
      for (const auto& f : members) {
        const std::uint32_t y = f[x];
        if (orbit.insert(y).second) next.push_back(y);
      }
    }
    frontier = std::move(next);
  }

  std::uint64_t hits = 0;
  for (std::uint32_t x : orbit) {
    if (proj[x] == 0) ++hits;
  }

  OrbitReport report;
  report.orbit_size = orbit.size();
  report.hit_count = hits;
  report.ratio = Rational(static_cast<std::int64_t>(hits),
                          static_cast<std::int64_t>(orbit.size()));
  report.bound = Rational(1, static_cast<std::int64_t>(projected_size(layout, subset)));
  report.pass = report.ratio <= report.bound;
  return report;
}

}  // namespace secmux
