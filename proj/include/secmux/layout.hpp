#pragma once

#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "secmux/gf.hpp"

namespace secmux {

// Factorization B = S_1 x ... x S_{T+1} with S_i = F_q^{k_i}. Factors 1..T
// carry the secret messages; the last factor is the encoder-randomness slot
// and is the only one allowed to have dimension zero.
class MessageLayout {
 public:
  MessageLayout(std::uint32_t q, std::vector<std::uint32_t> dims)
      : q_(q), dims_(std::move(dims)) {
    require_prime(q_);
    if (dims_.empty()) throw std::invalid_argument("layout needs at least one factor");
    for (std::size_t i = 0; i + 1 < dims_.size(); ++i) {
      if (dims_[i] == 0) {
        throw std::invalid_argument("only the randomness factor may have dimension zero");
      }
    }
    offsets_.resize(dims_.size() + 1, 0);
    for (std::size_t i = 0; i < dims_.size(); ++i) offsets_[i + 1] = offsets_[i] + dims_[i];
  }

  std::uint32_t modulus() const { return q_; }
  std::size_t num_factors() const { return dims_.size(); }   // T + 1
  std::size_t num_secrets() const { return dims_.size() - 1; }  // T
  std::uint32_t total_dim() const { return offsets_.back(); }   // K
  std::uint32_t dim(std::size_t i) const { return dims_.at(i - 1); }          // 1-based
  std::uint32_t offset(std::size_t i) const { return offsets_.at(i - 1); }    // 1-based
  const std::vector<std::uint32_t>& dims() const { return dims_; }

  std::uint64_t factor_size(std::size_t i) const { return pow_u64(q_, dim(i)); }
  std::uint64_t space_size() const { return pow_u64(q_, total_dim()); }

  /// Lexicographic index of a digit string (first coordinate most significant).
  std::uint64_t index_of(std::span<const std::uint32_t> digits) const {
    if (digits.size() != total_dim()) {
      throw std::invalid_argument("digit string length mismatch");
    }
    std::uint64_t idx = 0;
    for (std::uint32_t d : digits) {
      if (d >= q_) throw std::invalid_argument("digit out of range");
      idx = idx * q_ + d;
    }
    return idx;
  }

  std::vector<std::uint32_t> digits_of(std::uint64_t index) const {
    if (index >= space_size()) throw std::invalid_argument("index out of range");
    std::vector<std::uint32_t> d(total_dim(), 0);
    for (std::size_t j = d.size(); j-- > 0;) {
      d[j] = static_cast<std::uint32_t>(index % q_);
      index /= q_;
    }
    return d;
  }

  GfVector vector_of(std::uint64_t index) const { return GfVector(q_, digits_of(index)); }

  friend bool operator==(const MessageLayout&, const MessageLayout&) = default;

 private:
  std::uint32_t q_;
  std::vector<std::uint32_t> dims_;
  std::vector<std::uint32_t> offsets_;
};

/// Nonempty set of factor indices (ascending, unique, 1-based).
using Subset = std::vector<int>;

inline void validate_subset(const MessageLayout& layout, const Subset& subset,
                            bool allow_randomness_factor) {
  if (subset.empty()) throw std::invalid_argument("subset must be nonempty");
  const int limit = static_cast<int>(allow_randomness_factor ? layout.num_factors()
                                                             : layout.num_secrets());
  int prev = 0;
  for (int i : subset) {
    if (i <= prev) throw std::invalid_argument("subset indices must be ascending and unique");
    if (i < 1 || i > limit) {
      throw std::invalid_argument("subset index " + std::to_string(i) + " out of range");
    }
    prev = i;
  }
}

/// All nonempty subsets of {1, ..., t}, ordered by bitmask value.
inline std::vector<Subset> all_nonempty_subsets(std::size_t t) {
  std::vector<Subset> out;
  const std::uint64_t limit = std::uint64_t{1} << t;
  for (std::uint64_t mask = 1; mask < limit; ++mask) {
    Subset s;
    for (std::size_t j = 0; j < t; ++j) {
      if (mask & (std::uint64_t{1} << j)) s.push_back(static_cast<int>(j) + 1);
    }
    out.push_back(std::move(s));
  }
  return out;
}

inline std::string subset_label(const Subset& subset) {
  std::ostringstream os;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (i) os << ',';
    os << subset[i];
  }
  return os.str();
}

inline Subset parse_subset_label(const std::string& label) {
  Subset s;
  std::istringstream is(label);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    if (tok.empty()) throw std::invalid_argument("bad subset label: " + label);
    s.push_back(std::stoi(tok));
  }
  if (s.empty()) throw std::invalid_argument("bad subset label: " + label);
  return s;
}

inline std::uint64_t projected_size(const MessageLayout& layout, const Subset& subset) {
  std::uint64_t size = 1;
  for (int i : subset) size *= layout.factor_size(static_cast<std::size_t>(i));
  return size;
}

/// Coordinates of b belonging to the factors in `subset`, ascending factor order.
inline GfVector project(const MessageLayout& layout, const Subset& subset,
                        const GfVector& b) {
  validate_subset(layout, subset, true);
  if (b.q != layout.modulus() || b.size() != layout.total_dim()) {
    throw std::invalid_argument("vector does not match layout");
  }
  std::vector<std::uint32_t> out;
  for (int i : subset) {
    const auto off = layout.offset(static_cast<std::size_t>(i));
    const auto k = layout.dim(static_cast<std::size_t>(i));
    for (std::uint32_t j = 0; j < k; ++j) out.push_back(b.v[off + j]);
  }
  return GfVector(layout.modulus(), std::move(out));
}

/// Table mapping every b-index to its projected index (lexicographic on the
/// concatenated subset coordinates).
inline std::vector<std::uint32_t> projection_table(const MessageLayout& layout,
                                                   const Subset& subset) {
  validate_subset(layout, subset, true);
  const std::uint64_t space = layout.space_size();
  const std::uint32_t q = layout.modulus();
  std::vector<std::uint32_t> table(static_cast<std::size_t>(space), 0);
  for (std::uint64_t b = 0; b < space; ++b) {
    const auto digits = layout.digits_of(b);
    std::uint64_t proj = 0;
    for (int i : subset) {
      const auto off = layout.offset(static_cast<std::size_t>(i));
      const auto k = layout.dim(static_cast<std::size_t>(i));
      for (std::uint32_t j = 0; j < k; ++j) proj = proj * q + digits[off + j];
    }
    table[static_cast<std::size_t>(b)] = static_cast<std::uint32_t>(proj);
  }
  return table;
}

}  // namespace secmux
