#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "secmux/common.hpp"

namespace secmux {

inline bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline void require_prime(std::uint32_t q) {
  if (!is_prime(q)) {
    throw std::invalid_argument("field modulus must be prime, got " + std::to_string(q));
  }
}

/// Residue in [0, q) carrying its prime modulus.
struct FieldElement {
  std::uint32_t value = 0;
  std::uint32_t modulus = 2;

  FieldElement() = default;
  FieldElement(std::uint32_t v, std::uint32_t q) : value(v), modulus(q) {
    require_prime(q);
    if (v >= q) throw std::invalid_argument("field element out of range");
  }

  friend bool operator==(const FieldElement&, const FieldElement&) = default;
};

inline void require_same_modulus(const FieldElement& a, const FieldElement& b) {
  if (a.modulus != b.modulus) throw std::invalid_argument("field modulus mismatch");
}

inline FieldElement operator+(const FieldElement& a, const FieldElement& b) {
  require_same_modulus(a, b);
  return {(a.value + b.value) % a.modulus, a.modulus};
}

inline FieldElement operator*(const FieldElement& a, const FieldElement& b) {
  require_same_modulus(a, b);
  const std::uint64_t p = static_cast<std::uint64_t>(a.value) * b.value;
  return {static_cast<std::uint32_t>(p % a.modulus), a.modulus};
}

inline FieldElement neg(const FieldElement& a) {
  return {a.value == 0 ? 0u : a.modulus - a.value, a.modulus};
}

inline FieldElement operator-(const FieldElement& a, const FieldElement& b) {
  require_same_modulus(a, b);
  return a + neg(b);
}

/// Multiplicative inverse of a mod q by the extended Euclid algorithm.
inline std::uint32_t inv_mod(std::uint32_t a, std::uint32_t q) {
  std::int64_t t = 0, new_t = 1;
  std::int64_t r = q, new_r = a % q;
  while (new_r != 0) {
    const std::int64_t quot = r / new_r;
    t = std::exchange(new_t, t - quot * new_t);
    r = std::exchange(new_r, r - quot * new_r);
  }
  if (r != 1) throw std::domain_error("inv_mod: element not invertible");
  if (t < 0) t += q;
  return static_cast<std::uint32_t>(t);
}

inline FieldElement inv(const FieldElement& a) {
  if (a.value == 0) throw std::domain_error("inverse of zero in F_q");
  return {inv_mod(a.value, a.modulus), a.modulus};
}

/// Coordinate vector over F_q.
struct GfVector {
  std::uint32_t q = 2;
  std::vector<std::uint32_t> v;

  GfVector() = default;
  GfVector(std::uint32_t modulus, std::vector<std::uint32_t> coords)
      : q(modulus), v(std::move(coords)) {
    require_prime(q);
    for (std::uint32_t c : v) {
      if (c >= q) throw std::invalid_argument("vector coordinate out of range");
    }
  }

  std::size_t size() const { return v.size(); }
  bool is_zero() const {
    for (std::uint32_t c : v) {
      if (c != 0) return false;
    }
    return true;
  }

  friend bool operator==(const GfVector&, const GfVector&) = default;
};

/// Dense matrix over a prime field, stored row-major as raw residues.
class GfMatrix {
 public:
  GfMatrix(std::size_t rows, std::size_t cols, std::uint32_t q)
      : rows_(rows), cols_(cols), q_(q), e_(rows * cols, 0) {
    require_prime(q);
    if (rows == 0 || cols == 0) throw std::invalid_argument("empty matrix");
  }

  static GfMatrix identity(std::size_t k, std::uint32_t q) {
    GfMatrix m(k, k, q);
    for (std::size_t i = 0; i < k; ++i) m.set(i, i, 1);
    return m;
  }

  static GfMatrix from_rows(std::uint32_t q,
                            const std::vector<std::vector<std::uint32_t>>& rows) {
    if (rows.empty()) throw std::invalid_argument("empty matrix");
    GfMatrix m(rows.size(), rows[0].size(), q);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != m.cols_) throw std::invalid_argument("ragged matrix rows");
      for (std::size_t c = 0; c < m.cols_; ++c) m.set(r, c, rows[r][c]);
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::uint32_t modulus() const { return q_; }
  std::span<const std::uint32_t> entries() const { return e_; }

  std::uint32_t at(std::size_t r, std::size_t c) const { return e_[r * cols_ + c]; }
  void set(std::size_t r, std::size_t c, std::uint32_t v) {
    if (v >= q_) throw std::invalid_argument("matrix entry out of range");
    e_[r * cols_ + c] = v;
  }
  FieldElement element(std::size_t r, std::size_t c) const { return {at(r, c), q_}; }

  friend GfMatrix operator*(const GfMatrix& a, const GfMatrix& b) {
    if (a.q_ != b.q_) throw std::invalid_argument("field modulus mismatch");
    if (a.cols_ != b.rows_) throw std::invalid_argument("matrix dimension mismatch");
    GfMatrix out(a.rows_, b.cols_, a.q_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const std::uint64_t aik = a.at(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          out.e_[i * out.cols_ + j] = static_cast<std::uint32_t>(
              (out.e_[i * out.cols_ + j] + aik * b.at(k, j)) % a.q_);
        }
      }
    }
    return out;
  }

  GfVector apply(const GfVector& x) const {
    if (x.q != q_) throw std::invalid_argument("field modulus mismatch");
    if (x.size() != cols_) throw std::invalid_argument("matrix/vector dimension mismatch");
    std::vector<std::uint32_t> out(rows_, 0);
    for (std::size_t i = 0; i < rows_; ++i) {
      std::uint64_t acc = 0;
      for (std::size_t j = 0; j < cols_; ++j) {
        acc += static_cast<std::uint64_t>(at(i, j)) * x.v[j];
      }
      out[i] = static_cast<std::uint32_t>(acc % q_);
    }
    return GfVector(q_, std::move(out));
  }

  /// Determinant by Gaussian elimination over F_q; exact, O(k^3).
  std::uint32_t det() const {
    if (rows_ != cols_) throw std::invalid_argument("determinant of non-square matrix");
    std::vector<std::uint32_t> a = e_;
    const std::size_t k = rows_;
    std::uint64_t d = 1;
    for (std::size_t col = 0; col < k; ++col) {
      std::size_t pivot = col;
      while (pivot < k && a[pivot * k + col] == 0) ++pivot;
      if (pivot == k) return 0;
      if (pivot != col) {
        for (std::size_t j = 0; j < k; ++j) std::swap(a[pivot * k + j], a[col * k + j]);
        d = d * (q_ - 1) % q_;  // row swap flips the sign
      }
      const std::uint32_t p = a[col * k + col];
      d = d * p % q_;
      const std::uint32_t pinv = inv_mod(p, q_);
      for (std::size_t r = col + 1; r < k; ++r) {
        const std::uint64_t factor = static_cast<std::uint64_t>(a[r * k + col]) * pinv % q_;
        if (factor == 0) continue;
        for (std::size_t j = col; j < k; ++j) {
          const std::uint64_t sub = factor * a[col * k + j] % q_;
          a[r * k + j] = static_cast<std::uint32_t>((a[r * k + j] + q_ - sub) % q_);
        }
      }
    }
    return static_cast<std::uint32_t>(d);
  }

  bool invertible() const { return rows_ == cols_ && det() != 0; }

  /// Gauss-Jordan inverse; throws singular_matrix_error on a non-bijective map.
  GfMatrix inverse() const {
    if (rows_ != cols_) throw std::invalid_argument("inverse of non-square matrix");
    const std::size_t k = rows_;
    std::vector<std::uint32_t> a = e_;
    GfMatrix out = identity(k, q_);
    for (std::size_t col = 0; col < k; ++col) {
      std::size_t pivot = col;
      while (pivot < k && a[pivot * k + col] == 0) ++pivot;
      if (pivot == k) throw singular_matrix_error();
      if (pivot != col) {
        for (std::size_t j = 0; j < k; ++j) {
          std::swap(a[pivot * k + j], a[col * k + j]);
          std::swap(out.e_[pivot * k + j], out.e_[col * k + j]);
        }
      }
      const std::uint32_t pinv = inv_mod(a[col * k + col], q_);
      for (std::size_t j = 0; j < k; ++j) {
        a[col * k + j] = static_cast<std::uint32_t>(
            static_cast<std::uint64_t>(a[col * k + j]) * pinv % q_);
        out.e_[col * k + j] = static_cast<std::uint32_t>(
            static_cast<std::uint64_t>(out.e_[col * k + j]) * pinv % q_);
      }
      for (std::size_t r = 0; r < k; ++r) {
        if (r == col) continue;
        const std::uint64_t factor = a[r * k + col];
        if (factor == 0) continue;
        for (std::size_t j = 0; j < k; ++j) {
          const std::uint64_t s1 = factor * a[col * k + j] % q_;
          a[r * k + j] = static_cast<std::uint32_t>((a[r * k + j] + q_ - s1) % q_);
          const std::uint64_t s2 = factor * out.e_[col * k + j] % q_;
          out.e_[r * k + j] = static_cast<std::uint32_t>((out.e_[r * k + j] + q_ - s2) % q_);
        }
      }
    }
    return out;
  }

  friend bool operator==(const GfMatrix&, const GfMatrix&) = default;

 private:
  std::size_t rows_, cols_;
  std::uint32_t q_;
  std::vector<std::uint32_t> e_;
};

/// |GL(k, q)| = prod_{i=0}^{k-1} (q^k - q^i), saturating in uint64.
inline std::uint64_t gl_order(std::uint32_t k, std::uint32_t q) {
  const std::uint64_t qk = pow_u64(q, k);
  std::uint64_t order = 1;
  std::uint64_t qi = 1;
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint64_t factor = qk - qi;
    if (factor != 0 && order > std::numeric_limits<std::uint64_t>::max() / factor) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    order *= factor;
    qi *= q;
  }
  return order;
}

/// Uniform sample from GL(k, q) by rejection: draw a uniform matrix, retry
/// while singular. Expected retries are bounded (< 4 at q = 2).
inline GfMatrix sample_gl(std::uint32_t k, std::uint32_t q, Rng& rng) {
  require_prime(q);
  if (k == 0) throw std::invalid_argument("sample_gl: k must be >= 1");
  for (;;) {
    GfMatrix m(k, k, q);
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        m.set(r, c, static_cast<std::uint32_t>(rng.below(q)));
      }
    }
    if (m.det() != 0) return m;
  }
}

/// All of GL(k, q) by filtering the q^(k*k) candidate matrices.
inline std::vector<GfMatrix> enumerate_gl(std::uint32_t k, std::uint32_t q,
                                          const Guards& guards = {}) {
  require_prime(q);
  if (k == 0) throw std::invalid_argument("enumerate_gl: k must be >= 1");
  const std::uint64_t candidates = pow_u64(q, static_cast<std::uint64_t>(k) * k);
  if (candidates > guards.gl_candidates) {
    throw_guard("gl_candidates", candidates, guards.gl_candidates);
  }
  std::vector<GfMatrix> out;
  out.reserve(static_cast<std::size_t>(gl_order(k, q)));
  GfMatrix m(k, k, q);
  std::vector<std::uint32_t> digits(static_cast<std::size_t>(k) * k, 0);
  for (std::uint64_t idx = 0;; ++idx) {
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        m.set(r, c, digits[r * k + c]);
      }
    }
    if (m.det() != 0) out.push_back(m);
    // odometer increment
    std::size_t pos = digits.size();
    while (pos > 0) {
      --pos;
      if (++digits[pos] < q) break;
      digits[pos] = 0;
      if (pos == 0) return out;
    }
    if (idx + 1 == candidates) return out;
  }
}

}  // namespace secmux
