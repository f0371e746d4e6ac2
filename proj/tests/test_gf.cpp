#include <catch2/catch.hpp>

#include "secmux/gf.hpp"
#include "test_util.hpp"

using namespace secmux;

TEST_CASE("field element arithmetic on small primes", "[gf]") {
  CHECK((FieldElement(1, 2) + FieldElement(1, 2)).value == 0);
  CHECK(inv(FieldElement(2, 5)).value == 3);
  CHECK((FieldElement(2, 3) * FieldElement(2, 3)).value == 1);
  CHECK(neg(FieldElement(0, 7)).value == 0);
  CHECK(neg(FieldElement(3, 7)).value == 4);
}

TEST_CASE("field element preconditions", "[gf]") {
  CHECK_THROWS_AS(FieldElement(2, 4), std::invalid_argument);  // 4 not prime
  CHECK_THROWS_AS(FieldElement(5, 5), std::invalid_argument);  // out of range
  CHECK_THROWS_AS(FieldElement(1, 2) + FieldElement(1, 3), std::invalid_argument);
  CHECK_THROWS_AS(inv(FieldElement(0, 5)), std::domain_error);
}

TEST_CASE("field axioms hold exhaustively for q in {2,3,5}", "[gf]") {
  for (std::uint32_t q : {2u, 3u, 5u}) {
    for (std::uint32_t a = 0; a < q; ++a) {
      for (std::uint32_t b = 0; b < q; ++b) {
        const FieldElement fa(a, q), fb(b, q);
        CHECK((fa + fb).value == (fb + fa).value);
        CHECK((fa * fb).value == (fb * fa).value);
        CHECK((fa + neg(fa)).value == 0);
        if (a != 0) CHECK((fa * inv(fa)).value == 1);
        for (std::uint32_t c = 0; c < q; ++c) {
          const FieldElement fc(c, q);
          CHECK(((fa + fb) + fc).value == (fa + (fb + fc)).value);
          CHECK(((fa * fb) * fc).value == (fa * (fb * fc)).value);
          CHECK((fa * (fb + fc)).value == (fa * fb + fa * fc).value);
        }
      }
    }
  }
}

TEST_CASE("matrix inverse on fixed cases", "[gf]") {
  const GfMatrix id3 = GfMatrix::identity(3, 2);
  CHECK(id3.inverse() == id3);

  // self-inverse shear in characteristic 2
  const GfMatrix shear = GfMatrix::from_rows(2, {{1, 1}, {0, 1}});
  CHECK(shear.inverse() == shear);

  const GfMatrix zero(2, 2, 3);
  CHECK_THROWS_AS(zero.inverse(), singular_matrix_error);
  const GfMatrix repeated = GfMatrix::from_rows(3, {{1, 2}, {1, 2}});
  CHECK_THROWS_AS(repeated.inverse(), singular_matrix_error);
}

TEST_CASE("sampled inverses roundtrip at k=4 over F_2", "[gf]") {
  Rng rng(7);
  const GfMatrix id = GfMatrix::identity(4, 2);
  for (int trial = 0; trial < 20; ++trial) {
    const GfMatrix m = sample_gl(4, 2, rng);
    const GfMatrix minv = m.inverse();
    CHECK(m * minv == id);
    CHECK(minv * m == id);
  }
}

TEST_CASE("determinant agrees with image-enumeration bijectivity", "[gf]") {
  // every 3x3 matrix over F_2, checked against the brute-force oracle
  for (std::uint32_t bits = 0; bits < 512; ++bits) {
    GfMatrix m(3, 3, 2);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t c = 0; c < 3; ++c) m.set(r, c, (bits >> (r * 3 + c)) & 1u);
    }
    CHECK((m.det() != 0) == testutil::oracle_is_bijection(m));
  }
}

TEST_CASE("GL enumeration matches the order formula", "[gf]") {
  const auto gl13 = enumerate_gl(1, 3);  // the nonzero scalars [1], [2]
  REQUIRE(gl13.size() == 2);
  CHECK(gl13[0].at(0, 0) == 1);
  CHECK(gl13[1].at(0, 0) == 2);
  CHECK(enumerate_gl(2, 2).size() == 6);
  CHECK(enumerate_gl(2, 3).size() == 48);
  CHECK(enumerate_gl(3, 2).size() == 168);
  CHECK(gl_order(2, 2) == 6);
  CHECK(gl_order(2, 3) == 48);
  CHECK(gl_order(3, 2) == 168);
  CHECK(gl_order(4, 2) == 20160);
}

TEST_CASE("GL enumeration is duplicate-free and invertible-only", "[gf]") {
  const auto gl = enumerate_gl(2, 3);
  for (std::size_t i = 0; i < gl.size(); ++i) {
    CHECK(gl[i].det() != 0);
    CHECK(testutil::oracle_is_bijection(gl[i]));
    for (std::size_t j = i + 1; j < gl.size(); ++j) CHECK(!(gl[i] == gl[j]));
  }
}

TEST_CASE("GL enumeration brute-force filter at k=2 q=2", "[gf]") {
  // oracle: filter all 16 candidate matrices by image bijectivity
  std::size_t count = 0;
  for (std::uint32_t bits = 0; bits < 16; ++bits) {
    GfMatrix m(2, 2, 2);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) m.set(r, c, (bits >> (r * 2 + c)) & 1u);
    }
    if (testutil::oracle_is_bijection(m)) ++count;
  }
  CHECK(count == 6);
  CHECK(enumerate_gl(2, 2).size() == count);
}

TEST_CASE("GL enumeration guard", "[gf]") {
  CHECK_THROWS_AS(enumerate_gl(5, 2), guard_error);  // 2^25 candidates > 2^24
  Guards tight;
  tight.gl_candidates = 50;
  CHECK_THROWS_AS(enumerate_gl(2, 3, tight), guard_error);  // 81 candidates > 50
  CHECK(enumerate_gl(2, 3).size() == 48);                   // fine under the default
  CHECK(Guards{}.scaled(4.0).gl_candidates == (std::uint64_t{1} << 26));
}

TEST_CASE("GL sampling postconditions", "[gf]") {
  Rng rng(11);
  const GfMatrix one = sample_gl(1, 2, rng);
  CHECK(one.at(0, 0) == 1);  // GL(1,2) = {1}
  for (int trial = 0; trial < 100; ++trial) {
    CHECK(sample_gl(3, 2, rng).det() != 0);
  }
  Rng a(42), b(42);
  CHECK(sample_gl(3, 3, a) == sample_gl(3, 3, b));
}

TEST_CASE("GL sampling is uniform over GL(2,2)", "[gf]") {
  const auto gl = enumerate_gl(2, 2);
  std::vector<int> counts(gl.size(), 0);
  Rng rng(20240808);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const GfMatrix m = sample_gl(2, 2, rng);
    for (std::size_t j = 0; j < gl.size(); ++j) {
      if (m == gl[j]) {
        ++counts[j];
        break;
      }
    }
  }
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(p * (1 - p) / draws);
  int total = 0;
  for (int c : counts) {
    total += c;
    CHECK(std::abs(c / static_cast<double>(draws) - p) < 5.0 * sigma);
  }
  CHECK(total == draws);
}
