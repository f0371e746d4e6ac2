#include <catch2/catch.hpp>

#include "secmux/info.hpp"
#include "secmux/regions.hpp"
#include "test_util.hpp"

using namespace secmux;

TEST_CASE("entropy and mutual information basics", "[info]") {
  CHECK(entropy(Distribution::uniform(4)) == Approx(std::log(4.0)));
  CHECK(entropy(Distribution::point(5, 2)) == 0.0);

  // independent pair
  const Joint indep = Joint::from_prior_and_channel(
      Distribution::uniform(3), Channel::constant(3, Distribution({0.2, 0.8})));
  CHECK(mutual_information(indep) == Approx(0.0).margin(1e-14));
}

TEST_CASE("BSC mutual information matches the direct joint oracle", "[info]") {
  const double p = 0.1;
  const Joint j = Joint::from_prior_and_channel(Distribution::uniform(2), Channel::bsc(p));
  const std::vector<double> oracle_joint = {0.5 * (1 - p), 0.5 * p, 0.5 * p, 0.5 * (1 - p)};
  const double oracle = testutil::oracle_mi(oracle_joint, 2, 2);
  CHECK(mutual_information(j) == Approx(oracle).margin(1e-14));
  CHECK(mutual_information(j) ==
        Approx(std::log(2.0) - testutil::oracle_binary_entropy(p)).margin(1e-12));
  CHECK(mutual_information(j) == Approx(0.368064).margin(1e-6));
}

TEST_CASE("conditional MI agrees between tensor paths", "[info]") {
  Rng rng(41);
  for (int trial = 0; trial < 25; ++trial) {
    const MarkovSpec spec(testutil::random_distribution(rng, 2),
                          testutil::random_channel(rng, 2, 3),
                          testutil::random_channel(rng, 3, 2));
    const Channel bob = testutil::random_channel(rng, 2, 2);
    const Channel eve = testutil::random_channel(rng, 2, 3);
    const Joint joint = joint_from_spec(spec, bob, eve);
    const InfoQuantities iq = markov_informations(spec, bob, eve);
    CHECK(iq.i_uy == Approx(mutual_information(joint, {0}, {3})).margin(1e-12));
    CHECK(iq.i_uz == Approx(mutual_information(joint, {0}, {4})).margin(1e-12));
    CHECK(iq.i_vy_u ==
          Approx(conditional_mutual_information(joint, {1}, {3}, {0})).margin(1e-12));
    CHECK(iq.i_vz_u ==
          Approx(conditional_mutual_information(joint, {1}, {4}, {0})).margin(1e-12));
  }
}

TEST_CASE("psi fixed points", "[info]") {
  // independent Z: the sum telescopes to 1
  const Channel indep = Channel::constant(2, Distribution({0.3, 0.7}));
  CHECK(psi(0.5, indep, Distribution::uniform(2)) == Approx(0.0).margin(1e-14));

  // noiseless identity, uniform binary L: psi = rho ln 2
  for (double rho : {0.3, 0.7, 1.0}) {
    CHECK(psi(rho, Channel::identity(2), Distribution::uniform(2)) ==
          Approx(rho * std::log(2.0)).margin(1e-13));
  }

  CHECK(psi(0.5, Channel::bsc(0.1), Distribution::uniform(2)) ==
        Approx(testutil::oracle_psi(0.5, Channel::bsc(0.1), Distribution::uniform(2)))
            .margin(1e-13));

  CHECK_THROWS_AS(psi(0.0, Channel::bsc(0.1), Distribution::uniform(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(psi(1.2, Channel::bsc(0.1), Distribution::uniform(2)),
                  std::invalid_argument);
  CHECK_NOTHROW(psi(1.0, Channel::bsc(0.1), Distribution::uniform(2)));
}

TEST_CASE("phi fixed points", "[info]") {
  const Channel indep = Channel::constant(2, Distribution({0.3, 0.7}));
  CHECK(phi(0.5, indep, Distribution::uniform(2)) == Approx(0.0).margin(1e-14));
  for (double rho : {0.3, 0.7}) {
    CHECK(phi(rho, Channel::identity(2), Distribution::uniform(2)) ==
          Approx(rho * std::log(2.0)).margin(1e-13));
  }
  CHECK(phi(0.5, Channel::bsc(0.1), Distribution::uniform(2)) ==
        Approx(testutil::oracle_phi(0.5, Channel::bsc(0.1), Distribution::uniform(2)))
            .margin(1e-13));
  CHECK_THROWS_AS(phi(0.0, Channel::bsc(0.1), Distribution::uniform(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(phi(1.2, Channel::bsc(0.1), Distribution::uniform(2)),
                  std::invalid_argument);
}

TEST_CASE("phi at rho=1 is the continuous limit", "[info]") {
  const Channel w = Channel::bsc(0.2);
  const Distribution pl = Distribution::uniform(2);
  CHECK(phi(1.0, w, pl) == Approx(std::log(1.6)).margin(1e-14));
  CHECK(phi(1.0 - 1e-7, w, pl) == Approx(phi(1.0, w, pl)).margin(1e-4));
}

TEST_CASE("psi <= phi on random instances", "[info]") {
  Rng rng(47);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t nl = 2 + rng.below(5);
    const std::size_t nz = 2 + rng.below(5);
    const Channel w = testutil::random_channel(rng, nl, nz);
    const Distribution pl = testutil::random_distribution(rng, nl);
    const double rho = 0.999 * rng.unit() + 0.0005;  // interior of (0, 1)
    CHECK(psi(rho, w, pl) <= phi(rho, w, pl) + 1e-10);
  }
}

TEST_CASE("exp(phi) is concave in the prior", "[info]") {
  Rng rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t nl = 2 + rng.below(4);
    const std::size_t nz = 2 + rng.below(4);
    const Channel w = testutil::random_channel(rng, nl, nz);
    const auto p1 = testutil::random_simplex(rng, nl);
    const auto p2 = testutil::random_simplex(rng, nl);
    const double lambda = rng.unit();
    const double rho = 0.98 * rng.unit() + 0.01;
    std::vector<double> mix(nl);
    for (std::size_t i = 0; i < nl; ++i) mix[i] = lambda * p1[i] + (1 - lambda) * p2[i];
    const double lhs = std::exp(phi(rho, w, Distribution(mix)));
    const double rhs = lambda * std::exp(phi(rho, w, Distribution(p1))) +
                       (1 - lambda) * std::exp(phi(rho, w, Distribution(p2)));
    CHECK(lhs >= rhs - 1e-10);
  }
}

TEST_CASE("psi/rho approaches I(L;Z) as rho -> 0", "[info]") {
  Rng rng(59);
  const double rho = 1e-3;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nl = 2 + rng.below(4);
    const std::size_t nz = 2 + rng.below(4);
    const Channel w = testutil::random_channel(rng, nl, nz);
    const Distribution pl = testutil::random_distribution(rng, nl);
    const double mi = mutual_information(Joint::from_prior_and_channel(pl, w));
    const double approx = psi(rho, w, pl) / rho;
    CHECK(std::abs(approx - mi) <= 0.02 * std::max(mi, 0.01));
  }
}

TEST_CASE("averaged phi rate approaches I(V;Z|U) as rho -> 0", "[info]") {
  Rng rng(61);
  const double rho = 1e-3;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t nu = 1 + rng.below(3);
    const std::size_t nv = 2 + rng.below(3);
    const std::size_t nz = 2 + rng.below(3);
    const Distribution pu = testutil::random_distribution(rng, nu);
    const Channel v_given_u = testutil::random_channel(rng, nu, nv);
    const Channel z_given_v = testutil::random_channel(rng, nv, nz);
    const Joint uvz = uvz_joint(pu, v_given_u, z_given_v);
    const double cmi = conditional_mutual_information(uvz, {1}, {2}, {0});
    const double approx = averaged_phi_rate(rho, pu, v_given_u, z_given_v);
    CHECK(std::abs(approx - cmi) <= 0.02 * std::max(cmi, 0.01));
  }
}

TEST_CASE("psi and phi are nondecreasing in rho (sampled sanity)", "[info]") {
  Rng rng(67);
  for (int trial = 0; trial < 30; ++trial) {
    const Channel w = testutil::random_channel(rng, 3, 3);
    const Distribution pl = testutil::random_distribution(rng, 3);
    double prev_psi = -1.0, prev_phi = -1.0;
    for (double rho : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const double cur_psi = psi(rho, w, pl);
      const double cur_phi = phi(rho, w, pl);
      CHECK(cur_psi >= prev_psi - 1e-12);
      CHECK(cur_phi >= prev_phi - 1e-12);
      prev_psi = cur_psi;
      prev_phi = cur_phi;
    }
  }
}

TEST_CASE("psi tensorizes over product channels", "[info]") {
  // log-domain stability check: psi of the n-fold channel with the product
  // prior equals n times the single-letter value
  const Channel w = Channel::bsc(0.1);
  const Distribution pl = Distribution::uniform(2);
  const unsigned n = 6;
  const Channel wn = product_extend(w, n);
  const Distribution pln = Distribution::uniform(1ull << n);
  for (double rho : {0.25, 1.0}) {
    CHECK(psi(rho, wn, pln) == Approx(n * psi(rho, w, pl)).margin(1e-10));
  }
}
