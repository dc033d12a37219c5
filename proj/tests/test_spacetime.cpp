#include <doctest.h>

#include <random>

#include "knds/spacetime.hpp"

using namespace knds;

TEST_CASE("mu closed form") {
  BlackHoleParams p(0.1, 1.0, 1.0);
  CHECK(mu_checked(p, 1.0) == doctest::Approx(-1.0 / 30.0).epsilon(1e-15));
  BlackHoleParams s(1e-9, 1.0, 0.0);
  CHECK(std::abs(mu(s, 2.0)) < 4e-9 / 3.0 + 1e-16);
  CHECK_THROWS_AS(mu_checked(p, 0.0), DomainError);
  CHECK_THROWS_AS(BlackHoleParams(0.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(BlackHoleParams(0.1, -1.0, 0.0), DomainError);
  // analytic derivatives against jets
  auto j = mu(p, Jet<double>::variable(2, 2.3));
  CHECK(mu_prime(p, 2.3) == doctest::Approx(j.derivative(1)).epsilon(1e-14));
  CHECK(mu_second(p, 2.3) == doctest::Approx(j.derivative(2)).epsilon(1e-14));
}

TEST_CASE("magnetic charge enters through the effective charge") {
  BlackHoleParams a(0.05, 1.0, 0.6, 0.0), b(0.05, 1.0, 0.36, 0.48);
  CHECK(mu(a, 2.7) == doctest::Approx(mu(b, 2.7)).epsilon(1e-15));
  CHECK(horizons(a).r_minus == doctest::Approx(horizons(b).r_minus).epsilon(1e-14));
}

TEST_CASE("classification examples") {
  CHECK(classify_nondegenerate(0.05, 1.0, 0.0).nondegenerate);
  CHECK_FALSE(classify_nondegenerate(1.0 / 9.0, 1.0, 0.0).nondegenerate);
  CHECK(classify_nondegenerate(0.15, 1.0, 1.0).nondegenerate);
  CHECK_FALSE(classify_nondegenerate(0.01, 1.0, 1.2).nondegenerate);
  CHECK_FALSE(classify_nondegenerate(0.1875, 1.0, 1.0).nondegenerate);
  CHECK_THROWS_AS(classify_nondegenerate(-0.1, 1.0, 0.0), DomainError);
  auto b = lambda_bounds(1.0, 1.0);
  CHECK(b.upper == 0.1875);
  CHECK(b.lower == 0.0);
}

TEST_CASE("brute force verdict agrees on a coarse grid") {
  int bad = 0;
  for (int i = 0; i < 60; ++i)
    for (int j = 0; j < 60; ++j) {
      const double L = (i + 1) / 240.0, Q = 0.02 * j;
      if (classify_nondegenerate(L, 1.0, Q).nondegenerate != classify_bruteforce(L, 1.0, Q).nondegenerate) ++bad;
    }
  CHECK(bad == 0);
  CHECK_FALSE(classify_bruteforce(0.1875, 1.0, 1.0).nondegenerate);
}

TEST_CASE("horizons") {
  BlackHoleParams p(0.15, 1.0, 1.0);
  auto h = horizons(p);
  CHECK(h.r_crit_1 == 1.0);
  CHECK(h.r_crit_2 == 2.0);
  CHECK(std::abs(mu(p, h.r_plus)) < 1e-12 * (1 + std::abs(mu_prime(p, h.r_plus))));
  CHECK(std::abs(mu(p, h.r_minus)) < 1e-12 * (1 + std::abs(mu_prime(p, h.r_minus))));
  CHECK(h.kappa_minus == doctest::Approx(mu_prime(p, h.r_minus) / 2));
  CHECK(std::abs(mu_prime(p, h.r_mu_max)) < 1e-12);

  BlackHoleParams s(0.05, 1.0, 0.0);
  auto hs = horizons(s);
  // companion oracle: r^2 - 2r - (0.05/3) r^4 at the polished roots
  for (double r : {hs.r_minus, hs.r_plus}) CHECK(std::abs(r * r - 2 * r - 0.05 / 3 * r * r * r * r) < 1e-12 * r * r);
  auto z = quartic_roots(s);
  CHECK(std::abs(z[3].real() - hs.r_plus) < 1e-12 * hs.r_plus);
  CHECK_THROWS_AS(horizons(BlackHoleParams(1.0 / 9.0, 1.0, 0.0)), DegenerateError);

  // photon sphere criticality
  auto F = mu(p, Jet<double>::variable(1, h.r_photon())) / (Jet<double>::variable(1, h.r_photon()) * Jet<double>::variable(1, h.r_photon()));
  CHECK(std::abs(h.r_photon() * h.r_photon() * F[1]) < 1e-12);
}

TEST_CASE("random ordering and surface gravities") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 500; ++k) {
    const double Q = 1.06 * U(rng);
    auto b = lambda_bounds(1.0, Q);
    const double L = b.lower + (0.05 + 0.9 * U(rng)) * (b.upper - b.lower);
    auto h = horizons(BlackHoleParams(L, 1.0, Q));
    REQUIRE(h.r_inner < h.r_crit_1);
    REQUIRE(h.r_crit_1 < h.r_minus);
    REQUIRE(h.r_minus < h.r_crit_2);
    REQUIRE(h.r_crit_2 < h.r_plus);
    CHECK(h.kappa_minus > 0);
    CHECK(h.kappa_plus > 0);
  }
}

TEST_CASE("star gauge") {
  for (auto p : {BlackHoleParams(0.15, 1.0, 1.0), BlackHoleParams(0.05, 1.0, 0.0), BlackHoleParams(0.02, 1.0, 0.9)}) {
    StarGauge g(p);
    auto& h = g.horizon();
    CHECK(std::abs(g.nu(h.r_plus) + 1.0) < 1e-10);
    CHECK(std::abs(g.nu(h.r_minus) - 1.0) < 1e-10);
    CHECK(std::abs(g.nu(h.r_mu_max)) < 1e-14);
    CHECK(g.c_squared() == doctest::Approx(1.0 / mu(p, h.r_mu_max)));
    int changes = 0;
    double prev = g.nu(h.r_minus);
    for (int i = 1; i <= 100; ++i) {
      const double r = h.r_minus + (h.r_plus - h.r_minus) * i / 100.0;
      const double n = g.nu(r);
      CHECK(std::abs(g.c_squared() * mu(p, r) + n * n - 1.0) < 1e-12);
      if ((n < 0) != (prev < 0)) ++changes;
      prev = n;
      if (i < 100) CHECK(g.T_prime(r) == doctest::Approx(-n / mu(p, r)));
    }
    CHECK(changes == 1);
    // box t* at r_c reduces to nu'
    CHECK(box_tstar(g, h.r_mu_max) == doctest::Approx(g.nu_prime(h.r_mu_max)).epsilon(1e-13));
    CHECK_THROWS_AS(box_tstar(g, 0.5 * h.r_minus), DomainError);
    const double I = box_tstar_horizon_integral(p);
    const double ref = -4 * M_PI * (h.r_plus * h.r_plus + h.r_minus * h.r_minus);
    CHECK(std::abs(I - ref) < 1e-8 * std::abs(ref));
  }
}

TEST_CASE("trapped expansion") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double Q = 1.06 * U(rng);
    auto b = lambda_bounds(1.0, Q);
    BlackHoleParams p(b.lower + (0.05 + 0.9 * U(rng)) * (b.upper - b.lower), 1.0, Q);
    auto t = trapped_expansion(p);
    CHECK(t.matrix(0, 1) < 0);
    CHECK(t.matrix(1, 0) < 0);
    Eigen::EigenSolver<Eigen::Matrix2d> es(t.matrix);
    double lmax = std::max(es.eigenvalues()[0].real(), es.eigenvalues()[1].real());
    CHECK(std::abs(lmax - t.rate) < 1e-12 * std::max(1.0, t.rate));
  }
  CHECK(trapped_expansion_rate(BlackHoleParams(0.05, 1.0, 0.0)) > 0);
}

TEST_CASE("rotating horizons") {
  BlackHoleParams p0(0.05, 1.0, 0.3);
  auto h = horizons(p0);
  auto [m0, p0r] = knds_horizons(p0);
  CHECK(m0 == h.r_minus);
  CHECK(p0r == h.r_plus);
  BlackHoleParams p(0.05, 1.0, 0.3, 0.0, {0.0, 0.0, 0.01});
  auto [rm, rp] = knds_horizons(p);
  CHECK(std::abs(rm - h.r_minus) < 1e-3);
  CHECK(std::abs(rp - h.r_plus) < 1e-3);
  CHECK(std::abs(mu_tilde_knds(p, 0.01, rm)) < 1e-10);
  CHECK(std::abs(mu_tilde_knds(p, 0.01, rp)) < 1e-10);
  CHECK_THROWS_AS(knds_horizons(BlackHoleParams(0.05, 1.0, 0.3, 0.0, {0.0, 0.0, 3.0})), SpinTooLarge);
}
