#include <doctest.h>

#include <cmath>

#include "knds/errors.hpp"
#include "knds/sampling.hpp"
#include "knds/subprincipal.hpp"

using namespace knds;

namespace {
TrappedSetParams random_trapped(ParamSampler& S) {
  return {S.uniform(0, 5), S.uniform(0, 5), S.uniform(0, 5), S.uniform(-5, 5), S.uniform(-5, 5), S.uniform(-5, 5), S.uniform(-3, 3)};
}
bool contains(const std::vector<cplx>& v, cplx z, double tol) {
  for (auto e : v)
    if (std::abs(e - z) < tol) return true;
  return false;
}
}  // namespace

TEST_CASE("zero parameters give a nilpotent trapped matrix") {
  auto c = eig_trapped({});
  for (auto p : c.predicted) CHECK(p == cplx(0.0));
  CHECK(c.max_deviation < 1e-12);
  // 14-fold zero: the matrix is nilpotent
  Eigen::MatrixXcd A = build_trapped_matrix({});
  Eigen::MatrixXcd P = A;
  for (int i = 0; i < 14; ++i) P = P * A;
  CHECK(P.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("trapped spectrum examples") {
  auto c = eig_trapped({1, 2, 3, 0.7, -1.3, 2.2, 0});
  for (double v : {2.0, 4.0, 3.0, 0.0}) CHECK(contains(c.eigenvalues, v, 1e-3));
  int fours = 0;
  for (auto p : c.predicted) fours += std::abs(p - 4.0) < 1e-14;
  CHECK(fours == 2);  // 4 g1' and 2 g2'
  auto d = eig_trapped({0, 0, 0, 0, 0, 0, 1});
  CHECK(contains(d.eigenvalues, cplx(0, 2 * std::sqrt(2.0)), 1e-6));
  CHECK(contains(d.eigenvalues, cplx(0, -2 * std::sqrt(2.0)), 1e-6));
  auto n = eig_trapped({-0.5, 1, 1, 0, 0, 0, 0.3});
  CHECK_FALSE(n.nonnegative);
  CHECK(n.min_real == doctest::Approx(-2.0).epsilon(1e-10));  // 4 g1'
}

TEST_CASE("random trapped matrices match the closed-form multiset") {
  ParamSampler S(31);
  for (int i = 0; i < 1000; ++i) {
    auto t = random_trapped(S);
    auto c = eig_trapped(t);
    CHECK(c.max_deviation < 1e-8);
    CHECK(c.nonnegative);
    // second-order terms do not move the spectrum
    auto u = t;
    u.gamma1pp = S.uniform(-5, 5);
    u.gamma2pp = S.uniform(-5, 5);
    u.gamma3pp = S.uniform(-5, 5);
    auto e = eig_trapped(u);
    CHECK(e.max_deviation < 1e-8);
    CHECK(e.predicted == c.predicted);
  }
}

TEST_CASE("trapped invariant subspaces") {
  ParamSampler S(32);
  for (int i = 0; i < 200; ++i) {
    auto t = random_trapped(S);
    auto A = build_trapped_matrix(t);
    CHECK(invariant_subspace_defect(A, trapped_subspace_v1()) == 0.0);
    CHECK(invariant_subspace_defect(A, trapped_subspace_v2()) == 0.0);
    // S_L on V2 is nilpotent
    Eigen::MatrixXcd V = trapped_subspace_v2().cast<cplx>();
    Eigen::MatrixXcd W = V;
    for (int k = 0; k < 4; ++k) W = A * W;
    CHECK(W.cwiseAbs().maxCoeff() == 0.0);
  }
  // a coordinate subspace that is not invariant
  Eigen::MatrixXd e1 = Eigen::MatrixXd::Zero(14, 1);
  e1(0, 0) = 1;
  CHECK(invariant_subspace_defect(build_trapped_matrix({1, 1, 1, 0, 0, 0, 1}), e1) > 0.5);
}

TEST_CASE("charge decoupling of the trapped matrix") {
  auto A = build_trapped_matrix({1.2, 0.4, 2.5, -0.3, 0.9, 1.1, 0.0});
  CHECK(A.block(0, 10, 10, 4).cwiseAbs().maxCoeff() == 0.0);
  CHECK(A.block(10, 0, 4, 10).cwiseAbs().maxCoeff() == 0.0);
  auto B = build_trapped_matrix({1.2, 0.4, 2.5, -0.3, 0.9, 1.1, 0.5});
  CHECK(B.block(0, 10, 10, 4).cwiseAbs().maxCoeff() == 2.0);
}

TEST_CASE("photon sphere dictionary") {
  auto d = photon_dictionary(BlackHoleParams(0.15, 1.0, 1.0), 1.0, 2.0, 3.0);
  CHECK(d.r_P == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(d.alpha2 == doctest::Approx(0.05).epsilon(1e-12));
  const double q = -1.0 / (std::sqrt(0.05) * 4.0);
  CHECK(d.q == doctest::Approx(q).epsilon(1e-12));
  CHECK(d.params.qp == doctest::Approx(0.5 * 2.0 * q / std::sqrt(0.05)).epsilon(1e-12));
  CHECK(d.params.gamma1p == doctest::Approx(0.5 * 2.0 / 0.05).epsilon(1e-12));
  CHECK(d.params.gamma3pp == doctest::Approx(2.0 * d.T_prime * 3.0).epsilon(1e-14));
  ParamSampler S(33);
  for (int i = 0; i < 50; ++i) {
    auto p = S.draw_dyonic();
    auto e = eig_trapped(photon_dictionary(p, S.uniform(0, 1), S.uniform(0, 1), S.uniform(0, 1)).params);
    CHECK(e.max_deviation < 1e-8 * (1 + std::abs(e.predicted.back())));
  }
}

TEST_CASE("radial matrix spectra") {
  RadialSetParams z;
  z.kappa = 0.1;
  auto c = eig_radial(z);
  for (double v : {0.0, 0.2, 0.4, 0.6, 0.8}) CHECK(contains(c.eigenvalues, v, 1e-6));
  CHECK(threshold_beta_hat(z) == 0.0);
  ParamSampler S(34);
  for (int i = 0; i < 1000; ++i) {
    RadialSetParams r{S.uniform(0.01, 1), S.uniform(-3, 3), S.uniform(0, 5), S.uniform(0, 5), S.uniform(0, 5), S.uniform(-3, 3)};
    for (auto side : {RadialSide::Event, RadialSide::Cosmological}) {
      r.side = side;
      auto e = eig_radial(r);
      CHECK(e.max_deviation < 1e-8);
      CHECK(e.nonnegative);
    }
    // flipping the side changes only the signed entries
    auto a = r, b = r;
    a.side = RadialSide::Event;
    b.side = RadialSide::Cosmological;
    RadialMatrix A = build_radial_matrix(a), B = build_radial_matrix(b);
    CHECK(A.diagonal() == B.diagonal());
    CHECK((A.cwiseAbs() - B.cwiseAbs()).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(threshold_beta_hat(r) == doctest::Approx(std::min({2 * r.kappa, 2 * r.gamma1, r.gamma3})).epsilon(1e-14));
  }
  RadialSetParams n = z;
  n.gamma1 = -0.1;
  CHECK(threshold_beta_hat(n) == doctest::Approx(-0.2));
  auto h = radial_params(BlackHoleParams(0.05, 1.0, 0.5), RadialSide::Cosmological, 1, 1, 1);
  CHECK(h.kappa == doctest::Approx(horizons(BlackHoleParams(0.05, 1.0, 0.5)).kappa_plus).epsilon(1e-14));
}

TEST_CASE("mismatched predictions are reported") {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(3, 3);
  CHECK_THROWS_AS(match_spectrum(A, {1.0, 1.0, 1.5}), LemmaMismatchError);
  CHECK_THROWS_AS(match_spectrum(A, {1.0, 1.0}), InternalInvariantError);
  CHECK(match_spectrum(A, {1.0, 1.0, 1.0}).max_deviation == 0.0);
}
