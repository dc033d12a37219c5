#include <doctest.h>

#include <cmath>

#include "knds/chebyshev.hpp"
#include "knds/errors.hpp"
#include "knds/initdata.hpp"
#include "knds/sampling.hpp"

using namespace knds;

namespace {
const BlackHoleParams kP(0.05, 1.0, 0.5);

double sup_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// H~ bump over most of the slice plus a proportional charge shift and TT part
ConformalSeed mixed_seed(const RadialDataSet& bg, double amp) {
  const double a = bg.grid.front(), b = bg.grid.back();
  ConformalSeed s;
  s.Htilde_fn = ConformalSeed::bump(amp, 0.5 * (a + b), 0.45 * (b - a));
  s.Qtilde_amp = amp;
  s.with_charge_shift(amp * kP.charge_e, 0.0);
  return s;
}
}  // namespace

TEST_CASE("Chebyshev differentiation, quadrature and stencils") {
  ChebGrid g(1.0, 3.0, 33);
  Eigen::VectorXd f(33), df(33), d2f(33);
  for (int j = 0; j < 33; ++j) {
    const double r = g.nodes()[j];
    f[j] = std::pow(r, 7) - 2 * r;
    df[j] = 7 * std::pow(r, 6) - 2;
    d2f[j] = 42 * std::pow(r, 5);
  }
  CHECK((g.D() * f - df).cwiseAbs().maxCoeff() < 1e-9 * df.cwiseAbs().maxCoeff());
  CHECK((g.D2() * f - d2f).cwiseAbs().maxCoeff() < 1e-9 * d2f.cwiseAbs().maxCoeff());
  CHECK(g.weights().dot(f) == doctest::Approx((std::pow(3.0, 8) - 1) / 8 - 8).epsilon(1e-13));
  CHECK(g.interpolate(f, 2.2) == doctest::Approx(std::pow(2.2, 7) - 4.4).epsilon(1e-13));
  CHECK(ChebGrid::matches(g.nodes()));

  std::vector<double> xs{0, 0.1, 0.2, 0.3, 0.4};
  CHECK_FALSE(ChebGrid::matches(xs));
  auto w = fornberg_weights(0.2, xs, 2);
  double d1 = 0, d2 = 0;
  for (int j = 0; j < 5; ++j) {
    d1 += w(1, j) * std::pow(xs[j], 3);
    d2 += w(2, j) * std::pow(xs[j], 3);
  }
  CHECK(d1 == doctest::Approx(3 * 0.04).epsilon(1e-12));
  CHECK(d2 == doctest::Approx(6 * 0.2).epsilon(1e-12));
  CHECK(diff_matrices(xs).spectral == false);
  CHECK_THROWS_AS(ChebGrid(1, 2, 2), UsageError);
}

TEST_CASE("RNdS slice: charges and constraint residuals") {
  const auto bg = rnds_slice(kP);
  CHECK(bg.size() == 256);
  for (double r0 : {bg.grid.front(), 3.3, bg.grid.back()}) {
    const auto c = charges(bg, r0);
    CHECK(c.Qe == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(c.Qm == 0.0);
  }
  const auto res = constraint_residual(bg, kP.lambda);
  CHECK(res.spectral);
  CHECK(res.interior.hamiltonian < 1e-10);
  CHECK(res.interior.momentum == 0.0);
  CHECK(res.interior.gauss_E < 1e-12);
  CHECK(res.full.gauss_B == 0.0);
  CHECK_THROWS_AS(charges(bg, bg.grid.back() + 0.1), DomainError);
  CHECK_THROWS_AS(rnds_slice(BlackHoleParams(0.15, 1.0, 0.5)), DegenerateError);

  // pure magnetic background
  const auto mag = rnds_slice(BlackHoleParams(0.05, 1.0, 0.0, 0.5));
  const auto cm = charges(mag, 3.0);
  CHECK(std::abs(cm.Qe) == 0.0);
  CHECK(cm.Qm == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(constraint_residual(mag, 0.05).interior.hamiltonian < 1e-10);
}

TEST_CASE("flat data with zero fields has zero residuals") {
  RadialDataSet d;
  for (int j = 0; j < 200; ++j) {
    const double r = 1.0 + 0.01 * j;
    d.grid.push_back(r);
    d.h_rr.push_back(1.0);
    d.h_sphere.push_back(r * r);
    d.k_rr.push_back(0);
    d.k_sphere.push_back(0);
    d.E_r.push_back(0);
    d.B_r.push_back(0);
  }
  const auto res = constraint_residual(d, 0.0);
  CHECK_FALSE(res.spectral);
  CHECK(res.full.hamiltonian < 1e-8);  // stencil roundoff ~ eps |h_sphere| / dr^2
  CHECK(res.full.momentum == 0.0);
  CHECK(res.full.gauss_E == 0.0);
  d.h_rr[3] = -1;
  CHECK_THROWS_AS(constraint_residual(d, 0.0), DomainError);
}

TEST_CASE("duality rotation and charge Pythagoras") {
  ParamSampler S(7);
  for (int k = 0; k < 20; ++k) {
    const auto p = S.draw_dyonic();
    const auto d = rnds_slice(p, 64);
    const double r0 = S.uniform(d.grid.front(), d.grid.back());
    const auto c = charges(d, r0);
    CHECK(c.Qe == doctest::Approx(p.charge_e).epsilon(1e-12));
    CHECK(c.Qm == doctest::Approx(p.charge_m).epsilon(1e-12));

    const auto q = charges(duality_rotate(d, M_PI / 2), r0);
    CHECK(q.Qe == doctest::Approx(-c.Qm).epsilon(1e-12));
    CHECK(q.Qm == doctest::Approx(c.Qe).epsilon(1e-12));
    const auto id = duality_rotate(d, 0.0);
    CHECK(id.E_r == d.E_r);
    CHECK(id.B_r == d.B_r);

    const double th = find_theta(c);
    const auto rot = duality_rotate(d, th);
    const auto cs = charges(rot, r0);
    CHECK(std::abs(cs.Qm) < 1e-12);
    CHECK(std::abs(cs.Qe * cs.Qe - (c.Qe * c.Qe + c.Qm * c.Qm)) < 1e-12);
    CHECK(cs.Qe > 0);
    for (int j = 0; j < d.size(); ++j) {
      const double a = d.E_r[j] * d.E_r[j] + d.B_r[j] * d.B_r[j];
      CHECK(std::abs(rot.E_r[j] * rot.E_r[j] + rot.B_r[j] * rot.B_r[j] - a) <= 1e-14 * a);
    }
    const auto r1 = constraint_residual(d, p.lambda), r2 = constraint_residual(rot, p.lambda);
    CHECK(std::abs(r1.interior.hamiltonian - r2.interior.hamiltonian) < 1e-12);
  }
}

TEST_CASE("zero seed returns the background exactly") {
  const auto bg = rnds_slice(kP);
  const auto sol = solve_conformal(bg, ConformalSeed::zero(), kP.lambda);
  CHECK(sol.iterations == 0);
  CHECK(sup_abs(sol.psi) == 0.0);
  CHECK(sup_abs(sol.v) == 0.0);
  CHECK(sol.seed_norm == 0.0);
  CHECK(sol.data.h_rr == bg.h_rr);
  CHECK(sol.data.E_r == bg.E_r);
}

TEST_CASE("small seeds converge with certified constraint residuals") {
  const auto bg = rnds_slice(kP);
  const double a = bg.grid.front(), b = bg.grid.back();

  SUBCASE("mean-curvature bump alone") {
    ConformalSeed s;
    s.Htilde_fn = ConformalSeed::bump(1e-3, 0.5 * (a + b), 0.45 * (b - a));
    const auto sol = solve_conformal(bg, s, kP.lambda);
    CHECK(sol.iterations >= 1);
    CHECK(sol.residuals.interior.max() < 1e-8);
    CHECK(sup_abs(sol.psi) > 0.0);
    CHECK(sup_abs(sol.v) > 0.0);  // dH drives the shift
  }
  SUBCASE("mixed seed") {
    const auto sol = solve_conformal(bg, mixed_seed(bg, 1e-3), kP.lambda);
    CHECK(sol.residuals.interior.max() < 1e-8);
    CHECK(sol.hamiltonian_eq < 1e-12);
    CHECK(sol.momentum_eq < 1e-9);
    for (double p : sol.psi) CHECK(1.0 + p > 0.0);
    // charge of the solved data is the shifted charge, independent of the sphere
    const double q1 = charges(sol.data, a + 0.1 * (b - a)).Qe, q2 = charges(sol.data, b - 0.2 * (b - a)).Qe;
    CHECK(std::abs(q1 - q2) < 1e-10);
    CHECK(q1 == doctest::Approx(0.5 * (1 + 1e-3)).epsilon(1e-12));
    CHECK(sol.constant_estimate() > 0.0);
    CHECK(sol.psi_at(sol.grid[17]) == sol.psi[17]);

    // a slightly smaller margin certifies too; the raw end nodes carry roundoff only
    CHECK(constraint_residual(sol.data, kP.lambda, 0.02).interior.max() < 1e-8);
    CHECK(sol.residuals.full.gauss_E < 1e-10);
  }
}

TEST_CASE("response scaling between amplitudes 1e-4 and 1e-3") {
  const auto bg = rnds_slice(kP);
  const double a = bg.grid.front(), b = bg.grid.back();
  auto solve = [&](const ConformalSeed& s) { return solve_conformal(bg, s, kP.lambda); };

  SUBCASE("charge shift couples linearly through E0") {
    ConformalSeed lo, hi;
    lo.with_charge_shift(1e-4, 0.0);
    hi.with_charge_shift(1e-3, 0.0);
    const auto s1 = solve(lo), s2 = solve(hi);
    CHECK(sup_abs(s2.psi) / sup_abs(s1.psi) == doctest::Approx(10.0).epsilon(0.2));
    CHECK(s2.seed_norm / s1.seed_norm == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(s2.constant_estimate() == doctest::Approx(s1.constant_estimate()).epsilon(0.2));
  }
  SUBCASE("mean-curvature bump on a time-symmetric slice responds quadratically") {
    // H0 = 0: H~ enters through 3 H^2 and |D V2|^2 with V2 linear in dH~
    ConformalSeed lo, hi;
    lo.Htilde_fn = ConformalSeed::bump(1e-4, 0.5 * (a + b), 0.45 * (b - a));
    hi.Htilde_fn = ConformalSeed::bump(1e-3, 0.5 * (a + b), 0.45 * (b - a));
    const auto s1 = solve(lo), s2 = solve(hi);
    CHECK(sup_abs(s2.psi) / sup_abs(s1.psi) == doctest::Approx(100.0).epsilon(0.2));
    CHECK(sup_abs(s2.v) / sup_abs(s1.v) == doctest::Approx(10.0).epsilon(0.2));
    CHECK(s2.constant_estimate() < s1.constant_estimate() * 10.0 * 1.2);
  }
}

TEST_CASE("solved data fed back with a zero seed is a fixed point") {
  const auto bg = rnds_slice(kP);
  const auto sol = solve_conformal(bg, mixed_seed(bg, 1e-3), kP.lambda);
  const auto again = solve_conformal(sol.data, ConformalSeed::zero(), kP.lambda);
  CHECK(again.iterations == 0);
  CHECK(sup_abs(again.psi) == 0.0);
}

TEST_CASE("dyonic background") {
  const BlackHoleParams p(0.05, 1.0, 0.3, 0.4);
  const auto bg = rnds_slice(p);
  ConformalSeed s;
  s.with_charge_shift(1e-3, -2e-3);
  const auto sol = solve_conformal(bg, s, p.lambda);
  CHECK(sol.residuals.interior.max() < 1e-8);
  const auto c = charges(sol.data, 3.0);
  CHECK(c.Qe == doctest::Approx(0.301).epsilon(1e-12));
  CHECK(c.Qm == doctest::Approx(0.398).epsilon(1e-12));
}

TEST_CASE("initdata error paths") {
  const auto bg = rnds_slice(kP);
  ConformalSeed bad;
  bad.Etilde_fn = [](double r) { return 1e-4 / r; };
  CHECK_THROWS_AS(solve_conformal(bg, bad, kP.lambda), DomainError);

  ConformalSeed big;
  big.with_charge_shift(0.2, 0.0);
  CHECK_THROWS_AS(solve_conformal(bg, big, kP.lambda), DomainError);

  auto coarse = bg;
  coarse.grid[5] += 1e-6;
  CHECK_THROWS_AS(solve_conformal(coarse, ConformalSeed::zero(), kP.lambda), UsageError);

  // far beyond the smallness regime the solver reports failure instead of data
  ConformalSeed huge;
  huge.Htilde_fn = [](double) { return 0.0; };
  huge.Qtilde_amp = 5.0;
  SolveOptions o;
  o.epsilon = 1e6;
  o.max_iterations = 5;
  CHECK_THROWS_AS(solve_conformal(bg, huge, kP.lambda, o), Error);
}
