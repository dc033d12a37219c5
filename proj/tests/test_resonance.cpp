#include <doctest.h>

#include <cmath>

#include "knds/resonance.hpp"
#include "knds/sampling.hpp"

using namespace knds;

namespace {
const BlackHoleParams kRef(0.05, 1.0, 0.5);
MasterEquation control(const BlackHoleParams& p) {
  return MasterEquation(p, ModeSector{SectorKind::Spherical, 0}, {BranchKind::ScalarWaveControl});
}
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }
}  // namespace

TEST_CASE("control zero mode is Psi = r at sigma = 0") {
  auto eq = control(kRef);
  const auto& h = eq.horizon();
  for (auto side : {HorizonSide::EventHorizon, HorizonSide::CosmologicalHorizon}) {
    auto f = frobenius_solution({eq, 0.0}, side);
    const double rh = side == HorizonSide::EventHorizon ? h.r_minus : h.r_plus;
    CHECK(std::abs(f.psi - f.r / rh) < 1e-14);
    CHECK(std::abs(f.dpsi - 1.0 / rh) < 1e-14);
  }
  auto w = wronskian_detail({eq, 0.0});
  CHECK(std::abs(w.W) < 1e-8 * w.scale);
}

TEST_CASE("Frobenius order N against N+4 and the exponent scale") {
  ParamSampler S(21);
  for (int i = 0; i < 5; ++i) {
    auto p = S.draw();
    MasterEquation eq(p, ModeSector::scalar(2), {BranchKind::Plus});
    const auto& h = eq.horizon();
    const cplx s(0.7 * h.kappa_plus, 0.4 * h.kappa_plus);
    for (auto side : {HorizonSide::EventHorizon, HorizonSide::CosmologicalHorizon}) {
      auto a = frobenius_solution({eq, s, 40}, side);
      auto b = frobenius_solution({eq, s, 44}, side);
      CHECK(rel(a.psi, b.psi) < 1e-12);
      CHECK(rel(a.dpsi, b.dpsi) < 1e-12);
      auto c = frobenius_solution({eq, s}, side);
      CHECK(c.truncation < 1e-10);
      const double k = side == HorizonSide::EventHorizon ? h.kappa_minus : h.kappa_plus;
      CHECK(rel(c.exponent, cplx(0.0, -1.0) * s / (2.0 * k)) < 1e-12);
    }
  }
  MasterEquation eq(kRef, ModeSector::scalar(2), {BranchKind::Plus});
  // sigma = -i kappa- makes n + 2s vanish at n = 1
  CHECK_THROWS_AS(frobenius_solution({eq, cplx(0.0, -eq.horizon().kappa_minus)}, HorizonSide::EventHorizon), IndicialDegeneracy);
  CHECK_THROWS_AS(frobenius_solution({eq, 0.1, 2}, HorizonSide::EventHorizon), UsageError);
}

TEST_CASE("Wronskian is independent of the match radius") {
  ParamSampler S(22);
  for (int i = 0; i < 5; ++i) {
    auto p = S.draw();
    const auto h = horizons(p);
    for (auto sec : {ModeSector::scalar(2), ModeSector::vector(3)})
      for (auto b : {BranchKind::Plus, BranchKind::Minus}) {
        MasterEquation eq(p, sec, {b});
        const cplx s(0.9 * h.kappa_plus, 0.3 * h.kappa_plus);
        const double ra = h.r_minus + 0.2 * (h.r_plus - h.r_minus), rb = h.r_minus + 0.8 * (h.r_plus - h.r_minus);
        CHECK(rel(wronskian({eq, s, 0, ra}), wronskian({eq, s, 0, rb})) < 1e-8);
      }
  }
  MasterEquation eq(kRef, ModeSector::scalar(2), {BranchKind::Plus});
  CHECK_THROWS_AS(wronskian({eq, 0.1, 0, eq.horizon().r_minus * 1.0001}), UsageError);
}

TEST_CASE("conjugation symmetry W(-conj s) = conj W(s)") {
  ParamSampler S(23);
  for (int i = 0; i < 4; ++i) {
    auto p = S.draw();
    const double k = horizons(p).kappa_plus;
    for (int l : {2, 3}) {
      MasterEquation eq(p, ModeSector::scalar(l), {BranchKind::Minus});
      for (cplx s : {cplx(0.3 * k, 0.2 * k), cplx(2.1 * k, 1.7 * k), cplx(1.0 * k, -0.4 * k)})
        CHECK(rel(wronskian({eq, -std::conj(s)}), std::conj(wronskian({eq, s}))) < 1e-10);
    }
  }
}

TEST_CASE("no zero at sigma = 0.5i for the scalar master equation") {
  MasterEquation eq(kRef, ModeSector::scalar(2), {BranchKind::Plus});
  auto w = wronskian_detail({eq, cplx(0.0, 0.5)});
  CHECK(std::abs(w.W) > 1e-3 * w.scale);
}

TEST_CASE("argument principle control") {
  auto eq = control(kRef);
  const auto& h = eq.horizon();
  const double k = std::min(h.kappa_minus, h.kappa_plus);
  auto r = count_resonances(eq, {-0.5 * k, 0.5 * k, -0.5 * k, 0.5 * k}, 128);
  CHECK(r.winding == 1);
  REQUIRE(r.zeros.size() == 1);
  CHECK(std::abs(r.zeros[0].sigma) < 1e-10);
  // excising a disk around 0: the upper scan window and an annulus sector
  CHECK(count_resonances(eq, default_scan_window(kRef), 128).winding == 0);
  CHECK(count_resonances(eq, {0.05 * k, 0.5 * k, -0.4 * k, 0.5 * k}, 128).winding == 0);
  // windows enclosing the normalisation pole at -i kappa are rejected
  CHECK_THROWS_AS(count_resonances(eq, {-k, k, -2.0 * h.kappa_plus, k}, 128), UsageError);
  CHECK_THROWS_AS(count_resonances(eq, {-k, k, 0.0, k}, 32), UsageError);
}

TEST_CASE("winding is additive over a 2x2 partition") {
  auto eq = control(kRef);
  const double k = std::min(eq.horizon().kappa_minus, eq.horizon().kappa_plus);
  const Window w{-0.5 * k, 0.5 * k, -0.5 * k, 0.5 * k};
  const double xm = 0.11 * k, ym = 0.07 * k;
  int sum = 0;
  for (auto q : {Window{w.re_lo, xm, w.im_lo, ym}, Window{xm, w.re_hi, w.im_lo, ym}, Window{w.re_lo, xm, ym, w.im_hi},
                 Window{xm, w.re_hi, ym, w.im_hi}})
    sum += count_resonances(eq, q, 64).winding;
  CHECK(sum == count_resonances(eq, w, 128).winding);
  CHECK(sum == 1);
}

TEST_CASE("mode stability scan at M = 1, Q = 0.5, Lambda = 0.05") {
  ContourOptions opt;
  opt.jobs = 2;
  auto r = mode_stability_scan(kRef, {SectorKind::ScalarHigh, SectorKind::VectorHigh}, 4, default_scan_window(kRef), 128, opt);
  CHECK(r.entries.size() == 6 + 7);
  CHECK(r.stable());
  for (auto& e : r.entries) CHECK(e.report.zeros.empty());
  // the window touching the real axis
  const double k = horizons(kRef).kappa_plus;
  for (auto b : {BranchKind::Plus, BranchKind::Minus})
    CHECK(count_resonances(MasterEquation(kRef, ModeSector::scalar(2), {b}), {-3 * k, 3 * k, 0.0, 3 * k}, 128).winding == 0);
  CHECK(mode_stability_scan(kRef, {}, 4, default_scan_window(kRef)).entries.empty());
  CHECK_THROWS_AS(mode_stability_scan(BlackHoleParams(0.2, 1.0, 0.0), {SectorKind::ScalarHigh}, 2, {-1, 1, 0.01, 1}), DegenerateError);
  auto j = r.to_json(kRef);
  CHECK(j.size() == r.entries.size());
  CHECK(j[0]["winding"] == 0);
}

TEST_CASE("damping operator anchors") {
  ParamSampler S(24);
  for (int i = 0; i < 5; ++i) {
    auto p = S.draw();
    DampingOperator op{p, StarGauge(p), 0.0, 0.0};
    const auto& h = op.gauge.horizon();
    for (double f : {0.1, 0.5, 0.9}) {
      const double r = h.r_minus + f * (h.r_plus - h.r_minus);
      // box 1 = 0: no zeroth-order term at sigma = 0
      CHECK(std::abs(op.C(r)) == 0.0);
      // box t* from i d/dsigma of the zeroth-order term
      const double e = 1e-4;
      DampingOperator a = op, b = op;
      a.sigma = e;
      b.sigma = -e;
      const cplx bt = cplx(0.0, 1.0) * (a.C(r) - b.C(r)) / (2.0 * e);
      CHECK(std::abs(bt - box_tstar(p, r)) < 1e-9 * (1.0 + std::abs(box_tstar(p, r))));
      CHECK(std::abs(op.B(r) - (mu_prime(p, r) + 2.0 * mu(p, r) / r)) < 1e-14);
    }
  }
}

TEST_CASE("constraint damping resonance drift") {
  CHECK(constraint_damping_resonance(kRef, 0.0) == cplx(0.0));
  auto s1 = constraint_damping_resonance(kRef, 0.01), s2 = constraint_damping_resonance(kRef, 0.02);
  CHECK(std::abs(s1 - cplx(0.0, -0.01)) < 0.1 * 0.01);
  CHECK(std::abs((s2 - s1) / 0.01 - cplx(0.0, -1.0)) < 0.15);
  ParamSampler S(25);
  for (int i = 0; i < 10; ++i) {
    auto p = S.draw();
    for (double g : {0.005, 0.01, 0.02}) {
      auto d = constraint_damping_resonance_detail(p, g);
      CHECK(d.sigma.imag() / g >= -1.15);
      CHECK(d.sigma.imag() / g <= -0.85);
      CHECK(d.residual < 1e-10);
    }
  }
  CHECK_THROWS_AS(constraint_damping_resonance(kRef, 0.5), DomainError);
  CHECK_THROWS_AS(constraint_damping_resonance(BlackHoleParams(0.2, 1.0, 0.0), 0.01), DegenerateError);
}

TEST_CASE("diagonalized vector potentials are resonance-free too") {
  ParamSampler S(26);
  for (int i = 0; i < 3; ++i) {
    auto p = i == 2 ? S.near_extremal() : S.draw();
    for (int l : {2, 3})
      for (auto b : {BranchKind::VectorEigenPlus, BranchKind::VectorEigenMinus})
        CHECK(count_resonances(MasterEquation(p, ModeSector::vector(l), {b}), default_scan_window(p), 128).winding == 0);
  }
}
