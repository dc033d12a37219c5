#include "knds/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include <fmt/core.h>

#include "knds/errors.hpp"
#include "knds/initdata.hpp"
#include "knds/perturbation.hpp"
#include "knds/resonance.hpp"
#include "knds/sampling.hpp"
#include "knds/spacetime.hpp"
#include "knds/subprincipal.hpp"

#ifndef KNDS_VERSION
#define KNDS_VERSION "0.0.0"
#endif

namespace knds {

const char* version() { return KNDS_VERSION; }

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }
double relc(cplx a, cplx b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }
std::string e3(double x) { return fmt::format("{:.3e}", x); }

// ---- 1: non-degeneracy boundary ----
CriterionResult c1(const AcceptanceOptions&) {
  CriterionResult r{1, "non-degeneracy boundary", false, "", 0, 10, {}};
  const int n = 200;
  const double dL = 0.25 / n;
  int mismatches = 0;
  std::vector<std::vector<bool>> verdict(n, std::vector<bool>(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double L = dL * (i + 1), Q = 0.01 * j;
      const bool a = classify_nondegenerate(L, 1.0, Q).nondegenerate;
      verdict[j][i] = a;
      if (a != classify_bruteforce(L, 1.0, Q).nondegenerate) ++mismatches;
    }
  // first degenerate Lambda above the nondegenerate run of a column
  auto flip = [&](int j) {
    for (int i = 1; i < n; ++i)
      if (verdict[j][i - 1] && !verdict[j][i]) return dL * (i + 1);
    return -1.0;
  };
  const double f0 = flip(0), f1 = flip(100);
  const double d0 = std::abs(f0 - 1.0 / 9.0), d1 = std::abs(f1 - 0.1875);
  r.pass = mismatches == 0 && d0 <= dL && d1 <= dL;
  r.detail = fmt::format("200x200 cells, {} verdict mismatches; Q=0 flip at {:.5f} (|d|={} vs cell {}), Q=1 flip at {:.5f} (|d|={})",
                         mismatches, f0, e3(d0), e3(dL), f1, e3(d1));
  r.metrics = {{"mismatches", mismatches}, {"flip_q0", f0}, {"flip_q1", f1}, {"cell", dL}};
  return r;
}

// ---- 2: horizon structure ----
CriterionResult c2(const AcceptanceOptions& o) {
  CriterionResult r{2, "horizon structure", false, "", 0, 30, {}};
  ParamSampler S(o.rng_seed + 2);
  int bad_order = 0, bad_root = 0;
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const auto p = S.draw();
    const auto h = horizons(p);
    if (!(0.0 < h.r_inner && h.r_inner < h.r_crit_1 && h.r_crit_1 < h.r_minus && h.r_minus < h.r_crit_2 &&
          h.r_crit_2 < h.r_plus))
      ++bad_order;
    for (double x : {h.r_inner, h.r_minus, h.r_plus}) {
      const double q = std::abs(mu(p, x)) / (1.0 + std::abs(mu_prime(p, x)));
      worst = std::max(worst, q);
      if (!(q < 1e-12)) ++bad_root;
    }
  }
  r.pass = bad_order == 0 && bad_root == 0;
  r.detail = fmt::format("10000 draws, {} ordering failures, {} unpolished roots, max |mu|/(1+|mu'|) = {}", bad_order,
                         bad_root, e3(worst));
  r.metrics = {{"ordering_failures", bad_order}, {"root_failures", bad_root}, {"max_root_residual", worst}};
  return r;
}

// ---- 3: positivity lemmas ----
CriterionResult c3(const AcceptanceOptions& o) {
  CriterionResult r{3, "positivity lemmas", false, "", 0, 60, {}};
  ParamSampler S(o.rng_seed + 3);
  int fails = 0;
  double minH = INFINITY, minVp = INFINITY, minVm = INFINITY, maxV1 = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto p = S.draw();
    const auto h = horizons(p);
    const auto grid = chebyshev_points(h.r_minus, h.r_plus, 512);
    for (int l = 1; l <= 6; ++l) {
      ScalarMasterData sd(p, l, false);
      for (size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        const double hm = std::min({sd.H(x), sd.H_plus(x), sd.H_minus(x)});
        minH = std::min(minH, hm);
        if (!(hm > 0.0)) ++fails;
        if (i == 0 || i + 1 == grid.size()) continue;
        const double vp = sd.Vt_plus(x), vm = sd.Vt_minus(x);
        minVp = std::min(minVp, vp);
        if (!(vp > 0.0)) ++fails;
        if (l >= 2) {
          minVm = std::min(minVm, vm);
          if (!(vm > 0.0)) ++fails;
        } else {
          maxV1 = std::max(maxV1, std::abs(vm));
          if (!(std::abs(vm) < 1e-14)) ++fails;
        }
      }
    }
  }
  r.pass = fails == 0;
  r.detail = fmt::format("100 draws x l=1..6 x 512 points, {} failures; min H,H+,H- = {}, min Vt+ = {}, min Vt- (l>=2) = {}, "
                         "max |Vt-| (l=1) = {}",
                         fails, e3(minH), e3(minVp), e3(minVm), e3(maxV1));
  r.metrics = {{"failures", fails}, {"min_H", minH}, {"min_Vt_plus", minVp}, {"min_Vt_minus", minVm}, {"max_Vt_minus_l1", maxV1}};
  return r;
}

// ---- 4: algebraic identity suite ----
CriterionResult c4(const AcceptanceOptions& o) {
  CriterionResult r{4, "algebraic identity suite", false, "", 0, 30, {}};
  ParamSampler S(o.rng_seed + 4);
  double sdef = 0, pyx = 0, sums = 0, vpm = 0, cxy = 0;
  for (int k = 0; k < 50; ++k) {
    const auto p = S.draw();
    const auto h = horizons(p);
    const auto grid = chebyshev_points(h.r_minus, h.r_plus, 128);
    for (int l = 1; l <= 5; ++l) {
      ScalarMasterData sd(p, l, false);
      for (size_t i = 1; i + 1 < grid.size(); ++i) {
        const double x = grid[i];
        for (auto b : {BranchKind::Plus, BranchKind::Minus}) {
          const auto s = s_deformation(p, l, b, x);
          const double V = b == BranchKind::Plus ? sd.V_plus(x) : sd.V_minus(x);
          sdef = std::max(sdef, std::abs(s.residual) / std::max({1.0, std::abs(V), std::abs(s.Vtilde)}));
        }
        const auto P = sd.polys(x);
        const auto pt = sd.point(x);
        pyx = std::max(pyx, std::abs(P.P_Y - P.P_X - 12.0 * pt.H * pt.mu) / std::max({1.0, std::abs(P.P_X), std::abs(P.P_Y)}));
        sums = std::max({sums, rel((P.P_X0 + P.P_Y0) / (2 * x * pt.H * pt.H), pt.H / x - P.P_Z / (x * pt.H)),
                         rel((P.P_X1 + P.P_Y1) / (2 * pt.H), -2 * pt.mu),
                         rel(2 * sd.Q * (P.P_XA + P.P_YA) / (x * x * pt.H * pt.H), 16 * sd.Q * pt.mu / (x * x * pt.H))});
        const auto c = sd.coupled(x);
        if (l >= 2) {
          const ModeSector sec = ModeSector::scalar(l);
          vpm = std::max({vpm, rel(master_potential(p, sec, {BranchKind::Plus}, x), c.V_A + (sd.c_plus - sd.Q / (2 * x)) * c.F_Phi),
                          rel(master_potential(p, sec, {BranchKind::Minus}, x), c.V_A + (sd.c_minus - sd.Q / (2 * x)) * c.F_Phi)});
        }
      }
      for (cplx sigma : {cplx(0.0), cplx(0.2, 0.1)}) {
        const auto C = stationary_coefficients(p, l, sigma);
        for (double rh : {h.r_minus, h.r_plus}) {
          const auto cc = C(rh);
          cxy = std::max({cxy, relc(cc.C_Xp, cc.C_Yp), relc(cc.C_Xm, cc.C_Ym)});
        }
      }
    }
  }
  r.pass = sdef < 1e-9 && pyx < 1e-10 && sums < 1e-10 && vpm < 1e-10 && cxy < 1e-10;
  r.detail = fmt::format("50 draws x l=1..5 x 128 radii; S-deformation {}, P_Y-P_X-12H mu {}, sum identities {}, "
                         "V+- decomposition {}, C_X=C_Y at horizons {}",
                         e3(sdef), e3(pyx), e3(sums), e3(vpm), e3(cxy));
  r.metrics = {{"s_deformation", sdef}, {"PY_minus_PX", pyx}, {"sum_identities", sums}, {"V_pm", vpm}, {"CX_CY", cxy}};
  return r;
}

// ---- 5: constrained-ODE reduction oracle ----
CriterionResult c5(const AcceptanceOptions& o) {
  CriterionResult r{5, "constrained-ODE reduction oracle", false, "", 0, 60, {}};
  ParamSampler S(o.rng_seed + 5);
  double ea = 0, eb = 0;
  int errors = 0;
  for (int k = 0; k < 10; ++k) {
    const auto p = S.draw();
    const auto h = horizons(p);
    const int l = 2 + k % 3;
    ScalarMasterData sd(p, l, false);
    using J = Jet<cplx>;
    auto jet = [&](double x) {
      J R = J::variable(2, x);
      J H = sd.H(R);
      return std::array<J, 3>{-1.0 * R / H, -1.0 * R / H, 2.0 / H};
    };
    auto take = [&](int d) {
      return [&, d](double x) {
        auto e = jet(x);
        return Row3(e[0].derivative(d), e[1].derivative(d), e[2].derivative(d));
      };
    };
    const double w = h.r_plus - h.r_minus;
    for (cplx sigma : {cplx(0.3), cplx(1.0, 0.5)}) {
      const auto sys = scalar_constrained_system(p, l, sigma);
      for (double x : chebyshev_points(h.r_minus + 0.02 * w, h.r_plus - 0.02 * w, 128)) {
        try {
          const auto red = reduce_constrained_system(sys, take(0), take(1), take(2), x);
          const double m = mu(p, x), mp = mu_prime(p, x);
          const cplx b = -(sd.coupled(x).V_Phi - sigma * sigma) / (m * m);
          ea = std::max(ea, std::abs(red.a - mp / m) / std::abs(mp / m));
          eb = std::max(eb, std::abs(red.b - b) / std::abs(b));
        } catch (const Error&) {
          ++errors;
        }
      }
    }
  }
  r.pass = errors == 0 && ea < 1e-8 && eb < 1e-8;
  r.detail = fmt::format("10 draws x 2 sigma x 128 radii, {} reduction errors; max rel error a = {}, b = {}", errors, e3(ea), e3(eb));
  r.metrics = {{"errors", errors}, {"a_rel", ea}, {"b_rel", eb}};
  return r;
}

// ---- 6: mode stability scan ----
CriterionResult c6(const AcceptanceOptions& o) {
  CriterionResult r{6, "mode stability scan", false, "", 0, 600, {}};
  ParamSampler S(o.rng_seed + 6);
  ContourOptions opt;
  opt.jobs = o.jobs;
  int contours = 0, nonzero = 0, control_ok = 0;
  double min_w = INFINITY;
  std::string first_bad;
  nlohmann::ordered_json draws = nlohmann::ordered_json::array();
  for (int k = 0; k < 10; ++k) {
    const auto p = k == 9 ? S.near_extremal() : S.draw();
    try {
      const auto scan = mode_stability_scan(p, {SectorKind::ScalarHigh, SectorKind::VectorHigh}, 3, default_scan_window(p), 128, opt);
      for (const auto& e : scan.entries) {
        ++contours;
        min_w = std::min(min_w, e.report.min_rel_abs_w);
        if (e.report.winding != 0) {
          ++nonzero;
          if (first_bad.empty()) first_bad = fmt::format("draw {} {} l={} {}", k, e.sector, e.l, e.branch);
        }
      }
      const auto hz = horizons(p);
      const double kap = std::min(hz.kappa_minus, hz.kappa_plus);
      MasterEquation ctl(p, ModeSector(SectorKind::Spherical, 0), {BranchKind::ScalarWaveControl});
      const auto c = count_resonances(ctl, {-0.5 * kap, 0.5 * kap, -0.5 * kap, 0.5 * kap}, 128, opt);
      if (c.winding == 1) ++control_ok;
      draws.push_back({{"params", params_json(p)}, {"stable", scan.stable()}, {"control_winding", c.winding}});
    } catch (const Error& e) {
      ++nonzero;
      if (first_bad.empty()) first_bad = fmt::format("draw {}: {}: {}", k, e.kind(), e.what());
    }
  }
  r.pass = nonzero == 0 && contours == 90 && control_ok == 10;
  r.detail = fmt::format("10 draws (one near-extremal), {} contours, {} with nonzero winding{}; control winding 1 on {}/10; "
                         "min |W|/scale on contours = {}",
                         contours, nonzero, first_bad.empty() ? "" : " (first: " + first_bad + ")", control_ok, e3(min_w));
  r.metrics = {{"contours", contours}, {"nonzero", nonzero}, {"control_ok", control_ok}, {"draws", draws}};
  return r;
}

// ---- 7: constraint damping drift ----
CriterionResult c7(const AcceptanceOptions& o) {
  CriterionResult r{7, "constraint damping drift", false, "", 0, 120, {}};
  ParamSampler S(o.rng_seed + 7);
  double worst_slope = 0.0, lo = INFINITY, hi = -INFINITY, s0 = 0.0, integ = 0.0;
  int fails = 0;
  for (int k = 0; k < 5; ++k) {
    const auto p = S.draw();
    const auto h = horizons(p);
    const double ref = -4.0 * M_PI * (h.r_plus * h.r_plus + h.r_minus * h.r_minus);
    integ = std::max(integ, std::abs(box_tstar_horizon_integral(p) - ref) / std::abs(ref));
    try {
      // sigma = 0 must be an actual zero of the undamped Wronskian
      const auto d0 = constraint_damping_resonance_detail(p, 0.0);
      s0 = std::max({s0, std::abs(d0.sigma), d0.residual});
      for (double g : {0.005, 0.01, 0.02}) {
        const double slope = constraint_damping_resonance(p, g).imag() / g;
        lo = std::min(lo, slope);
        hi = std::max(hi, slope);
        if (std::abs(slope + 1.0) > std::abs(worst_slope + 1.0)) worst_slope = slope;
        if (!(slope >= -1.15 && slope <= -0.85)) ++fails;
      }
    } catch (const Error&) {
      ++fails;
    }
  }
  r.pass = fails == 0 && s0 < 1e-10 && integ < 1e-8;
  r.detail = fmt::format("5 draws x gamma3 in {{0.005, 0.01, 0.02}}: Im sigma/gamma3 in [{:.6f}, {:.6f}], {} outside [-1.15, -0.85]; "
                         "max |sigma(0)| + normalized |D(0)| = {}; horizon integral rel error {}",
                         lo, hi, fails, e3(s0), e3(integ));
  r.metrics = {{"slope_min", lo}, {"slope_max", hi}, {"failures", fails}, {"sigma0", s0}, {"horizon_integral_rel", integ}};
  return r;
}

// ---- 8: subprincipal spectra ----
CriterionResult c8(const AcceptanceOptions& o) {
  CriterionResult r{8, "subprincipal spectra", false, "", 0, 20, {}};
  ParamSampler S(o.rng_seed + 8);
  int mismatch = 0, pair_missing = 0, pp_dependence = 0, subspace = 0;
  double dev_t = 0.0, dev_r = 0.0;
  const auto V1 = trapped_subspace_v1(), V2 = trapped_subspace_v2();
  for (int i = 0; i < 1000; ++i) {
    TrappedSetParams t{S.uniform(0, 5), S.uniform(0, 5), S.uniform(0, 5), S.uniform(-5, 5), S.uniform(-5, 5), S.uniform(-5, 5), S.uniform(-3, 3)};
    try {
      const auto c = eig_trapped(t);
      dev_t = std::max(dev_t, c.max_deviation);
      const cplx pr(0.0, 2.0 * t.qp * std::sqrt(2.0));
      int n_pos = 0, n_neg = 0;
      for (const auto& z : c.predicted) {
        n_pos += std::abs(z - pr) == 0.0;
        n_neg += std::abs(z + pr) == 0.0;
      }
      if (t.qp != 0.0 && (n_pos < 2 || n_neg < 2)) ++pair_missing;
      auto u = t;
      u.gamma1pp = S.uniform(-5, 5);
      u.gamma2pp = S.uniform(-5, 5);
      u.gamma3pp = S.uniform(-5, 5);
      const auto e = eig_trapped(u);
      dev_t = std::max(dev_t, e.max_deviation);
      if (e.predicted != c.predicted) ++pp_dependence;
      const auto A = build_trapped_matrix(t);
      if (invariant_subspace_defect(A, V1) != 0.0 || invariant_subspace_defect(A, V2) != 0.0) ++subspace;
    } catch (const LemmaMismatchError&) {
      ++mismatch;
    }
  }
  for (int i = 0; i < 1000; ++i) {
    RadialSetParams rp{S.uniform(0.01, 1), S.uniform(-3, 3), S.uniform(0, 5), S.uniform(0, 5), S.uniform(0, 5), S.uniform(-3, 3)};
    for (auto side : {RadialSide::Event, RadialSide::Cosmological}) {
      rp.side = side;
      try {
        dev_r = std::max(dev_r, eig_radial(rp).max_deviation);
      } catch (const LemmaMismatchError&) {
        ++mismatch;
      }
    }
  }
  r.pass = mismatch == 0 && pair_missing == 0 && pp_dependence == 0 && subspace == 0 && dev_t < 1e-8 && dev_r < 1e-8;
  r.detail = fmt::format("1000 trapped (+1000 with redrawn gamma'') and 2x1000 radial draws: {} mismatches, max deviation "
                         "trapped {} radial {}; +-2iq'sqrt2 pair missing {}, gamma'' dependence {}, non-invariant subspaces {}",
                         mismatch, e3(dev_t), e3(dev_r), pair_missing, pp_dependence, subspace);
  r.metrics = {{"mismatches", mismatch}, {"trapped_dev", dev_t}, {"radial_dev", dev_r}, {"subspace_failures", subspace}};
  return r;
}

// ---- 9: initial data ----
CriterionResult c9(const AcceptanceOptions& o) {
  CriterionResult r{9, "initial data", false, "", 0, 60, {}};
  ParamSampler S(o.rng_seed + 9);
  bool zero_exact = true;
  double worst = 0.0, pyth = 0.0;
  int fails = 0, solves = 0;
  for (int k = 0; k < 5; ++k) {
    const auto p = k == 4 ? S.near_extremal() : S.draw();
    const auto bg = rnds_slice(p);
    const double a = bg.grid.front(), b = bg.grid.back();
    try {
      const auto z = solve_conformal(bg, ConformalSeed::zero(), p.lambda);
      for (double x : z.psi) zero_exact = zero_exact && x == 0.0;
      for (double x : z.v) zero_exact = zero_exact && x == 0.0;
      zero_exact = zero_exact && z.iterations == 0;

      ConformalSeed bump;
      bump.Htilde_fn = ConformalSeed::bump(1e-3, 0.5 * (a + b), 0.45 * (b - a));
      ConformalSeed mixed = bump;
      mixed.Qtilde_amp = 1e-3;
      mixed.with_charge_shift(1e-3, 0.0);
      for (const auto* s : {&bump, &mixed}) {
        const auto sol = solve_conformal(bg, *s, p.lambda);
        ++solves;
        worst = std::max(worst, sol.residuals.interior.max());
        if (!(sol.residuals.interior.max() < 1e-8)) ++fails;
      }
    } catch (const Error&) {
      ++fails;
    }
  }
  for (int k = 0; k < 100; ++k) {
    const auto p = S.draw_dyonic();
    const auto d = rnds_slice(p, 64);
    const double r0 = S.uniform(d.grid.front(), d.grid.back());
    const auto c = charges(d, r0);
    const auto rot = charges(duality_rotate(d, find_theta(c)), r0);
    pyth = std::max({pyth, std::abs(rot.Qe * rot.Qe - (c.Qe * c.Qe + c.Qm * c.Qm)), std::abs(rot.Qm)});
  }
  r.pass = zero_exact && fails == 0 && solves == 10 && pyth < 1e-12;
  r.detail = fmt::format("zero seed exact on 5 slices: {}; {} amplitude-1e-3 solves, {} failures, max interior residual {}; "
                         "charge Pythagoras over 100 dyonic slices {}",
                         zero_exact ? "yes" : "no", solves, fails, e3(worst), e3(pyth));
  r.metrics = {{"zero_exact", zero_exact}, {"solves", solves}, {"max_residual", worst}, {"pythagoras", pyth}};
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
  static const std::function<CriterionResult(const AcceptanceOptions&)> table[] = {c1, c2, c3, c4, c5, c6, c7, c8, c9};
  if (id < 1 || id > 9) throw UsageError("criterion id must be in 1..9");
  const auto t0 = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = table[id - 1](opt);
  } catch (const std::exception& e) {
    r.id = id;
    r.pass = false;
    r.detail = std::string("aborted: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.limit_seconds > 0 && r.seconds > r.limit_seconds) {
    r.pass = false;
    r.detail += fmt::format("; runtime {:.1f} s exceeds {:.0f} s", r.seconds, r.limit_seconds);
  }
  return r;
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= 9; ++id)
    if (opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), id) != opt.only.end())
      out.push_back(run_criterion(id, opt));
  return out;
}

std::string format_line(const CriterionResult& r) {
  return fmt::format("{} {:>2} {}: {}", r.pass ? "PASS" : "FAIL", r.id, r.title, r.detail);
}

std::string format_report(const std::vector<CriterionResult>& rs) {
  std::string s;
  for (const auto& r : rs) s += format_line(r) + "\n";
  return s;
}

}  // namespace knds
