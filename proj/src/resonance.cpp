#include "knds/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <thread>

#include "resonance_internal.hpp"

namespace knds {

using detail::State;

void parallel_for(int n, int jobs, const std::function<void(int)>& body) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::mutex m;
  const int w = std::min(jobs, n);
  for (int t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      for (int i = t; i < n; i += w) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> g(m);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

namespace {

constexpr int kMaxOrder = 90;

// sigma-independent Taylor data at one horizon, in x = |r - r_h|
struct HorizonSeries {
  double rh, dir, delta;
  std::vector<double> m, V;  // mu = x m(x); V(x) with V_0 = 0
  std::vector<double> P, R;  // m^2 and m (m + x m')
  double kappa;
};

HorizonSeries horizon_series(const MasterEquation& eq, bool cosmological) {
  const auto& h = eq.horizon();
  HorizonSeries s;
  s.rh = cosmological ? h.r_plus : h.r_minus;
  s.dir = cosmological ? -1.0 : 1.0;
  const double rho = detail::convergence_radius(eq.singular_points(), s.rh);
  s.delta = std::min(0.3 * rho, 0.1 * (h.r_plus - h.r_minus));
  const std::size_t N = kMaxOrder + 2;
  Jet<double> R = Jet<double>::variable(N, s.rh);
  R[1] = s.dir;
  const Jet<double> muj = mu(eq.params(), R);
  const Jet<double> Vj = eq.V(R);
  s.m.resize(N);
  s.V.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    s.m[k] = muj[k + 1 <= N ? k + 1 : N];
    s.V[k] = Vj[k];
  }
  s.V[0] = 0.0;
  s.kappa = s.m[0] / 2.0;
  s.P.assign(N, 0.0);
  s.R.assign(N, 0.0);
  for (std::size_t k = 0; k < N; ++k)
    for (std::size_t i = 0; i <= k; ++i) {
      s.P[k] += s.m[i] * s.m[k - i];
      s.R[k] += s.m[i] * (double(k - i) + 1.0) * s.m[k - i];  // m * (x m)'
    }
  return s;
}

FrobeniusStart frobenius_eval(const HorizonSeries& s, cplx sigma, int fixed_order) {
  const cplx expo = cplx(0.0, -1.0) * sigma / s.m[0];  // -i sigma / (2 kappa)
  const int N = fixed_order > 0 ? std::min(fixed_order + 4, kMaxOrder) : kMaxOrder;
  std::vector<cplx> a(N + 1);
  a[0] = 1.0;
  const double m02 = s.m[0] * s.m[0];
  for (int n = 1; n <= N; ++n) {
    const cplx sn = expo + double(n);
    const cplx ind = m02 * double(n) * (double(n) + 2.0 * expo);
    if (std::abs(ind) < 1e-10 * m02 * n) throw IndicialDegeneracy("Frobenius recursion degenerate at order " + std::to_string(n));
    cplx acc = 0.0;
    for (int j = 1; j <= n; ++j) {
      const cplx sk = sn - double(j);
      // the sigma^2 part of S sits in the indicial factor
      acc += a[n - j] * (s.P[j] * sk * (sk - 1.0) + s.R[j] * sk - s.V[j]);
    }
    a[n] = -acc / ind;
  }
  // partial sums of x^n a_n and its derivative
  const double x = s.delta;
  auto sums = [&](int upto, cplx& f, cplx& df) {
    f = 0.0;
    df = 0.0;
    double xn = 1.0;
    for (int n = 0; n <= upto; ++n) {
      f += a[n] * xn;
      df += a[n] * (expo + double(n)) * xn;
      xn *= x;
    }
  };
  int order;
  cplx f, df;
  if (fixed_order > 0) {
    order = std::min(fixed_order, N - 4);
  } else {
    // stop once four consecutive terms are negligible
    order = N - 4;
    double xn = 1.0;
    int quiet = 0;
    cplx run = 0.0;
    for (int n = 0; n <= N - 4; ++n) {
      run += a[n] * xn;
      quiet = std::abs(a[n] * xn) < 1e-17 * std::abs(run) ? quiet + 1 : 0;
      if (quiet >= 4 && n >= 8) {
        order = n;
        break;
      }
      xn *= x;
    }
  }
  cplx f4, df4;
  sums(order, f, df);
  sums(order + 4, f4, df4);
  FrobeniusStart st;
  st.delta = x;
  st.r = s.rh + s.dir * x;
  const cplx xs = std::exp(expo * std::log(x));
  st.psi = xs * f4;
  st.dpsi = s.dir * xs * df4 / x;  // d/dr = dir d/dx
  st.exponent = expo;
  st.order = order;
  st.truncation = std::abs(f4 - f) / std::max(std::abs(f4), 1e-300);
  return st;
}

// Psi, Pi = mu Psi' along t; J/mu is written without the horizon factors.
struct WaveRhs {
  const MasterEquation& eq;
  cplx s2;
  double rm, rp, ri, rn, L;
  void operator()(const State& y, State& dy, double t) const {
    const double r = detail::r_of_t(t, rm, rp);
    const double jm = 3.0 * r * r / (L * (rp - rm) * (r - ri) * (r - rn));
    const cplx psi(y[0], y[1]), pi(y[2], y[3]);
    const cplx dpsi = jm * pi;
    const cplx dpi = jm * (eq.V(r) - s2) * psi;
    dy = {dpsi.real(), dpsi.imag(), dpi.real(), dpi.imag()};
  }
};

std::pair<cplx, cplx> integrate_impl(const MasterEquation& eq, cplx sigma, const FrobeniusStart& s, double r_end) {
  const auto& h = eq.horizon();
  const double ri = eq.params().Q2() == 0.0 ? 0.0 : h.r_inner;
  WaveRhs rhs{eq, sigma * sigma, h.r_minus, h.r_plus, ri, h.r_neg, eq.params().lambda};
  const cplx pi = mu(eq.params(), s.r) * s.dpsi;
  State y{s.psi.real(), s.psi.imag(), pi.real(), pi.imag()};
  const double t0 = detail::t_of_r(s.r, h.r_minus, h.r_plus), t1 = detail::t_of_r(r_end, h.r_minus, h.r_plus);
  y = detail::integrate(rhs, y, t0, t1);
  return {cplx(y[0], y[1]), cplx(y[2], y[3])};
}

class Solver {
public:
  explicit Solver(const MasterEquation& eq)
      : eq_(eq), ev_(horizon_series(eq, false)), co_(horizon_series(eq, true)) {
    const auto& h = eq.horizon();
    rmatch_ = 0.5 * (h.r_minus + h.r_plus);
  }
  WronskianResult W(cplx sigma, double rmatch = 0.0) const {
    const double rm = rmatch > 0.0 ? rmatch : rmatch_;
    auto a = integrate_impl(eq_, sigma, frobenius_eval(ev_, sigma, 0), rm);
    auto b = integrate_impl(eq_, sigma, frobenius_eval(co_, sigma, 0), rm);
    return {a.first * b.second - a.second * b.first,
            std::abs(a.first) * std::abs(b.second) + std::abs(a.second) * std::abs(b.first)};
  }
  const MasterEquation& eq() const { return eq_; }

private:
  const MasterEquation& eq_;
  HorizonSeries ev_, co_;
  double rmatch_;
};

}  // namespace

FrobeniusStart frobenius_solution(const RadialProblem& prob, HorizonSide side) {
  if (prob.frobenius_order != 0 && prob.frobenius_order < 4) throw UsageError("frobenius_order must be >= 4");
  auto s = horizon_series(prob.equation, side == HorizonSide::CosmologicalHorizon);
  return frobenius_eval(s, prob.sigma, prob.frobenius_order);
}

std::pair<cplx, cplx> integrate_to(const MasterEquation& eq, cplx sigma, const FrobeniusStart& s, double r_end) {
  return integrate_impl(eq, sigma, s, r_end);
}

WronskianResult wronskian_detail(const RadialProblem& prob) {
  const auto& h = prob.equation.horizon();
  if (prob.match_radius != 0.0) {
    const double d = 0.05 * (h.r_plus - h.r_minus);
    if (prob.match_radius < h.r_minus + d || prob.match_radius > h.r_plus - d)
      throw UsageError("match radius must stay 5% of (r+ - r-) away from the horizons");
  }
  Solver s(prob.equation);
  return s.W(prob.sigma, prob.match_radius);
}

cplx wronskian(const RadialProblem& prob) { return wronskian_detail(prob).W; }

// ---- argument principle ----

namespace {

struct Contour {
  const Solver& solver;
  int max_depth;
  int jobs;
  int samples = 0;
  double min_rel = 1e300;

  WronskianResult eval(cplx s) {
    ++samples;
    auto w = solver.W(s);
    if (!(std::abs(w.W) > 0.0) || !std::isfinite(w.W.real()) || !std::isfinite(w.W.imag()))
      throw ContourResolutionError("Wronskian vanished or overflowed on the contour at sigma = " + std::to_string(s.real()) + "+" +
                                   std::to_string(s.imag()) + "i");
    min_rel = std::min(min_rel, std::abs(w.W) / w.scale);
    return w;
  }

  // phase change from a to b with bisection until each step is below pi/2
  double dphase(cplx za, cplx wa, cplx zb, cplx wb, int depth) {
    const double d = std::arg(wb / wa);
    if (std::abs(d) <= M_PI / 2) return d;
    if (depth >= max_depth) throw ContourResolutionError("phase increment above pi/2 after maximal refinement");
    const cplx zm = 0.5 * (za + zb);
    const cplx wm = eval(zm).W;
    return dphase(za, wa, zm, wm, depth + 1) + dphase(zm, wm, zb, wb, depth + 1);
  }

  // total phase change along a polyline, `n` points per unit edge count
  double polyline(const std::vector<cplx>& corners, const std::vector<int>& counts) {
    std::vector<cplx> z;
    for (std::size_t e = 0; e + 1 < corners.size(); ++e)
      for (int k = 0; k < counts[e]; ++k) z.push_back(corners[e] + (corners[e + 1] - corners[e]) * (double(k) / counts[e]));
    z.push_back(corners.back());
    std::vector<cplx> w(z.size());
    std::vector<double> rel(z.size());
    parallel_for(int(z.size()), jobs, [&](int i) {
      auto r = solver.W(z[i]);
      w[i] = r.W;
      rel[i] = std::abs(r.W) / r.scale;
    });
    samples += int(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!(std::abs(w[i]) > 0.0) || !std::isfinite(std::abs(w[i])))
        throw ContourResolutionError("Wronskian vanished or overflowed on the contour");
      min_rel = std::min(min_rel, rel[i]);
    }
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < z.size(); ++i) total += dphase(z[i], w[i], z[i + 1], w[i + 1], 0);
    return total;
  }

  int winding(const Window& win, int n, bool symmetric) {
    const cplx a(win.re_lo, win.im_lo), b(win.re_hi, win.im_lo), c(win.re_hi, win.im_hi), d(win.re_lo, win.im_hi);
    double turns;
    if (symmetric) {
      const cplx b0(0.0, win.im_lo), t0(0.0, win.im_hi);
      turns = polyline({b0, b, c, t0}, {(n + 1) / 2, n, (n + 1) / 2}) / M_PI;
    } else {
      turns = polyline({a, b, c, d, a}, {n, n, n, n}) / (2.0 * M_PI);
    }
    const int w = int(std::lround(turns));
    if (std::abs(turns - w) > 0.2) throw ContourResolutionError("non-integer winding " + std::to_string(turns));
    return w;
  }
};

cplx secant(const Solver& s, cplx z0, double h) {
  cplx z1 = z0 + h, w0 = s.W(z0).W, w1 = s.W(z1).W;
  for (int it = 0; it < 60; ++it) {
    if (w1 == w0) break;
    const cplx z2 = z1 - w1 * (z1 - z0) / (w1 - w0);
    z0 = z1;
    w0 = w1;
    z1 = z2;
    w1 = s.W(z1).W;
    if (std::abs(z1 - z0) < 1e-13 * std::max(1.0, std::abs(z1))) break;
  }
  return z1;
}

void locate(Contour& C, const Window& w, int n, int count, std::vector<ZeroInfo>& out, int depth) {
  if (count <= 0) return;
  const double wr = w.re_hi - w.re_lo, wi = w.im_hi - w.im_lo;
  if (count == 1) {
    const cplx c(0.5 * (w.re_lo + w.re_hi), 0.5 * (w.im_lo + w.im_hi));
    const cplx z = secant(C.solver, c, 0.05 * std::min(wr, wi));
    const bool inside = z.real() >= w.re_lo && z.real() <= w.re_hi && z.imag() >= w.im_lo && z.imag() <= w.im_hi;
    if (inside || depth > 8) {
      auto r = C.solver.W(z);
      out.push_back({z, std::abs(r.W) / r.scale});
      return;
    }
  }
  if (depth > 8) throw ContourResolutionError("zero localisation did not separate zeros");
  const double xm = w.re_lo + 0.5 * wr, ym = w.im_lo + 0.5 * wi;
  const Window q[4] = {{w.re_lo, xm, w.im_lo, ym}, {xm, w.re_hi, w.im_lo, ym}, {w.re_lo, xm, ym, w.im_hi}, {xm, w.re_hi, ym, w.im_hi}};
  for (const auto& s : q) locate(C, s, std::max(32, n / 2), C.winding(s, std::max(32, n / 2), false), out, depth + 1);
}

}  // namespace

nlohmann::ordered_json ResonanceReport::to_json() const {
  nlohmann::ordered_json j;
  j["window"] = {window.re_lo, window.re_hi, window.im_lo, window.im_hi};
  j["winding"] = winding;
  j["zeros"] = nlohmann::ordered_json::array();
  for (auto& z : zeros) j["zeros"].push_back({{"re", z.sigma.real()}, {"im", z.sigma.imag()}, {"residual", z.residual}});
  j["samples_on_contour"] = samples_on_contour;
  j["min_rel_abs_w"] = min_rel_abs_w;
  return j;
}

ResonanceReport count_resonances(const MasterEquation& eq, const Window& w, int contour_points, const ContourOptions& opt) {
  if (contour_points < 64) throw UsageError("contour_points must be >= 64");
  if (!(w.re_hi > w.re_lo) || !(w.im_hi > w.im_lo)) throw UsageError("empty window");
  // the a0 = 1 normalisation has poles at sigma = -i n kappa_{-,+}
  for (double k : {eq.horizon().kappa_minus, eq.horizon().kappa_plus})
    if (w.re_lo <= 0.0 && w.re_hi >= 0.0 && w.im_lo <= -k * (1.0 - 1e-9))
      throw UsageError("window reaches the normalisation pole at sigma = -i kappa = -" + std::to_string(k) + "i");
  Solver s(eq);
  Contour C{s, opt.max_depth, opt.jobs};
  const bool sym = opt.use_symmetry && std::abs(w.re_lo + w.re_hi) <= 1e-14 * std::abs(w.re_hi);
  ResonanceReport rep;
  rep.window = w;
  rep.winding = C.winding(w, contour_points, sym);
  if (opt.refine_zeros && rep.winding > 0) locate(C, w, contour_points, rep.winding, rep.zeros, 0);
  std::sort(rep.zeros.begin(), rep.zeros.end(), [](auto& a, auto& b) {
    return a.sigma.real() != b.sigma.real() ? a.sigma.real() < b.sigma.real() : a.sigma.imag() < b.sigma.imag();
  });
  rep.samples_on_contour = C.samples;
  rep.min_rel_abs_w = C.min_rel;
  return rep;
}

Window default_scan_window(const BlackHoleParams& p) {
  const double k = horizons(p).kappa_plus;
  return {-3.0 * k, 3.0 * k, 1e-3 * k, 3.0 * k};
}

bool ScanResult::stable() const {
  return std::all_of(entries.begin(), entries.end(), [](auto& e) { return e.report.winding == 0; });
}

nlohmann::ordered_json params_json(const BlackHoleParams& p) {
  return {{"lambda", p.lambda}, {"mass", p.mass}, {"charge_e", p.charge_e}, {"charge_m", p.charge_m},
          {"spin", {p.spin[0], p.spin[1], p.spin[2]}}};
}

nlohmann::ordered_json ScanResult::to_json(const BlackHoleParams& p) const {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (auto& e : entries) {
    nlohmann::ordered_json r;
    r["params"] = params_json(p);
    r["sector"] = e.sector;
    r["l"] = e.l;
    r["branch"] = e.branch;
    auto rep = e.report.to_json();
    for (auto it = rep.begin(); it != rep.end(); ++it) r[it.key()] = it.value();
    j.push_back(r);
  }
  return j;
}

ScanResult mode_stability_scan(const BlackHoleParams& p, const std::vector<SectorKind>& sectors, int l_max,
                               const Window& w, int contour_points, const ContourOptions& opt) {
  ScanResult out;
  if (sectors.empty()) return out;
  const Verdict v = classify_nondegenerate(p.lambda, p.mass, p.Q());
  if (!v.nondegenerate) throw DegenerateError("mode_stability_scan: " + v.reason);
  for (SectorKind k : sectors) {
    std::vector<std::pair<int, BranchKind>> jobs;
    if (k == SectorKind::ScalarHigh || k == SectorKind::ScalarDipole) {
      for (int l = 2; l <= l_max; ++l)
        for (auto b : {BranchKind::Plus, BranchKind::Minus}) jobs.push_back({l, b});
    } else if (k == SectorKind::VectorHigh || k == SectorKind::VectorDipole) {
      if (l_max >= 1) jobs.push_back({1, BranchKind::Plus});
      for (int l = 2; l <= l_max; ++l)
        for (auto b : {BranchKind::Plus, BranchKind::Minus}) jobs.push_back({l, b});
    } else {
      throw UsageError("mode_stability_scan: spherical sector has no master equation to scan");
    }
    for (auto [l, b] : jobs) {
      ModeSector sec = (k == SectorKind::ScalarHigh || k == SectorKind::ScalarDipole) ? ModeSector::scalar(l) : ModeSector::vector(l);
      MasterEquation eq(p, sec, {b});
      try {
        out.entries.push_back({sec.name(), l, Branch{b}.name(), count_resonances(eq, w, contour_points, opt)});
      } catch (const ContourResolutionError& e) {
        throw ContourResolutionError(std::string(e.what()) + " [sector " + sec.name() + ", l " + std::to_string(l) +
                                     ", branch " + Branch{b}.name() + "]");
      }
    }
  }
  return out;
}

}  // namespace knds
