// l = 0 radial problem for the constraint-damped wave operator
//   P v = mu v'' + (mu' + 2mu/r + (gamma - 2 i sigma) nu) v'
//         + (c^2 sigma^2 - i sigma S + gamma S + i gamma sigma c^2) v,   S = box t*
// Both horizon solutions are taken on the smooth Frobenius branch.
#include <cmath>

#include "knds/resonance.hpp"
#include "resonance_internal.hpp"

namespace knds {

using detail::State;

cplx DampingOperator::B(double r) const {
  return mu_prime(params, r) + 2.0 * mu(params, r) / r + (gamma - cplx(0.0, 2.0) * sigma) * gauge.nu(r);
}

cplx DampingOperator::C(double r) const {
  const double c2 = gauge.c_squared(), S = box_tstar(gauge, r);
  const cplx I(0.0, 1.0);
  return c2 * sigma * sigma - I * sigma * S + gamma * S + I * gamma * sigma * c2;
}

namespace {

constexpr int kOrder = 80;

struct DampingSeries {
  double rh, dir, delta;
  std::vector<double> m, b0, nu, S;  // x-series of mu/x, dir (mu' + 2mu/r), dir nu, box t*
};

DampingSeries damping_series(const BlackHoleParams& p, const StarGauge& g, bool cosmological) {
  const auto& h = g.horizon();
  DampingSeries s;
  s.rh = cosmological ? h.r_plus : h.r_minus;
  s.dir = cosmological ? -1.0 : 1.0;
  std::vector<cplx> sing{0.0, h.r_minus, h.r_plus, h.r_neg};
  if (p.Q2() > 0.0) sing.push_back(h.r_inner);
  const auto q = g.q_coeffs();
  if (q[0] != 0.0 || q[1] != 0.0 || q[2] != 0.0) {
    if (q[2] != 0.0) {
      const cplx disc = std::sqrt(cplx(q[1] * q[1] - 4.0 * q[2] * q[0]));
      sing.push_back((-q[1] + disc) / (2.0 * q[2]));
      sing.push_back((-q[1] - disc) / (2.0 * q[2]));
    } else if (q[1] != 0.0) {
      sing.push_back(-q[0] / q[1]);
    }
  }
  const double rho = detail::convergence_radius(sing, s.rh);
  s.delta = std::min(0.3 * rho, 0.1 * (h.r_plus - h.r_minus));
  const std::size_t N = kOrder + 2;
  Jet<double> R = Jet<double>::variable(N, s.rh);
  R[1] = s.dir;
  const Jet<double> muj = mu(p, R);
  const Jet<double> nuj = g.nu(R);
  // d/dr = dir d/dx
  const Jet<double> mup = s.dir * muj.diff();
  const Jet<double> b = s.dir * (mup + 2.0 * muj / R);
  const Jet<double> S = s.dir * nuj.diff() + 2.0 * nuj / R;
  s.m.resize(N);
  s.b0.resize(N);
  s.nu.resize(N);
  s.S.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    s.m[k] = muj[k + 1];
    s.b0[k] = b[k];
    s.nu[k] = s.dir * nuj[k];
    s.S[k] = S[k];
  }
  return s;
}

// smooth solution v = sum a_n x^n, returned as (r, v, mu v')
struct Start {
  double r;
  cplx v, w;
};

Start damping_start(const BlackHoleParams& p, const StarGauge& g, const DampingSeries& s, double gamma, cplx sigma) {
  const cplx I(0.0, 1.0);
  const cplx kb = gamma - 2.0 * I * sigma;
  const cplx c0 = g.c_squared() * sigma * sigma + I * gamma * sigma * g.c_squared();
  const cplx kS = gamma - I * sigma;
  std::vector<cplx> a(kOrder + 1);
  a[0] = 1.0;
  for (int n = 1; n <= kOrder; ++n) {
    cplx acc = 0.0;
    for (int j = 1; j <= n; ++j) {
      const double k = n - j;
      const cplx Rj = s.b0[j] + kb * s.nu[j];
      acc += a[n - j] * (s.m[j] * k * (k - 1.0) + Rj * k);
      acc += a[n - j] * (kS * s.S[j - 1] + (j == 1 ? c0 : cplx(0.0)));
    }
    const cplx R0 = s.b0[0] + kb * s.nu[0];
    const cplx ind = double(n) * (s.m[0] * double(n - 1) + R0);
    if (std::abs(ind) < 1e-12 * n * s.m[0]) throw IndicialDegeneracy("damping recursion degenerate at order " + std::to_string(n));
    a[n] = -acc / ind;
  }
  const double x = s.delta;
  cplx v = 0.0, dv = 0.0;
  double xn = 1.0;
  for (int n = 0; n <= kOrder; ++n) {
    v += a[n] * xn;
    if (n + 1 <= kOrder) dv += double(n + 1) * a[n + 1] * xn;
    xn *= x;
  }
  const double r = s.rh + s.dir * x;
  return {r, v, mu(p, r) * s.dir * dv};
}

struct DampingRhs {
  const BlackHoleParams& p;
  const StarGauge& g;
  double gamma;
  cplx sigma;
  double rm, rp, ri, rn;
  void operator()(const State& y, State& dy, double t) const {
    const double r = detail::r_of_t(t, rm, rp);
    const double jm = 3.0 * r * r / (p.lambda * (rp - rm) * (r - ri) * (r - rn));
    const double J = jm * mu(p, r);
    const cplx v(y[0], y[1]), w(y[2], y[3]);
    const cplx I(0.0, 1.0);
    const double S = box_tstar(g, r), c2 = g.c_squared();
    const cplx C = c2 * sigma * sigma - I * sigma * S + gamma * S + I * gamma * sigma * c2;
    const cplx dv = jm * w;
    const cplx dw = -(2.0 / r) * J * w - (gamma - 2.0 * I * sigma) * g.nu(r) * jm * w - J * C * v;
    dy = {dv.real(), dv.imag(), dw.real(), dw.imag()};
  }
};

class DampingSolver {
public:
  explicit DampingSolver(const BlackHoleParams& p)
      : p_(p), g_(p), ev_(damping_series(p, g_, false)), co_(damping_series(p, g_, true)) {}

  std::pair<cplx, double> D(double gamma, cplx sigma) const {
    const auto& h = g_.horizon();
    const double rmatch = 0.5 * (h.r_minus + h.r_plus);
    const double ri = p_.Q2() == 0.0 ? 0.0 : h.r_inner;
    DampingRhs rhs{p_, g_, gamma, sigma, h.r_minus, h.r_plus, ri, h.r_neg};
    auto run = [&](const DampingSeries& s) {
      Start st = damping_start(p_, g_, s, gamma, sigma);
      State y{st.v.real(), st.v.imag(), st.w.real(), st.w.imag()};
      y = detail::integrate(rhs, y, detail::t_of_r(st.r, h.r_minus, h.r_plus), detail::t_of_r(rmatch, h.r_minus, h.r_plus));
      return std::pair<cplx, cplx>{cplx(y[0], y[1]), cplx(y[2], y[3])};
    };
    auto a = run(ev_);
    auto b = run(co_);
    const double scale = std::abs(a.first) * std::abs(b.second) + std::abs(a.second) * std::abs(b.first) +
                         std::abs(a.first) * std::abs(b.first) * mu(p_, rmatch) / rmatch;
    return {a.first * b.second - a.second * b.first, scale};
  }

private:
  BlackHoleParams p_;
  StarGauge g_;
  DampingSeries ev_, co_;
};

}  // namespace

cplx damping_wronskian(const BlackHoleParams& p, double gamma3, cplx sigma) {
  return DampingSolver(p).D(gamma3, sigma).first;
}

DampingResult constraint_damping_resonance_detail(const BlackHoleParams& p, double gamma3) {
  const Verdict v = classify_nondegenerate(p.lambda, p.mass, p.Q());
  if (!v.nondegenerate) throw DegenerateError("constraint damping: " + v.reason);
  if (!std::isfinite(gamma3) || std::abs(gamma3) > 0.2) throw DomainError("constraint damping: need |gamma3| <= 0.2");
  DampingSolver S(p);
  DampingResult res{0.0, 0, 0.0};
  if (gamma3 == 0.0) {
    auto d = S.D(0.0, 0.0);
    res.residual = std::abs(d.first) / std::max(d.second, 1e-300);
    return res;
  }
  const int steps = std::max(1, int(std::ceil(std::abs(gamma3) / 0.005)));
  // (gamma, sigma) path starting at the exact zero sigma(0) = 0
  std::vector<double> gs{0.0};
  std::vector<cplx> zs{0.0};
  cplx cur = 0.0;
  for (int k = 1; k <= steps; ++k) {
    const double g = gamma3 * k / steps;
    // first step from sigma ~ -i gamma, then linear extrapolation
    const std::size_t n = zs.size();
    cplx z0 = n < 2 ? cplx(0.0, -g) : zs[n - 1] + (zs[n - 1] - zs[n - 2]) * ((g - gs[n - 1]) / (gs[n - 1] - gs[n - 2]));
    cplx z1 = z0 + cplx(0.0, 0.05 * std::abs(g));
    cplx d0 = S.D(g, z0).first, d1 = S.D(g, z1).first;
    bool ok = false;
    for (int it = 0; it < 50; ++it) {
      ++res.iterations;
      if (d1 == d0) {
        ok = std::abs(z1 - z0) < 1e-12;
        break;
      }
      const cplx z2 = z1 - d1 * (z1 - z0) / (d1 - d0);
      z0 = z1;
      d0 = d1;
      z1 = z2;
      d1 = S.D(g, z1).first;
      if (!std::isfinite(std::abs(z1))) break;
      if (std::abs(z1 - z0) < 1e-13 * std::max(std::abs(z1), 1e-3)) {
        ok = true;
        break;
      }
    }
    if (!ok) throw ContinuationError("constraint damping: secant did not converge at gamma3 = " + std::to_string(g));
    gs.push_back(g);
    zs.push_back(z1);
    cur = z1;
  }
  auto d = S.D(gamma3, cur);
  res.sigma = cur;
  res.residual = std::abs(d.first) / std::max(d.second, 1e-300);
  return res;
}

cplx constraint_damping_resonance(const BlackHoleParams& p, double gamma3) {
  return constraint_damping_resonance_detail(p, gamma3).sigma;
}

}  // namespace knds
