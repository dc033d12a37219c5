#include "knds/spacetime.hpp"

#include <algorithm>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace knds {

double mu_checked(const BlackHoleParams& p, double r) {
  if (!(r > 0.0)) throw DomainError("mu: r must be positive");
  return mu(p, r);
}

double mu_prime(const BlackHoleParams& p, double r) {
  return 2.0 * p.mass / (r * r) - 2.0 * p.lambda * r / 3.0 - 2.0 * p.Q2() / (r * r * r);
}

double mu_second(const BlackHoleParams& p, double r) {
  const double r2 = r * r;
  return -4.0 * p.mass / (r2 * r) - 2.0 * p.lambda / 3.0 + 6.0 * p.Q2() / (r2 * r2);
}

LambdaBounds lambda_bounds(double mass, double charge) {
  LambdaBounds b{9.0 * mass * mass - 8.0 * charge * charge, 0.0, 0.0};
  if (b.D <= 0.0) return b;
  const double s = std::sqrt(b.D);
  b.upper = 6.0 * (mass + s) / std::pow(3.0 * mass + s, 3);
  // at Q = 0 the lower expression is 0/0; its limit is the trivial bound 0
  if (mass > s) b.lower = 6.0 * (mass - s) / std::pow(3.0 * mass - s, 3);
  return b;
}

Verdict classify_nondegenerate(double lambda, double mass, double charge) {
  if (!(lambda > 0.0) || !(mass > 0.0)) throw DomainError("classify: lambda and mass must be positive");
  const LambdaBounds b = lambda_bounds(mass, charge);
  if (!(b.D > 0.0)) return {false, "D = 9M^2 - 8Q^2 <= 0"};
  if (!(lambda > b.lower)) return {false, "Lambda <= lower bound"};
  if (!(lambda < b.upper)) return {false, "Lambda >= upper bound"};
  return {true, ""};
}

namespace {

std::array<std::complex<double>, 4> companion_roots(double lambda, double mass, double q2) {
  // -3/Lambda * r^2 mu = r^4 - (3/Lambda) r^2 + (6M/Lambda) r - 3Q^2/Lambda
  Eigen::Matrix4d C = Eigen::Matrix4d::Zero();
  const double c0 = -3.0 * q2 / lambda, c1 = 6.0 * mass / lambda, c2 = -3.0 / lambda, c3 = 0.0;
  C(1, 0) = C(2, 1) = C(3, 2) = 1.0;
  C(0, 3) = -c0;
  C(1, 3) = -c1;
  C(2, 3) = -c2;
  C(3, 3) = -c3;
  Eigen::EigenSolver<Eigen::Matrix4d> es(C, false);
  std::array<std::complex<double>, 4> out;
  for (int i = 0; i < 4; ++i) out[i] = es.eigenvalues()[i];
  std::sort(out.begin(), out.end(), [](auto a, auto b) { return a.real() < b.real(); });
  return out;
}

// Newton on p(r) = r^2 mu(r) (a polynomial)
double polish(const BlackHoleParams& p, double r) {
  for (int it = 0; it < 30; ++it) {
    const double f = r * r - 2.0 * p.mass * r - (p.lambda / 3.0) * r * r * r * r + p.Q2();
    const double df = 2.0 * r - 2.0 * p.mass - (4.0 * p.lambda / 3.0) * r * r * r;
    if (df == 0.0) break;
    const double dr = f / df;
    r -= dr;
    if (std::abs(dr) <= 1e-16 * std::max(1.0, std::abs(r))) break;
  }
  return r;
}

}  // namespace

std::array<std::complex<double>, 4> quartic_roots(const BlackHoleParams& p) {
  return companion_roots(p.lambda, p.mass, p.Q2());
}

Verdict classify_bruteforce(double lambda, double mass, double charge) {
  if (!(lambda > 0.0) || !(mass > 0.0)) throw DomainError("classify: lambda and mass must be positive");
  const double q2 = charge * charge;
  auto z = companion_roots(lambda, mass, q2);
  const double scale = std::sqrt(3.0 / lambda);
  constexpr double tol = 1e-6;
  std::vector<double> real;
  for (auto& w : z)
    if (std::abs(w.imag()) <= tol * scale) real.push_back(w.real());
  std::sort(real.begin(), real.end());
  // a near-real pair (complex or not) signals a multiple root
  for (std::size_t i = 0; i + 1 < real.size(); ++i)
    if (std::abs(real[i + 1] - real[i]) <= tol * scale) return {false, "multiple root"};
  std::vector<double> pos;
  for (double r : real)
    if (r > tol * scale) pos.push_back(r);
  if (pos.size() < 2) return {false, "fewer than two positive roots"};
  const double rm = pos[pos.size() - 2], rp = pos.back();
  BlackHoleParams p(lambda, mass, charge);
  if (!(mu(p, 0.5 * (rm + rp)) > 0.0)) return {false, "mu not positive between top roots"};
  // (r^-2 mu)' = -2 r^-5 (r^2 - 3 M r + 2 Q^2)
  const double d = 9.0 * mass * mass - 8.0 * q2;
  if (!(d > 0.0)) return {false, "no nondegenerate critical point of r^-2 mu"};
  const double s = std::sqrt(d);
  int inside = 0;
  for (double c : {(3.0 * mass - s) / 2.0, (3.0 * mass + s) / 2.0})
    if (c > rm && c < rp) ++inside;
  if (inside != 1) return {false, "critical point count of r^-2 mu between top roots is not one"};
  return {true, ""};
}

HorizonData horizons(const BlackHoleParams& p) {
  const Verdict v = classify_nondegenerate(p.lambda, p.mass, p.Q());
  if (!v.nondegenerate) throw DegenerateError("horizons: " + v.reason);
  auto z = quartic_roots(p);
  std::array<double, 4> r{};
  for (int i = 0; i < 4; ++i) r[i] = polish(p, z[i].real());
  std::sort(r.begin(), r.end());
  HorizonData h{};
  h.r_neg = r[0];
  h.r_inner = p.Q2() == 0.0 ? 0.0 : r[1];
  h.r_minus = r[2];
  h.r_plus = r[3];
  const double s = std::sqrt(9.0 * p.mass * p.mass - 8.0 * p.Q2());
  h.r_crit_1 = (3.0 * p.mass - s) / 2.0;
  h.r_crit_2 = (3.0 * p.mass + s) / 2.0;
  h.kappa_minus = std::abs(mu_prime(p, h.r_minus)) / 2.0;
  h.kappa_plus = std::abs(mu_prime(p, h.r_plus)) / 2.0;
  h.nondegenerate = true;

  const bool q0 = p.Q2() == 0.0;
  const bool ordered = (q0 ? (h.r_inner == 0.0 && h.r_crit_1 == 0.0) : (0.0 < h.r_inner && h.r_inner < h.r_crit_1)) &&
                       h.r_crit_1 < h.r_minus && h.r_minus < h.r_crit_2 && h.r_crit_2 < h.r_plus && h.r_neg < 0.0;
  if (!ordered) throw NumericalError("horizons: root ordering violated after polish");
  if (!(mu_prime(p, h.r_minus) > 0.0) || !(mu_prime(p, h.r_plus) < 0.0))
    throw NumericalError("horizons: wrong sign of mu' at a horizon");

  // maximiser of mu: Lambda r^4 - 3 M r + 3 Q^2 = 0, mu' changes sign once
  auto f = [&](double x) { return mu_prime(p, x); };
  boost::uintmax_t iters = 200;
  auto br = boost::math::tools::toms748_solve(f, h.r_minus, h.r_plus, boost::math::tools::eps_tolerance<double>(52), iters);
  h.r_mu_max = 0.5 * (br.first + br.second);
  return h;
}

StarGauge::StarGauge(const BlackHoleParams& p) : StarGauge(p, horizons(p)) {}

StarGauge::StarGauge(const BlackHoleParams& p, const HorizonData& h) : p_(p), h_(h) {
  rc_ = h.r_mu_max;
  c2_ = 1.0 / mu(p, rc_);
  // p(r) = r^2 (1 - c^2 mu) = (c^2 L/3) r^4 + (1 - c^2) r^2 + 2 M c^2 r - c^2 Q^2, divided by (r - r_c)^2
  const double p4 = c2_ * p.lambda / 3.0, p2 = 1.0 - c2_;
  q2_ = p4;
  q1_ = 2.0 * rc_ * q2_;
  q0_ = p2 + 2.0 * rc_ * q1_ - rc_ * rc_ * q2_;
}

double StarGauge::nu_prime(double r) const { return nu(Jet<double>::variable(1, r))[1]; }

double StarGauge::T_prime(double r) const { return -nu(r) / mu(p_, r); }

StarGauge star_gauge(const BlackHoleParams& p) { return StarGauge(p); }

double box_tstar(const StarGauge& g, double r) {
  const auto& h = g.horizon();
  const double slack = 1e-12 * h.r_plus;
  if (r < h.r_minus - slack || r > h.r_plus + slack) throw DomainError("box_tstar: r outside [r-, r+]");
  return g.nu_prime(r) + 2.0 * g.nu(r) / r;
}

double box_tstar(const BlackHoleParams& p, double r) { return box_tstar(StarGauge(p), r); }

double box_tstar_horizon_integral(const BlackHoleParams& p, double* error_estimate) {
  StarGauge g(p);
  const auto& h = g.horizon();
  auto f = [&](double r) { return box_tstar(g, r) * r * r; };
  double err = 0.0;
  const double I = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, h.r_minus, h.r_plus, 15, 1e-14, &err);
  if (error_estimate) *error_estimate = 4.0 * M_PI * err;
  return 4.0 * M_PI * I;
}

TrappedExpansion trapped_expansion(const BlackHoleParams& p) {
  const HorizonData h = horizons(p);
  const double rP = h.r_photon();
  auto F = mu(p, Jet<double>::variable(2, rP)) / (Jet<double>::variable(2, rP) * Jet<double>::variable(2, rP));
  const double F2 = F.derivative(2);
  const double m = mu(p, rP);
  if (!(F2 < 0.0)) throw NumericalError("trapped_expansion: (r^-2 mu)'' >= 0 at the photon sphere");
  TrappedExpansion t;
  t.matrix << 0.0, rP * rP * F2 / (m * m), -2.0 * m, 0.0;
  t.rate = std::sqrt(-2.0 * rP * rP * F2 / m);
  return t;
}

double trapped_expansion_rate(const BlackHoleParams& p) { return trapped_expansion(p).rate; }

std::pair<double, double> knds_horizons(const BlackHoleParams& p) {
  const HorizonData h = horizons(p);
  const double a_target = p.a();
  double rm = h.r_minus, rp = h.r_plus;
  if (a_target == 0.0) return {rm, rp};
  auto newton = [&](double a, double r) {
    for (int it = 0; it < 50; ++it) {
      auto f = mu_tilde_knds(p, a, Jet<double>::variable(1, r));
      if (f[1] == 0.0) throw SpinTooLarge("knds_horizons: vanishing derivative");
      const double dr = f[0] / f[1];
      r -= dr;
      if (!std::isfinite(r)) throw SpinTooLarge("knds_horizons: Newton diverged");
      if (std::abs(dr) <= 1e-15 * std::abs(r)) return r;
    }
    throw SpinTooLarge("knds_horizons: Newton did not converge");
  };
  const int steps = 32;
  for (int k = 1; k <= steps; ++k) {
    const double a = a_target * k / steps;
    const double nm = newton(a, rm), np = newton(a, rp);
    // continuation must stay on the same branch
    if (std::abs(nm - rm) > 0.25 * (rp - rm) || std::abs(np - rp) > 0.25 * (rp - rm) || !(nm < np) || !(nm > 0.0))
      throw SpinTooLarge("knds_horizons: continuation left the horizon branch");
    rm = nm;
    rp = np;
  }
  // horizons must stay simple with the right signs
  const double dm = mu_tilde_knds(p, a_target, Jet<double>::variable(1, rm))[1];
  const double dp = mu_tilde_knds(p, a_target, Jet<double>::variable(1, rp))[1];
  if (!(dm > 0.0) || !(dp < 0.0)) throw SpinTooLarge("knds_horizons: horizons merged");
  return {rm, rp};
}

}  // namespace knds
