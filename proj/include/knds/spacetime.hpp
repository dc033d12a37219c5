#pragma once
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "knds/errors.hpp"
#include "knds/jet.hpp"

namespace knds {

struct BlackHoleParams {
  double lambda = 0.0;
  double mass = 0.0;
  std::array<double, 3> spin{0.0, 0.0, 0.0};
  double charge_e = 0.0;
  double charge_m = 0.0;

  BlackHoleParams() = default;
  BlackHoleParams(double lam, double m, double qe, double qm = 0.0,
                  std::array<double, 3> a = {0.0, 0.0, 0.0})
      : lambda(lam), mass(m), spin(a), charge_e(qe), charge_m(qm) {
    if (!(lam > 0.0)) throw DomainError("lambda must be positive");
    if (!(m > 0.0)) throw DomainError("mass must be positive");
  }
  // magnetic duality: only Qe^2 + Qm^2 enters the metric
  double Q2() const { return charge_e * charge_e + charge_m * charge_m; }
  double Q() const { return std::sqrt(Q2()); }
  double a() const { return std::sqrt(spin[0] * spin[0] + spin[1] * spin[1] + spin[2] * spin[2]); }
};

// mu = 1 - 2M/r - Lambda r^2/3 + Q^2/r^2
template <class T>
T mu(const BlackHoleParams& p, const T& r) {
  return 1.0 - 2.0 * p.mass / r - (p.lambda / 3.0) * r * r + p.Q2() / (r * r);
}
double mu_checked(const BlackHoleParams& p, double r);
double mu_prime(const BlackHoleParams& p, double r);
double mu_second(const BlackHoleParams& p, double r);

struct Verdict {
  bool nondegenerate = false;
  std::string reason;  // empty when nondegenerate
};

// closed-form bounds; lower is 0 unless M > sqrt(D)
struct LambdaBounds {
  double D, lower, upper;
};
LambdaBounds lambda_bounds(double mass, double charge);

Verdict classify_nondegenerate(double lambda, double mass, double charge);
// Independent verdict from the root structure of the quartic r^2 mu.
Verdict classify_bruteforce(double lambda, double mass, double charge);

// eigenvalues of the companion matrix of the monic quartic r^2 mu * (-3/Lambda)
std::array<std::complex<double>, 4> quartic_roots(const BlackHoleParams& p);

struct HorizonData {
  double r_inner, r_minus, r_plus, r_neg;  // r_neg: the negative root
  double r_crit_1, r_crit_2, r_mu_max;
  double kappa_minus, kappa_plus;
  bool nondegenerate;
  double r_photon() const { return r_crit_2; }
};

HorizonData horizons(const BlackHoleParams& p);

// Everywhere-timelike t* gauge: nu = -(r - r_c) sqrt(q(r)) / r where
// r^2 (1 - c^2 mu) = (r - r_c)^2 q(r).
class StarGauge {
public:
  explicit StarGauge(const BlackHoleParams& p);
  StarGauge(const BlackHoleParams& p, const HorizonData& h);

  double c_squared() const { return c2_; }
  double r_c() const { return rc_; }
  const HorizonData& horizon() const { return h_; }

  template <class T>
  T nu(const T& r) const {
    using std::sqrt;
    T q = (q2_ * r + q1_) * r + q0_;
    return -1.0 * (r - rc_) * sqrt(q) / r;
  }
  double nu_prime(double r) const;
  double T_prime(double r) const;  // nu = -mu T'
  // nu = -(r - r_c) sqrt(q2 r^2 + q1 r + q0) / r
  std::array<double, 3> q_coeffs() const { return {q2_, q1_, q0_}; }

private:
  BlackHoleParams p_;
  HorizonData h_;
  double c2_, rc_, q2_, q1_, q0_;
};

StarGauge star_gauge(const BlackHoleParams& p);
// r^{-2} (r^2 nu)'
double box_tstar(const StarGauge& g, double r);
double box_tstar(const BlackHoleParams& p, double r);
// 4 pi \int_{r-}^{r+} box_tstar r^2 dr by adaptive Gauss-Kronrod
double box_tstar_horizon_integral(const BlackHoleParams& p, double* error_estimate = nullptr);

struct TrappedExpansion {
  Eigen::Matrix2d matrix;  // [[0, mu^-2 r^2 (r^-2 mu)''], [-2 mu, 0]] at r_P
  double rate;             // positive eigenvalue
};
TrappedExpansion trapped_expansion(const BlackHoleParams& p);
double trapped_expansion_rate(const BlackHoleParams& p);

// slowly rotating horizons: zeros of (r^2+a^2)(1-Lambda r^2/3) - 2Mr + (1+lambda_b)^2 Q^2
template <class T>
T mu_tilde_knds(const BlackHoleParams& p, double a, const T& r) {
  const double lb = p.lambda * a * a / 3.0;
  return (r * r + a * a) * (1.0 - (p.lambda / 3.0) * r * r) - 2.0 * p.mass * r +
         (1.0 + lb) * (1.0 + lb) * p.Q2();
}
std::pair<double, double> knds_horizons(const BlackHoleParams& p);

}  // namespace knds
