#pragma once
// Shared pieces of the resonance and damping solvers.
#include <array>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "knds/resonance.hpp"

namespace knds::detail {

using State = std::array<double, 4>;

inline constexpr double kRtol = 1e-10, kAtol = 1e-14;

// r(t) with t = log((r - r-)/(r+ - r)), computed on the side that keeps precision
inline double r_of_t(double t, double rm, double rp) {
  const double d = rp - rm;
  return t < 0 ? rm + d / (1.0 + std::exp(-t)) : rp - d / (1.0 + std::exp(t));
}
inline double t_of_r(double r, double rm, double rp) { return std::log((r - rm) / (rp - r)); }

// Radius of convergence of a series centred at rh: distance to the nearest
// other singular point.
inline double convergence_radius(const std::vector<cplx>& sing, double rh) {
  double rho = 1e300;
  for (auto s : sing) {
    const double d = std::abs(s - rh);
    if (d > 1e-12 * std::max(1.0, rh)) rho = std::min(rho, d);
  }
  return rho;
}

template <class Rhs>
State integrate(Rhs&& rhs, State x, double t0, double t1) {
  using namespace boost::numeric::odeint;
  auto stepper = make_controlled<runge_kutta_fehlberg78<State>>(kAtol, kRtol);
  const double dt = (t1 > t0 ? 1.0 : -1.0) * 1e-2;
  integrate_adaptive(stepper, rhs, x, t0, t1, dt);
  return x;
}

}  // namespace knds::detail
