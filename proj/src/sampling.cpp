#include "knds/sampling.hpp"

#include <cmath>

namespace knds {

namespace {
// 9M^2 - 8Q^2 > 0, i.e. Q < 3M / (2 sqrt 2)
double q_max(double m) { return 3.0 * m / (2.0 * std::sqrt(2.0)); }
}  // namespace

BlackHoleParams ParamSampler::draw() {
  const double m = uniform(0.5, 2.0);
  const double q = uniform(0.0, 0.9) * q_max(m);
  const LambdaBounds b = lambda_bounds(m, q);
  const double lam = b.lower + uniform(0.05, 0.95) * (b.upper - b.lower);
  return BlackHoleParams(lam, m, q);
}

BlackHoleParams ParamSampler::near_extremal() {
  const double m = uniform(0.5, 2.0);
  // for Q > M the lower Lambda bound is where r- meets the inner horizon
  const double q = uniform(1.0, 1.04) * m;
  const LambdaBounds b = lambda_bounds(m, q);
  const double lam = b.lower + uniform(0.01, 0.03) * (b.upper - b.lower);
  return BlackHoleParams(lam, m, q);
}

BlackHoleParams ParamSampler::draw_dyonic() {
  BlackHoleParams p = draw();
  const double th = uniform(0.0, 2.0 * M_PI);
  const double q = p.charge_e;
  return BlackHoleParams(p.lambda, p.mass, q * std::cos(th), q * std::sin(th));
}

}  // namespace knds
