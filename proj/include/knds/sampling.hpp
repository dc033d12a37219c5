#pragma once
// Reproducible draws of nondegenerate (Lambda, M, Q) for tests and acceptance.
#include <cstdint>
#include <random>

#include "knds/spacetime.hpp"

namespace knds {

class ParamSampler {
public:
  explicit ParamSampler(std::uint64_t seed) : rng_(seed) {}

  // uniform in [a, b); the mapping from raw bits is fixed so draws are
  // identical with any standard library
  double uniform(double a, double b) { return a + (b - a) * double(rng_() >> 11) * 0x1.0p-53; }

  // M in [0.5, 2], Q/Qmax in [0, 0.9], Lambda strictly inside its interval
  BlackHoleParams draw();
  // Q slightly above M and Lambda near its lower bound: r- close to the inner horizon
  BlackHoleParams near_extremal();
  // same distribution with a magnetic part (Qe, Qm) at a random duality angle
  BlackHoleParams draw_dyonic();

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

}  // namespace knds
