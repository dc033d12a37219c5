#pragma once
// Spherically symmetric Einstein-Maxwell initial data: charges, duality
// rotation, constraint residuals, and the conformal-method solver
//   h = phi^4 h0,  k = H h + phi^-2 (Q0 + Qt + D V),  E = phi^-2 (E0 + Et),  B = phi^-2 (B0 + Bt)
// on an interval [r_<, r_>] with Neumann conditions at both ends.
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "knds/spacetime.hpp"

namespace knds {

// h = h_rr dr^2 + h_sphere (round metric), k likewise, E = E_r dr, B = B_r dr
struct RadialDataSet {
  std::vector<double> grid, h_rr, h_sphere, k_rr, k_sphere, E_r, B_r;

  int size() const { return int(grid.size()); }
  // h_rr, h_sphere > 0, grid strictly increasing, equal lengths
  void validate() const;
  nlohmann::ordered_json to_json() const;
  static RadialDataSet from_json(const nlohmann::json& j);
};

// static slice of RNdS on [r- + margin*(r+ - r-), r+ - margin*(r+ - r-)],
// n Chebyshev-Lobatto nodes. E and B carry Q_e and Q_m.
RadialDataSet rnds_slice(const BlackHoleParams& p, int n = 256, double margin = 0.2);

struct Charges {
  double Qe = 0, Qm = 0;
};
// (1/4pi) \oint <E, nu> over the sphere of coordinate radius r0
Charges charges(const RadialDataSet& d, double r0);

// (E, B) -> (cos t E - sin t B, sin t E + cos t B) pointwise
RadialDataSet duality_rotate(const RadialDataSet& d, double theta);
// angle that rotates the magnetic charge away; Q_e(theta*) = +sqrt(Qe^2 + Qm^2)
double find_theta(const Charges& c);

struct ResidualNorms {
  double hamiltonian = 0, momentum = 0, gauss_E = 0, gauss_B = 0;
  double max() const;
};
struct ConstraintResidual {
  ResidualNorms interior;  // nodes at least margin*(r_> - r_<) from either end
  ResidualNorms full;      // every node; the end nodes carry D^2 roundoff ~ eps N^4
  bool spectral = false;   // Chebyshev differentiation (else 9-point stencils)
};
// R_h - |k|^2 + (tr k)^2 - 2 Lambda - 2(|E|^2 + |B|^2), |delta k + d tr k|,
// |delta E|, |delta B|, all in h-orthonormal components
ConstraintResidual constraint_residual(const RadialDataSet& d, double lambda, double margin = 0.05);

using RadialFn = std::function<double(double)>;

// Perturbation data Psi = (H~, Q~_1, E~, B~). Q~_1 = q diag(2,-1,-1) in an
// orthonormal frame with q = Qtilde_amp (h_sphere(r_<) / h_sphere)^{3/2}, the
// divergence-free profile. Etilde_fn / Btilde_fn are h0-orthonormal radial
// components; divergence-free means h_sphere * Etilde is constant.
struct ConformalSeed {
  RadialFn H0_fn, Htilde_fn, Etilde_fn, Btilde_fn;  // empty = zero
  double Qtilde_amp = 0;

  static ConformalSeed zero() { return {}; }
  // H~ = amp * exp(1 - 1/(1 - s^2)), s = (r - center)/halfwidth, zero for |s| >= 1
  static RadialFn bump(double amp, double center, double halfwidth);
  // E~ = dQe / r^2, B~ = dQm / r^2 (divergence-free when h_sphere = r^2)
  ConformalSeed& with_charge_shift(double dQe, double dQm);
};

struct SolveOptions {
  double tol = 1e-9;         // target for the interior constraint residuals
  int max_iterations = 40;   // outer (momentum, Hamiltonian) sweeps
  double epsilon = 1e-2;     // smallness threshold on ||H0|| and ||Psi||
  double margin = 0.05;      // interior margin for the residual certificate
};

struct ConformalSolution {
  std::vector<double> grid, psi, v, w;  // phi = 1 + psi, V2 = v d_r, D V2 = w diag(2,-1,-1)
  RadialDataSet data;                   // reconstructed (h, k, E, B)
  ConstraintResidual residuals;
  double hamiltonian_eq = 0, momentum_eq = 0;  // discrete equation residuals at interior collocation nodes
  int iterations = 0;
  double seed_norm = 0, solution_norm = 0;  // ||Psi||_{H^1}, ||psi||_{H^2} + ||v||_{H^1}
  double constant_estimate() const { return seed_norm > 0 ? solution_norm / seed_norm : 0.0; }

  double psi_at(double r) const;
  double V2_at(double r) const;
  nlohmann::ordered_json to_json() const;
};

// background on a Chebyshev-Lobatto grid (UsageError otherwise)
ConformalSolution solve_conformal(const RadialDataSet& background, const ConformalSeed& seed, double lambda,
                                  const SolveOptions& opt = {});

nlohmann::ordered_json residual_json(const ConstraintResidual& r);

}  // namespace knds
