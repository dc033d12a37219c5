#pragma once
// Subprincipal endomorphisms of the gauge-fixed Einstein-Maxwell operator at
// the trapped set (14x14) and at the radial sets over the horizons (10x10),
// with their closed-form spectra.
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "knds/spacetime.hpp"

namespace knds {

using cplx = std::complex<double>;

struct TrappedSetParams {
  double gamma1p = 0, gamma2p = 0, gamma3p = 0;
  double gamma1pp = 0, gamma2pp = 0, gamma3pp = 0;
  double qp = 0;
};

// photon-sphere values feeding TrappedSetParams
struct PhotonDictionary {
  double r_P, alpha2, alpha, T_prime, q;
  TrappedSetParams params;
};
PhotonDictionary photon_dictionary(const BlackHoleParams& p, double gamma1, double gamma2, double gamma3);

enum class RadialSide { Event, Cosmological };

struct RadialSetParams {
  double kappa = 0, c_pm = 0;
  double gamma1 = 0, gamma2 = 0, gamma3 = 0;
  double q = 0;
  RadialSide side = RadialSide::Event;
};
// kappa, c (from mu T' = +-(1 + mu c)) and q = -Q_e / r^2 at the chosen horizon
RadialSetParams radial_params(const BlackHoleParams& p, RadialSide side, double gamma1, double gamma2, double gamma3);

using TrappedMatrix = Eigen::Matrix<cplx, 14, 14>;
using RadialMatrix = Eigen::Matrix<double, 10, 10>;

// (i sigma / r)^{-1} S_L, blocks over S^2 T*M (f1..f10) and T*M (f11..f14)
TrappedMatrix build_trapped_matrix(const TrappedSetParams& p);
RadialMatrix build_radial_matrix(const RadialSetParams& p);

// predicted eigenvalue multisets (with multiplicity)
std::vector<cplx> trapped_spectrum_prediction(const TrappedSetParams& p);
std::vector<cplx> radial_spectrum_prediction(const RadialSetParams& p);

struct SpectrumCheck {
  std::vector<cplx> eigenvalues;  // sorted by (re, im)
  std::vector<cplx> predicted;    // sorted by (re, im)
  double max_deviation = 0;       // worst cluster-centroid mismatch
  double max_spread = 0;          // worst distance of an eigenvalue to its predicted value
  double min_real = 0;
  bool nonnegative = false;       // min_real >= -1e-10
};

// Eigenvalues are grouped around the predicted values; defective eigenvalues
// split under roundoff, so each group is compared through its mean and size.
// Throws LemmaMismatchError beyond tol.
SpectrumCheck match_spectrum(const Eigen::MatrixXcd& A, std::vector<cplx> predicted, double tol = 1e-8);
SpectrumCheck eig_trapped(const TrappedSetParams& p, double tol = 1e-8);
SpectrumCheck eig_radial(const RadialSetParams& p, double tol = 1e-8);

// min Re of the spectrum of S_L^{+-}; the spectral stand-in for the threshold quantity
double threshold_beta_hat(const RadialSetParams& p);

// columns spanning the two invariant subspaces of the trapped matrix
Eigen::Matrix<double, 14, 4> trapped_subspace_v1();
Eigen::Matrix<double, 14, 4> trapped_subspace_v2();
// max |A v - P(A v)| over the basis columns, P the projection onto span(basis)
// along the coordinate directions picked by a pivoted elimination (exact for
// integer data)
double invariant_subspace_defect(const Eigen::MatrixXcd& A, const Eigen::MatrixXd& basis);

}  // namespace knds
