#pragma once
// Master-equation data for linearised Einstein-Maxwell perturbations of RNdS.
// Every closed form is templated on the scalar type so the same expression
// serves plain evaluation (double / complex) and exact derivatives (Jet).
#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "knds/spacetime.hpp"

namespace knds {

using cplx = std::complex<double>;

enum class SectorKind { ScalarHigh, ScalarDipole, VectorHigh, VectorDipole, Spherical };

struct ModeSector {
  SectorKind kind;
  int l;
  ModeSector(SectorKind k, int l_);
  static ModeSector scalar(int l);  // picks High/Dipole from l
  static ModeSector vector(int l);
  bool is_scalar() const { return kind == SectorKind::ScalarHigh || kind == SectorKind::ScalarDipole; }
  bool is_vector() const { return kind == SectorKind::VectorHigh || kind == SectorKind::VectorDipole; }
  double k2() const;  // l(l+1) scalar, l(l+1)-1 vector
  double m() const { return k2() - 2.0; }
  std::string name() const;
};

enum class BranchKind { Plus, Minus, MaxwellAux, ScalarWaveControl, ConstraintDamping, VectorEigenPlus, VectorEigenMinus };

struct Branch {
  BranchKind kind = BranchKind::Plus;
  double gamma3 = 0.0;  // ConstraintDamping only
  std::string name() const;
};
Branch parse_branch(const std::string& s);
SectorKind parse_sector_kind(const std::string& s);

struct DimensionlessVars {
  double x, y, z, m;
};
// scalar-type k^2 = l(l+1)
DimensionlessVars dimensionless_vars(const BlackHoleParams& p, int l, double r);

// Charge entering the coupled scalar system: Qe when Qm = 0, otherwise the
// duality-rotated |Q| carrying the sign of Qe.
double effective_charge(const BlackHoleParams& p);

template <class T>
struct ScalarPoint {
  T r, mu, mup, x, y, z, H;
};

template <class T>
struct AppendixPolys {
  T P_X0, P_X1, P_XA, P_Y0, P_Y1, P_YA, P_Z, P_X, P_Y, P_A, P_Xp, P_Xm, P_Yp, P_Ym, Q_p, Q_m;
};

template <class T>
struct CoupledPotentials {
  T V_Phi, F_Phi, V_A, F_A0, F_A1;
};

template <class T>
struct StationaryCoeffs {
  T C_Xp, C_Yp, C_Ap, C_Adp, C_Xm, C_Ym, C_Am, C_Adm, Htilde;
};

// Coefficient matrices of v' = T v + f, gamma v = h with v = (X, Y, Z/(i sigma)).
// f and h act linearly on the jet (A, A', A'', A''').
template <class T>
struct XYZSystem {
  std::array<std::array<T, 3>, 3> Tm;
  std::array<T, 3> gamma;
  std::array<std::array<T, 4>, 3> f;
  std::array<T, 4> h;
};

class ScalarMasterData {
public:
  ScalarMasterData(const BlackHoleParams& p, int l, bool self_check = true);

  const BlackHoleParams& params() const { return p_; }
  int l() const { return l_; }
  double k2, m, M, Q, Q2, L;
  double c_tilde, c_plus, c_minus, b_plus, b_minus;

  template <class T>
  ScalarPoint<T> point(const T& r) const {
    ScalarPoint<T> s{r, mu(p_, r), 2.0 * M / (r * r) - (2.0 * L / 3.0) * r - 2.0 * Q2 / (r * r * r), 2.0 * M / r,
                     (L / 3.0) * r * r, Q2 / (r * r), r};
    s.H = m + 3.0 * s.x - 4.0 * s.z;
    return s;
  }

  template <class T> T H(const T& r) const { return m + 6.0 * M / r - 4.0 * Q2 / (r * r); }
  template <class T> T H_plus(const T& r) const { return 1.0 - 4.0 * Q2 / (c_tilde * r); }
  template <class T> T H_minus(const T& r) const { return m + (6.0 * M + 4.0 * Q2 * m / c_tilde) / r; }
  template <class T> T H_plus_p(const T& r) const { return 4.0 * Q2 / (c_tilde * r * r); }
  template <class T> T H_minus_p(const T& r) const { return -(6.0 * M + 4.0 * Q2 * m / c_tilde) / (r * r); }
  template <class T> T H_plus_pp(const T& r) const { return -8.0 * Q2 / (c_tilde * r * r * r); }
  template <class T> T H_minus_pp(const T& r) const { return 2.0 * (6.0 * M + 4.0 * Q2 * m / c_tilde) / (r * r * r); }
  template <class T> T a_plus(const T& r) const { return c_plus - Q / (2.0 * r); }
  template <class T> T a_minus(const T& r) const { return c_tilde / (6.0 * M) - 2.0 * Q2 / (3.0 * M * r); }
  template <class T> T c_hat(const T& r) const { return (c_tilde - 3.0 * M) / r; }
  // S0 = (log H)', varphi = log H
  template <class T> T S0_plus(const T& r) const { return H_plus_p(r) / H_plus(r); }
  template <class T> T S0_minus(const T& r) const { return H_minus_p(r) / H_minus(r); }
  double varphi_plus(double r) const { return std::log(H_plus(r)); }
  double varphi_minus(double r) const { return std::log(H_minus(r)); }

  template <class T>
  T poly_F_Phi(const ScalarPoint<T>& s) const {
    const T &x = s.x, &y = s.y, &z = s.z;
    return 2.0 * (3.0 * x - 8.0 * z) * y + 2.0 * x * z - 3.0 * x * x + 6.0 * x + m * (m + 4.0);
  }
  template <class T>
  T P_Z(const ScalarPoint<T>& s) const {
    const T &x = s.x, &y = s.y, &z = s.z;
    return (-6.0 * x + 16.0 * z) * y + 3.0 * x * x + (-2.0 * z + 3.0 * m) * x - (4.0 * m + 8.0) * z - 2.0 * m;
  }

  template <class T>
  CoupledPotentials<T> coupled(const T& r) const {
    const auto s = point(r);
    const T &x = s.x, &y = s.y, &z = s.z, &H = s.H;
    CoupledPotentials<T> c;
    c.V_Phi = s.mu / (r * r * H * H) *
              (9.0 * x * x * x - 9.0 * (2.0 * y + 6.0 * z - m) * x * x + (72.0 * z * z - 8.0 * (4.0 * m - 3.0) * z + 3.0 * m * m) * x +
               8.0 * (9.0 * x * z - 12.0 * z * z - m * z) * y - 32.0 * z * z * z + 24.0 * m * z * (z + 1.0) + m * m * (m + 2.0));
    c.F_Phi = -8.0 * Q * s.mu / (r * r * r * H * H) * poly_F_Phi(s);
    c.V_A = s.mu * (k2 / (r * r) + 8.0 * Q2 * s.mu / (r * r * r * r * H));
    c.F_A0 = -(Q * s.mu / (2.0 * r * r)) * (H / r - P_Z(s) / (H * r));
    c.F_A1 = -Q * s.mu / (r * r);
    return c;
  }

  // decoupled master potentials (Schroedinger form); the minus branch is
  // written so that it stays regular at Q = 0
  template <class T>
  T V_plus(const T& r) const {
    const auto c = coupled(r);
    return c.V_A + a_plus(r) * c.F_Phi;
  }
  template <class T>
  T V_minus(const T& r) const {
    const auto s = point(r);
    const T V_A = s.mu * (k2 / (r * r) + 8.0 * Q2 * s.mu / (r * r * r * r * s.H));
    return V_A - s.mu * (c_tilde - 4.0 * Q2 / r) * poly_F_Phi(s) / (r * r * r * s.H * s.H);
  }
  template <class T>
  T V_maxwell(const T& r) const {
    const auto s = point(r);
    return s.mu * (k2 / (r * r) + 8.0 * Q2 * s.mu / (r * r * r * r * s.H));
  }
  template <class T>
  T Vt_plus(const T& r) const { return k2 * mu(p_, r) / (r * r * H_plus(r)); }
  template <class T>
  T Vt_minus(const T& r) const { return k2 * (k2 - 2.0) * mu(p_, r) / (r * r * H_minus(r)); }

  template <class T>
  AppendixPolys<T> polys(const T& r) const;

  template <class T>
  StationaryCoeffs<T> stationary(const T& r, cplx sigma) const;

  // (X, Y, Phi, A) from (Psi+, Psi+', Psi-, Psi-'); T must hold complex values.
  template <class T>
  std::array<T, 4> xyza_from_psi(const T& r, cplx sigma, const T& pp, const T& ppd, const T& pm, const T& pmd) const;
  // X, Y, Z/(i sigma) from (Phi, Phi', A, A')
  template <class T>
  std::array<T, 3> xyz_from_phi(const T& r, cplx sigma, const T& phi, const T& phid, const T& A, const T& Ad) const;

  template <class T>
  XYZSystem<T> system(const T& r, cplx sigma) const;

  // left-hand side of the quadratic fixing the constant c; zero for c = c_+-
  double decoupling_residual(double c, double r) const;

private:
  BlackHoleParams p_;
  int l_;
};

// ---- public operations ----

struct CoupledValues {
  double V_Phi, F_Phi, V_A, F_A0, F_A1;
};
CoupledValues potential_scalar_coupled(const BlackHoleParams& p, int l, double r);

double vector_box_potential(const BlackHoleParams& p, int l, double r);  // l >= 2, box form
// Schroedinger-form potential V of mu(mu Psi')' - (V - sigma^2) Psi = 0
double master_potential(const BlackHoleParams& p, const ModeSector& s, const Branch& b, double r);

// A potential bound to fixed (params, sector, branch); cheap repeated
// evaluation, with a structural list of the radii where it is singular.
class MasterEquation {
public:
  MasterEquation(const BlackHoleParams& p, ModeSector s, Branch b);
  const BlackHoleParams& params() const { return p_; }
  const HorizonData& horizon() const { return h_; }
  const ModeSector& sector() const { return s_; }
  const Branch& branch() const { return b_; }
  double V(double r) const;
  Jet<double> V(const Jet<double>& r) const;
  // radii (possibly complex-plane points projected to distances) where V or mu is singular
  std::vector<cplx> singular_points() const;
  double indicial_scale(bool cosmological) const { return 2.0 * (cosmological ? h_.kappa_plus : h_.kappa_minus); }

private:
  template <class T> T eval(const T& r) const;
  BlackHoleParams p_;
  HorizonData h_;
  ModeSector s_;
  Branch b_;
  std::shared_ptr<ScalarMasterData> sd_;
};

struct SDeformation {
  double S, Vtilde, residual;
};
SDeformation s_deformation(const BlackHoleParams& p, int l, BranchKind branch, double r);

AppendixPolys<double> appendix_polys(const BlackHoleParams& p, int l, double r);

class StationaryCoefficients {
public:
  StationaryCoefficients(const BlackHoleParams& p, int l, cplx sigma) : sd_(p, l, false), sigma_(sigma) {}
  StationaryCoeffs<cplx> operator()(double r) const;  // PoleError on a zero of H~

private:
  ScalarMasterData sd_;
  cplx sigma_;
};
StationaryCoefficients stationary_coefficients(const BlackHoleParams& p, int l, cplx sigma);

// ---- constrained ODE reduction ----
using Mat3 = Eigen::Matrix3cd;
using Row3 = Eigen::RowVector3cd;
using Mat34 = Eigen::Matrix<cplx, 3, 4>;
using Row4 = Eigen::Matrix<cplx, 1, 4>;

struct ConstrainedOdeSystem {
  std::function<Mat3(double)> T_fn, T_prime_fn;
  std::function<Row3(double)> gamma_fn, gamma_prime_fn;
  std::function<Mat34(double)> f_fn, f_prime_fn;
  std::function<Row4(double)> h_fn;
  // v-dependent part of h' induced by the auxiliary field equation (may be empty)
  std::function<Row3(double)> h_prime_v_fn;
  cplx sigma;
};
ConstrainedOdeSystem scalar_constrained_system(const BlackHoleParams& p, int l, cplx sigma);
// sup over the radii of |gamma' + T^t gamma - h'_v - alpha gamma| with alpha fitted, relative
double consistency_defect(const ConstrainedOdeSystem& sys, const std::vector<double>& radii);

struct Reduction {
  cplx a, b, c;
  Row4 F;  // coefficients of (A, A', A'', A''')
};
using RowFn = std::function<Row3(double)>;
Reduction reduce_constrained_system(const ConstrainedOdeSystem& sys, const RowFn& ell, const RowFn& ell_p,
                                    const RowFn& ell_pp, double r);

struct ReconstructedXYZA {
  cplx X, Y, Z_over_isigma, A;
};
ReconstructedXYZA reconstruct_xyza(const BlackHoleParams& p, int l, cplx sigma, cplx psi_p, cplx dpsi_p, cplx psi_m,
                                   cplx dpsi_m, double r, bool need_z = true);

struct VectorDipoleCheck {
  double eq1, eq2, c_deviation, c_value;
};
VectorDipoleCheck vector_l1_knds_check(const BlackHoleParams& p);

struct BirkhoffCheck {
  double ode_residual;        // d_r(r mu_dot) + 2 Q Q_dot / r^2
  double linearization_gap;   // mu_dot vs d/de mu(M + e mdot, Q + e qdot)
  double background_residual; // -1 + Lambda r^2 + (r mu)' + r^2 q'^2
};
BirkhoffCheck birkhoff_l0_check(const BlackHoleParams& p, double mdot, double qdot);

// Chebyshev-Lobatto points mapped to [a, b]
std::vector<double> chebyshev_points(double a, double b, int n);

}  // namespace knds

#include "knds/perturbation_impl.hpp"
