#include "knds/perturbation.hpp"

#include <algorithm>
#include <cmath>

namespace knds {

ModeSector::ModeSector(SectorKind k, int l_) : kind(k), l(l_) {
  bool ok = false;
  switch (k) {
    case SectorKind::ScalarHigh:
    case SectorKind::VectorHigh: ok = l >= 2; break;
    case SectorKind::ScalarDipole:
    case SectorKind::VectorDipole: ok = l == 1; break;
    case SectorKind::Spherical: ok = l == 0; break;
  }
  if (!ok) throw UsageError("sector " + name() + " incompatible with l = " + std::to_string(l));
}

ModeSector ModeSector::scalar(int l) {
  if (l < 1) throw UsageError("scalar sector requires l >= 1");
  return {l == 1 ? SectorKind::ScalarDipole : SectorKind::ScalarHigh, l};
}

ModeSector ModeSector::vector(int l) {
  if (l < 1) throw UsageError("vector sector requires l >= 1");
  return {l == 1 ? SectorKind::VectorDipole : SectorKind::VectorHigh, l};
}

double ModeSector::k2() const {
  const double ll = double(l) * (l + 1);
  return is_vector() ? ll - 1.0 : ll;
}

std::string ModeSector::name() const {
  switch (kind) {
    case SectorKind::ScalarHigh: return "scalar";
    case SectorKind::ScalarDipole: return "scalar-dipole";
    case SectorKind::VectorHigh: return "vector";
    case SectorKind::VectorDipole: return "vector-dipole";
    case SectorKind::Spherical: return "spherical";
  }
  return "?";
}

std::string Branch::name() const {
  switch (kind) {
    case BranchKind::Plus: return "plus";
    case BranchKind::Minus: return "minus";
    case BranchKind::MaxwellAux: return "maxwell";
    case BranchKind::ScalarWaveControl: return "wave";
    case BranchKind::ConstraintDamping: return "damping";
    case BranchKind::VectorEigenPlus: return "eigen-plus";
    case BranchKind::VectorEigenMinus: return "eigen-minus";
  }
  return "?";
}

Branch parse_branch(const std::string& s) {
  if (s == "plus" || s == "+") return {BranchKind::Plus};
  if (s == "minus" || s == "-") return {BranchKind::Minus};
  if (s == "maxwell") return {BranchKind::MaxwellAux};
  if (s == "wave") return {BranchKind::ScalarWaveControl};
  if (s == "damping") return {BranchKind::ConstraintDamping};
  if (s == "eigen-plus") return {BranchKind::VectorEigenPlus};
  if (s == "eigen-minus") return {BranchKind::VectorEigenMinus};
  throw UsageError("unknown branch '" + s + "'");
}

SectorKind parse_sector_kind(const std::string& s) {
  if (s == "scalar") return SectorKind::ScalarHigh;
  if (s == "vector") return SectorKind::VectorHigh;
  if (s == "spherical") return SectorKind::Spherical;
  throw UsageError("unknown sector '" + s + "'");
}

DimensionlessVars dimensionless_vars(const BlackHoleParams& p, int l, double r) {
  if (!(r > 0.0)) throw DomainError("dimensionless_vars: r must be positive");
  return {2.0 * p.mass / r, p.lambda * r * r / 3.0, p.Q2() / (r * r), double(l) * (l + 1) - 2.0};
}

double effective_charge(const BlackHoleParams& p) {
  if (p.charge_m == 0.0) return p.charge_e;
  return p.charge_e < 0.0 ? -p.Q() : p.Q();
}

std::vector<double> chebyshev_points(double a, double b, int n) {
  std::vector<double> r(n);
  for (int k = 0; k < n; ++k) r[k] = a + (b - a) * 0.5 * (1.0 - std::cos(M_PI * k / (n - 1)));
  r.front() = a;
  r.back() = b;
  return r;
}

ScalarMasterData::ScalarMasterData(const BlackHoleParams& p, int l, bool self_check) : p_(p), l_(l) {
  if (l < 1) throw UsageError("scalar master data requires l >= 1");
  k2 = double(l) * (l + 1);
  m = k2 - 2.0;
  M = p.mass;
  Q = effective_charge(p);
  Q2 = p.Q2();
  L = p.lambda;
  c_tilde = 3.0 * M + std::sqrt(9.0 * M * M + 4.0 * Q2 * m);
  c_plus = -Q * m / (2.0 * c_tilde);
  c_minus = c_tilde / (8.0 * Q);  // infinite at Q = 0, where only (a-, b-) = (1, 0) is used
  b_plus = 1.0;
  b_minus = 4.0 * Q / (3.0 * M);
  if (!self_check) return;
  const HorizonData h = horizons(p);
  for (double r : chebyshev_points(h.r_minus, h.r_plus, 512)) {
    if (!(H(r) > 0.0) || !(H_plus(r) > 0.0) || !(H_minus(r) > 0.0))
      throw InternalInvariantError("H or H+- not positive at r = " + std::to_string(r));
  }
}

double ScalarMasterData::decoupling_residual(double c, double r) const {
  const auto s = point(r);
  const auto P = coupled(r);
  const double a = c - Q / (2.0 * r);
  return a * (P.V_Phi - P.V_A - a * P.F_Phi) + P.F_A0 + (Q * s.mu / (r * r)) * (s.mup / 2.0 - s.mu / r);
}

CoupledValues potential_scalar_coupled(const BlackHoleParams& p, int l, double r) {
  if (l < 2) throw UsageError("potential_scalar_coupled requires l >= 2");
  ScalarMasterData sd(p, l, false);
  if (!(sd.H(r) > 0.0)) throw InternalInvariantError("H <= 0");
  auto c = sd.coupled(r);
  return {c.V_Phi, c.F_Phi, c.V_A, c.F_A0, c.F_A1};
}

double vector_box_potential(const BlackHoleParams& p, int l, double r) {
  const double k2 = double(l) * (l + 1) - 1.0;
  return (k2 + 1.0 - 3.0 * p.mass / r + 4.0 * p.Q2() / (r * r)) / (r * r);
}

// ---- MasterEquation ----

MasterEquation::MasterEquation(const BlackHoleParams& p, ModeSector s, Branch b) : p_(p), h_(horizons(p)), s_(s), b_(b) {
  const auto k = b.kind;
  bool ok = false;
  if (k == BranchKind::ScalarWaveControl) ok = true;
  else if (s.is_scalar()) ok = k == BranchKind::Plus || k == BranchKind::Minus || k == BranchKind::MaxwellAux;
  else if (s.kind == SectorKind::VectorHigh)
    ok = k == BranchKind::Plus || k == BranchKind::Minus || k == BranchKind::VectorEigenPlus || k == BranchKind::VectorEigenMinus;
  else if (s.kind == SectorKind::VectorDipole) ok = k == BranchKind::Plus;
  if (!ok) throw UsageError("branch " + b.name() + " not available for sector " + s.name());
  if (s.is_scalar()) sd_ = std::make_shared<ScalarMasterData>(p, s.l, true);
}

template <class T>
T MasterEquation::eval(const T& r) const {
  const T mu_ = mu(p_, r);
  const double Q = effective_charge(p_), Q2 = p_.Q2(), M = p_.mass;
  if (b_.kind == BranchKind::ScalarWaveControl) {
    const T mup = 2.0 * M / (r * r) - (2.0 * p_.lambda / 3.0) * r - 2.0 * Q2 / (r * r * r);
    return mu_ * (double(s_.l) * (s_.l + 1) / (r * r) + mup / r);
  }
  if (s_.is_scalar()) {
    switch (b_.kind) {
      case BranchKind::Plus: return sd_->V_plus(r);
      case BranchKind::Minus: return sd_->V_minus(r);
      default: return sd_->V_maxwell(r);
    }
  }
  if (s_.kind == SectorKind::VectorDipole) return mu_ * (2.0 / (r * r) + 4.0 * Q2 / (r * r * r * r));
  const double k2 = s_.k2();
  const T V = (k2 + 1.0 - 3.0 * M / r + 4.0 * Q2 / (r * r)) / (r * r);
  double w = 0.0;
  switch (b_.kind) {
    case BranchKind::Plus: w = 2.0 * Q * std::sqrt(k2 - 1.0); break;
    case BranchKind::Minus: w = -2.0 * Q * std::sqrt(k2 - 1.0); break;
    case BranchKind::VectorEigenPlus: w = std::sqrt(9.0 * M * M + 4.0 * Q2 * (k2 - 1.0)); break;
    default: w = -std::sqrt(9.0 * M * M + 4.0 * Q2 * (k2 - 1.0)); break;
  }
  return mu_ * (V + w / (r * r * r));
}

double MasterEquation::V(double r) const { return eval(r); }
Jet<double> MasterEquation::V(const Jet<double>& r) const { return eval(r); }

std::vector<cplx> MasterEquation::singular_points() const {
  std::vector<cplx> s{0.0, h_.r_neg, h_.r_minus, h_.r_plus};
  if (p_.Q2() > 0.0) s.push_back(h_.r_inner);
  if (sd_) {
    const double m = sd_->m, M = p_.mass, Q2 = p_.Q2();
    // H = (m r^2 + 6 M r - 4 Q^2) / r^2
    if (m == 0.0) {
      if (Q2 > 0.0) s.push_back(2.0 * Q2 / (3.0 * M));
    } else {
      const cplx d = std::sqrt(cplx(36.0 * M * M + 16.0 * m * Q2));
      s.push_back((-6.0 * M + d) / (2.0 * m));
      s.push_back((-6.0 * M - d) / (2.0 * m));
    }
    if (b_.kind == BranchKind::Plus && Q2 > 0.0) s.push_back(4.0 * Q2 / sd_->c_tilde);
    if (b_.kind == BranchKind::Minus && m > 0.0) s.push_back(-(6.0 * M + 4.0 * Q2 * m / sd_->c_tilde) / m);
  }
  return s;
}

double master_potential(const BlackHoleParams& p, const ModeSector& s, const Branch& b, double r) {
  if (b.kind == BranchKind::ConstraintDamping)
    throw UsageError("constraint damping has no Schroedinger potential; use constraint_damping_resonance");
  return MasterEquation(p, s, b).V(r);
}

SDeformation s_deformation(const BlackHoleParams& p, int l, BranchKind branch, double r) {
  if (branch != BranchKind::Plus && branch != BranchKind::Minus) throw UsageError("s_deformation: branch must be plus or minus");
  ScalarMasterData sd(p, l, false);
  const bool plus = branch == BranchKind::Plus;
  const auto R = Jet<double>::variable(1, r);
  const Jet<double> S = plus ? mu(p, R) * sd.S0_plus(R) : mu(p, R) * sd.S0_minus(R);
  const double V = plus ? sd.V_plus(r) : sd.V_minus(r);
  const double Vt = plus ? sd.Vt_plus(r) : sd.Vt_minus(r);
  SDeformation out{S[0], Vt, V + mu(p, r) * S[1] - S[0] * S[0] - Vt};
  if (std::abs(out.residual) > 1e-9 * (1.0 + std::abs(V)))
    throw InternalInvariantError("S-deformation residual " + std::to_string(out.residual));
  return out;
}

AppendixPolys<double> appendix_polys(const BlackHoleParams& p, int l, double r) {
  return ScalarMasterData(p, l, false).polys(r);
}

StationaryCoeffs<cplx> StationaryCoefficients::operator()(double r) const {
  auto C = sd_.stationary(cplx(r), sigma_);
  const auto s = sd_.point(r);
  const auto& p = sd_.params();
  const double mup_scale = 2.0 * p.mass / (r * r) + 2.0 * p.lambda * r / 3.0 + 2.0 * p.Q2() / (r * r * r);
  const double scale = std::abs(s.H) * (sd_.k2 * mup_scale + 4.0 * std::abs(sigma_ * sigma_) * r);
  if (!(std::abs(C.Htilde) > 1e-13 * scale)) throw PoleError("stationary coefficients: zero of H~ at r = " + std::to_string(r));
  return C;
}

StationaryCoefficients stationary_coefficients(const BlackHoleParams& p, int l, cplx sigma) {
  if (l < 1) throw UsageError("stationary coefficients require l >= 1");
  return StationaryCoefficients(p, l, sigma);
}

// ---- constrained system ----

namespace {
template <class T, std::size_t R, std::size_t C, class F>
Eigen::Matrix<cplx, R, C> to_eigen(const std::array<std::array<T, C>, R>& a, F get) {
  Eigen::Matrix<cplx, R, C> m;
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) m(i, j) = get(a[i][j]);
  return m;
}
template <class T, std::size_t C, class F>
Eigen::Matrix<cplx, 1, C> to_eigen_row(const std::array<T, C>& a, F get) {
  Eigen::Matrix<cplx, 1, C> m;
  for (std::size_t j = 0; j < C; ++j) m(0, j) = get(a[j]);
  return m;
}
}  // namespace

ConstrainedOdeSystem scalar_constrained_system(const BlackHoleParams& p, int l, cplx sigma) {
  auto sd = std::make_shared<ScalarMasterData>(p, l, false);
  using J = Jet<cplx>;
  auto v0 = [](const cplx& x) { return x; };
  auto d1 = [](const J& x) { return x[1]; };
  ConstrainedOdeSystem s;
  s.sigma = sigma;
  s.T_fn = [sd, sigma, v0](double r) { return to_eigen(sd->system(cplx(r), sigma).Tm, v0); };
  s.T_prime_fn = [sd, sigma, d1](double r) { return to_eigen(sd->system(J::variable(1, r), sigma).Tm, d1); };
  s.gamma_fn = [sd, sigma, v0](double r) { return Row3(to_eigen_row(sd->system(cplx(r), sigma).gamma, v0)); };
  s.gamma_prime_fn = [sd, sigma, d1](double r) { return Row3(to_eigen_row(sd->system(J::variable(1, r), sigma).gamma, d1)); };
  s.f_fn = [sd, sigma, v0](double r) { return to_eigen(sd->system(cplx(r), sigma).f, v0); };
  s.f_prime_fn = [sd, sigma, d1](double r) { return to_eigen(sd->system(J::variable(1, r), sigma).f, d1); };
  s.h_fn = [sd, sigma, v0](double r) { return Row4(to_eigen_row(sd->system(cplx(r), sigma).h, v0)); };
  // h' contains A'', which the Maxwell equation ties to X + Y
  const double Q2 = p.Q2();
  s.h_prime_v_fn = [Q2](double r) { return Row3(-4.0 * Q2 / std::pow(r, 5), -4.0 * Q2 / std::pow(r, 5), 0.0); };
  return s;
}

double consistency_defect(const ConstrainedOdeSystem& sys, const std::vector<double>& radii) {
  double worst = 0.0;
  for (double r : radii) {
    const Row3 g = sys.gamma_fn(r);
    Row3 w = sys.gamma_prime_fn(r) + g * sys.T_fn(r);
    if (sys.h_prime_v_fn) w -= sys.h_prime_v_fn(r);
    const cplx alpha = (w * g.adjoint())(0, 0) / (g * g.adjoint())(0, 0);
    worst = std::max(worst, (w - alpha * g).norm() / std::max(w.norm(), g.norm()));
  }
  return worst;
}

Reduction reduce_constrained_system(const ConstrainedOdeSystem& sys, const RowFn& ell, const RowFn& ell_p,
                                    const RowFn& ell_pp, double r) {
  const Mat3 T = sys.T_fn(r), Tp = sys.T_prime_fn(r);
  const Row3 l0 = ell(r), l1p = ell_p(r), l2p = ell_pp(r), g = sys.gamma_fn(r);
  const Row3 ell1 = l1p + l0 * T;
  const Row3 ell2 = l2p + 2.0 * l1p * T + l0 * Tp + l0 * T * T;
  Mat3 A;
  A.row(0) = ell1;
  A.row(1) = l0;
  A.row(2) = g;
  Eigen::FullPivLU<Mat3> lu(A.transpose());
  if (lu.rank() < 3) throw DegenerateReductionError("(ell1, ell, gamma) singular at r = " + std::to_string(r));
  const Eigen::Vector3cd abc = lu.solve(-ell2.transpose());
  if ((A.transpose() * abc + ell2.transpose()).norm() > 1e-8 * (ell2.norm() + 1e-300))
    throw DegenerateReductionError("(ell1, ell, gamma) ill-conditioned at r = " + std::to_string(r));
  Reduction red{abc(0), abc(1), abc(2), Row4::Zero()};
  const Mat34 f = sys.f_fn(r), fp = sys.f_prime_fn(r);
  Eigen::Matrix<cplx, 4, 4> shift = Eigen::Matrix<cplx, 4, 4>::Zero();
  for (int i = 0; i < 3; ++i) shift(i, i + 1) = 1.0;
  const Row4 f1 = l0 * f;
  const Row4 f2 = (2.0 * l1p + l0 * T) * f + l0 * (fp + f * shift);
  red.F = f2 + red.a * f1 - red.c * sys.h_fn(r);
  return red;
}

ReconstructedXYZA reconstruct_xyza(const BlackHoleParams& p, int l, cplx sigma, cplx psi_p, cplx dpsi_p, cplx psi_m,
                                   cplx dpsi_m, double r, bool need_z) {
  if (l < 2) throw UsageError("reconstruct_xyza requires l >= 2");
  if (need_z && sigma == 0.0) throw UsageError("Z/(i sigma) channel undefined at sigma = 0");
  ScalarMasterData sd(p, l, false);
  using J = Jet<cplx>;
  auto R = J::variable(1, r);
  J pp(1, psi_p), pm(1, psi_m), ppd(1, dpsi_p), pmd(1, dpsi_m);
  pp[1] = dpsi_p;
  pm[1] = dpsi_m;
  auto out = sd.xyza_from_psi(R, sigma, pp, ppd, pm, pmd);
  ReconstructedXYZA res{out[0][0], out[1][0], 0.0, out[3][0]};
  if (sd.Q == 0.0) res.A = psi_p;  // the printed A-coefficient is 0/0 there; a+ = 0, b+ = 1
  if (need_z) {
    J A = sd.Q == 0.0 ? pp : out[3];
    // A' from the inversion when the printed form is not usable at first order
    const J Ad = A.diff();
    auto xyz = sd.xyz_from_phi(J(0, r), sigma, J(0, out[2][0]), J(0, out[2][1]), J(0, A[0]), J(0, Ad[0]));
    res.Z_over_isigma = xyz[2][0];
  }
  return res;
}

// ---- vector l = 1 and spherical checks ----

VectorDipoleCheck vector_l1_knds_check(const BlackHoleParams& p) {
  const HorizonData h = horizons(p);
  const double d = 0.05 * (h.r_plus - h.r_minus);
  const double Q = effective_charge(p), M = p.mass;
  VectorDipoleCheck out{0.0, 0.0, 0.0, 0.0};
  using J = Jet<double>;
  for (double r : chebyshev_points(h.r_minus + d, h.r_plus - d, 200)) {
    const J R = J::variable(2, r);
    // f = r F with F = 2M/r^2 + Lambda r/3 - Q^2/r^3; w = *d(r^-1 f); K = Q/r^2
    const J F = 2.0 * M / (R * R) + (p.lambda / 3.0) * R - p.Q2() / (R * R * R);
    const J w = (F / R).diff();
    const J K = Q / (R * R);
    const J c = R * R * R * R * w - 4.0 * Q * R * K;
    out.eq1 = std::max(out.eq1, std::abs(c.diff()[0] / (r * r)));
    out.c_deviation = std::max(out.c_deviation, std::abs(c[0] + 6.0 * M));
    out.c_value = c[0];
    const J rK = R * K;
    const J eq2 = (mu(p, R) * rK.diff()).diff() - 2.0 * K / R - Q * w;
    out.eq2 = std::max(out.eq2, std::abs(eq2[0]));
  }
  return out;
}

BirkhoffCheck birkhoff_l0_check(const BlackHoleParams& p, double mdot, double qdot) {
  const HorizonData h = horizons(p);
  const double Q = effective_charge(p), M = p.mass;
  BirkhoffCheck out{0.0, 0.0, 0.0};
  using J = Jet<double>;
  for (double r : chebyshev_points(h.r_minus, h.r_plus, 128)) {
    const J R = J::variable(1, r);
    const J mudot = -2.0 * mdot / R + 2.0 * Q * qdot / (R * R);
    out.ode_residual = std::max(out.ode_residual, std::abs((R * mudot).diff()[0] + 2.0 * Q * qdot / (r * r)));
    // dual number in the parameters
    const J e = J::variable(1, 0.0);
    const J Me = M + mdot * e, Qe = Q + qdot * e;
    const J mue = 1.0 - 2.0 * Me / r - p.lambda * r * r / 3.0 + Qe * Qe / (r * r);
    out.linearization_gap = std::max(out.linearization_gap, std::abs(mue[1] - mudot[0]));
    const J q = -Q / R;
    const double qp = q.diff()[0];
    out.background_residual =
        std::max(out.background_residual, std::abs(-1.0 + p.lambda * r * r + (R * mu(p, R)).diff()[0] + r * r * qp * qp));
  }
  return out;
}

}  // namespace knds
