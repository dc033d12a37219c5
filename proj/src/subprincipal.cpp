#include "knds/subprincipal.hpp"

#include <algorithm>
#include <cmath>

#include "knds/errors.hpp"
#include "knds/perturbation.hpp"

namespace knds {

namespace {

using M10 = Eigen::Matrix<double, 10, 10>;

M10 rows10(std::initializer_list<std::initializer_list<double>> r) {
  M10 m;
  int i = 0;
  for (auto& row : r) {
    int j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

const M10& s11_base() {
  static const M10 m = rows10({{0, -4, 0, 0, 0, 0, 0, 0, 0, 0},
                               {-2, 0, -2, 0, -2, 0, 0, 0, 0, 0},
                               {0, 2, 0, 0, 0, -2, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, -2, 0, 0, 0},
                               {0, -4, 0, 0, 0, -4, 0, 0, 0, 0},
                               {0, 0, -2, 0, 2, 0, 0, -2, 0, 0},
                               {0, 0, 0, -2, 0, 0, 0, 0, -2, 0},
                               {0, 0, 0, 0, 0, 4, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 2, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0}});
  return m;
}

const M10& s11_g1p() {
  static const M10 m = rows10({{2, 0, 4, 0, 2, 0, 0, 2, 0, 2},
                               {0, 2, 0, 0, 0, 2, 0, 0, 0, 0},
                               {1, 0, 2, 0, -1, 0, 0, 1, 0, -1},
                               {0, 0, 0, 2, 0, 0, 0, 0, 2, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0}});
  return m;
}

// enters with a minus sign
const M10& s11_g1pp() {
  static const M10 m = rows10({{0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {1, 0, 2, 0, 1, 0, 0, 1, 0, 1},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 4, 0, 0, 0, 4, 0, 0, 0, 0},
                               {1, 0, 2, 0, -1, 0, 0, 1, 0, -1},
                               {0, 0, 0, 2, 0, 0, 0, 0, 2, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0}});
  return m;
}

const M10& s11_g2p() {
  static const M10 m = rows10({{-1, 0, -2, 0, -1, 0, 0, -1, 0, -1},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {1, 0, 2, 0, 1, 0, 0, 1, 0, 1},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {1, 0, 2, 0, 1, 0, 0, 1, 0, 1},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {1, 0, 2, 0, 1, 0, 0, 1, 0, 1}});
  return m;
}

const M10& s11_g2pp() {
  static const M10 m = rows10({{0, -2, 0, 0, 0, -2, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 2, 0, 0, 0, 2, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 2, 0, 0, 0, 2, 0, 0, 0, 0},
                               {0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
                               {0, 2, 0, 0, 0, 2, 0, 0, 0, 0}});
  return m;
}

bool lex_less(cplx a, cplx b) { return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag(); }

}  // namespace

PhotonDictionary photon_dictionary(const BlackHoleParams& p, double g1, double g2, double g3) {
  const HorizonData h = horizons(p);
  const StarGauge sg(p, h);
  PhotonDictionary d;
  d.r_P = h.r_photon();
  d.alpha2 = mu(p, d.r_P);
  if (!(d.alpha2 > 0.0)) throw DomainError("photon sphere outside the static region");
  d.alpha = std::sqrt(d.alpha2);
  d.T_prime = sg.T_prime(d.r_P);
  const double r = d.r_P;
  d.q = -effective_charge(p) / (d.alpha * r * r);
  auto& t = d.params;
  t.gamma1p = 0.5 * r * g1 / d.alpha2;
  t.gamma2p = r * g2 / d.alpha2;
  t.gamma3p = r * g3 / d.alpha2;
  t.gamma1pp = 0.5 * r * d.T_prime * g1;
  t.gamma2pp = r * d.T_prime * g2;
  t.gamma3pp = r * d.T_prime * g3;
  t.qp = 0.5 * r * d.q / d.alpha;
  return d;
}

RadialSetParams radial_params(const BlackHoleParams& p, RadialSide side, double g1, double g2, double g3) {
  const HorizonData h = horizons(p);
  const StarGauge sg(p, h);
  const bool cos = side == RadialSide::Cosmological;
  const double rh = cos ? h.r_plus : h.r_minus;
  RadialSetParams r;
  r.side = side;
  r.kappa = cos ? h.kappa_plus : h.kappa_minus;
  // -nu = mu T' = s (1 + mu c) with s = +1 at r+ and -1 at r-, so c = -nu'(rh) / (s mu'(rh))
  const double s = cos ? 1.0 : -1.0;
  r.c_pm = -sg.nu_prime(rh) / (s * mu_prime(p, rh));
  r.gamma1 = g1;
  r.gamma2 = g2;
  r.gamma3 = g3;
  r.q = -effective_charge(p) / (rh * rh);
  return r;
}

TrappedMatrix build_trapped_matrix(const TrappedSetParams& p) {
  TrappedMatrix m = TrappedMatrix::Zero();
  const M10 s11 = s11_base() + p.gamma1p * s11_g1p() - p.gamma1pp * s11_g1pp() + p.gamma2p * s11_g2p() + p.gamma2pp * s11_g2pp();
  m.topLeftCorner<10, 10>() = s11.cast<cplx>();
  // S_L^{12} = 4 q' D
  const double a = 4.0 * p.qp;
  m(0, 11) = a;
  m(2, 11) = -a;
  m(4, 11) = -a;
  m(5, 10) = -a;
  m(5, 12) = -a;
  m(6, 13) = -a;
  m(7, 11) = a;
  m(9, 11) = a;
  // S_L^{21} = q' C
  const double b = p.qp;
  m(10, 5) = -2 * b;
  const double row2[10] = {-1, 0, -2, 0, 1, 0, 0, -1, 0, -1};
  for (int j = 0; j < 10; ++j) m(11, j) = row2[j] * b;
  m(12, 5) = 2 * b;
  m(13, 6) = 2 * b;
  // S_L^{22}
  m(10, 11) = -2;
  m(11, 10) = -2;
  m(11, 12) = -2;
  m(12, 11) = 2;
  m(10, 10) += p.gamma3p;
  m(10, 12) += p.gamma3p;
  m(11, 10) += p.gamma3pp;
  m(11, 12) += p.gamma3pp;
  return m;
}

RadialMatrix build_radial_matrix(const RadialSetParams& p) {
  // u is the upper sign of the +- notation: +1 at the cosmological horizon
  const double u = p.side == RadialSide::Cosmological ? 1.0 : -1.0;
  const double c = p.c_pm, k = p.kappa;
  RadialMatrix m = RadialMatrix::Zero();
  const double diag[10] = {0, 2, 1, 4, 3, 2, 2, 0, 2, 1};
  for (int i = 0; i < 10; ++i) m(i, i) = 2.0 * k * diag[i];
  // (1,1): gamma1 A1 + gamma2 A2 on (dt0^2, 2dt0 dr, 2dt0.S, dr^2, 2dr.S, r^2 g, g-perp)
  const double g1 = p.gamma1, g2 = p.gamma2;
  m(0, 0) += 2 * g1;
  m(1, 0) += -u * c * g1 + 2 * u * c * g2;
  m(1, 5) += 0.5 * u * g1 - u * g2;
  m(2, 2) += g1;
  m(3, 5) += -c * g1;
  m(4, 2) += -u * c * g1;
  m(5, 0) += -2 * c * g2;
  m(5, 5) += g2;
  // (2,2) on (dt0, dr, S)
  m(7, 7) += p.gamma3;
  m(8, 7) += -u * c * p.gamma3;
  // (2,1)
  m(8, 1) += -u * p.q;
  m(8, 5) += -0.5 * p.q;
  m(9, 2) += -u * p.q;
  // (1,2) = 2q D
  m(1, 7) += -2 * p.q;
  m(4, 9) += -2 * p.q;
  m(5, 7) += -2 * u * p.q;
  return m;
}

std::vector<cplx> trapped_spectrum_prediction(const TrappedSetParams& p) {
  const cplx w(0.0, 2.0 * p.qp * std::sqrt(2.0));
  // V1: 0, 2g1', +-w; V2: nilpotent; quotient: 4g1', g3', 2g1', 2g2', +-w
  std::vector<cplx> v{0.0, 2 * p.gamma1p, w, -w, 0.0, 0.0, 0.0, 0.0, 4 * p.gamma1p, p.gamma3p, 2 * p.gamma1p, 2 * p.gamma2p, w, -w};
  std::sort(v.begin(), v.end(), lex_less);
  return v;
}

std::vector<cplx> radial_spectrum_prediction(const RadialSetParams& p) {
  const double k = p.kappa;
  std::vector<cplx> v{4 * k, 2 * k + p.gamma1, 2 * k, 6 * k, 2 * p.gamma1, p.gamma3, 4 * k + p.gamma2, 4 * k, 4 * k, 8 * k};
  std::sort(v.begin(), v.end(), lex_less);
  return v;
}

SpectrumCheck match_spectrum(const Eigen::MatrixXcd& A, std::vector<cplx> predicted, double tol) {
  const int n = int(A.rows());
  if (int(predicted.size()) != n) throw InternalInvariantError("prediction size does not match the matrix");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(A, false);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  SpectrumCheck out;
  for (int i = 0; i < n; ++i) out.eigenvalues.push_back(es.eigenvalues()[i]);
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end(), lex_less);
  std::sort(predicted.begin(), predicted.end(), lex_less);
  out.predicted = predicted;

  // single-linkage groups of predicted values; the radius covers the
  // splitting of a Jordan block of size <= 5 at double precision
  const double scale = std::max(1.0, A.cwiseAbs().rowwise().sum().maxCoeff());
  const double rad = 2e-2 * scale;
  std::vector<int> grp(n, -1);
  int ng = 0;
  for (int i = 0; i < n; ++i) {
    if (grp[i] >= 0) continue;
    grp[i] = ng;
    for (bool grew = true; grew;) {
      grew = false;
      for (int j = 0; j < n; ++j)
        if (grp[j] < 0)
          for (int k = 0; k < n; ++k)
            if (grp[k] == ng && std::abs(predicted[j] - predicted[k]) <= rad) {
              grp[j] = ng;
              grew = true;
              break;
            }
    }
    ++ng;
  }
  std::vector<cplx> psum(ng, 0.0), esum(ng, 0.0);
  std::vector<int> pcnt(ng, 0), ecnt(ng, 0);
  for (int i = 0; i < n; ++i) {
    psum[grp[i]] += predicted[i];
    ++pcnt[grp[i]];
  }
  for (cplx e : out.eigenvalues) {
    int best = 0;
    double d = 1e300;
    for (int i = 0; i < n; ++i)
      if (std::abs(e - predicted[i]) < d) {
        d = std::abs(e - predicted[i]);
        best = i;
      }
    out.max_spread = std::max(out.max_spread, d);
    if (d > rad) throw LemmaMismatchError("eigenvalue far from every predicted value");
    esum[grp[best]] += e;
    ++ecnt[grp[best]];
  }
  for (int g = 0; g < ng; ++g) {
    if (ecnt[g] != pcnt[g]) throw LemmaMismatchError("eigenvalue multiplicity differs from the prediction");
    out.max_deviation = std::max(out.max_deviation, std::abs(esum[g] - psum[g]) / pcnt[g]);
  }
  if (out.max_deviation > tol)
    throw LemmaMismatchError("eigenvalue cluster mean deviates by " + std::to_string(out.max_deviation));
  out.min_real = 1e300;
  for (int g = 0; g < ng; ++g) out.min_real = std::min(out.min_real, (esum[g] / double(ecnt[g])).real());
  out.nonnegative = out.min_real >= -1e-10;
  return out;
}

SpectrumCheck eig_trapped(const TrappedSetParams& p, double tol) {
  return match_spectrum(build_trapped_matrix(p), trapped_spectrum_prediction(p), tol);
}

SpectrumCheck eig_radial(const RadialSetParams& p, double tol) {
  return match_spectrum(build_radial_matrix(p).cast<cplx>(), radial_spectrum_prediction(p), tol);
}

double threshold_beta_hat(const RadialSetParams& p) {
  // a permutation makes the matrix lower triangular on its invariant pieces,
  // so its diagonal is its spectrum
  return build_radial_matrix(p).diagonal().minCoeff();
}

Eigen::Matrix<double, 14, 4> trapped_subspace_v1() {
  Eigen::Matrix<double, 14, 4> v = Eigen::Matrix<double, 14, 4>::Zero();
  v(3, 0) = v(6, 1) = v(8, 2) = v(13, 3) = 1;
  return v;
}

Eigen::Matrix<double, 14, 4> trapped_subspace_v2() {
  Eigen::Matrix<double, 14, 4> v = Eigen::Matrix<double, 14, 4>::Zero();
  v(0, 0) = 1, v(7, 0) = -1;               // f1 - f8
  v(1, 1) = 1, v(5, 1) = -1;               // f2 - f6
  v(0, 2) = 1, v(2, 2) = -1, v(7, 2) = 1;  // f1 - f3 + f8
  v(10, 3) = 1, v(12, 3) = -1;             // f11 - f13
  return v;
}

double invariant_subspace_defect(const Eigen::MatrixXcd& A, const Eigen::MatrixXd& basis) {
  const int n = int(basis.rows()), k = int(basis.cols());
  // rows where the basis is invertible: pick them greedily by full pivoting
  Eigen::FullPivLU<Eigen::MatrixXd> lu(basis.transpose());
  if (lu.rank() != k) throw UsageError("basis columns are dependent");
  std::vector<int> rows;
  for (int i = 0; i < k; ++i) rows.push_back(int(lu.permutationQ().indices()[i]));
  Eigen::MatrixXd Bs(k, k);
  for (int i = 0; i < k; ++i) Bs.row(i) = basis.row(rows[i]);
  const Eigen::MatrixXcd W = A * basis.cast<cplx>();
  double defect = 0.0;
  for (int c = 0; c < k; ++c) {
    Eigen::VectorXcd ws(k);
    for (int i = 0; i < k; ++i) ws[i] = W(rows[i], c);
    const Eigen::VectorXcd coef = Bs.cast<cplx>().partialPivLu().solve(ws);
    const Eigen::VectorXcd r = W.col(c) - basis.cast<cplx>() * coef;
    for (int i = 0; i < n; ++i) defect = std::max(defect, std::abs(r[i]));
  }
  return defect;
}

}  // namespace knds
