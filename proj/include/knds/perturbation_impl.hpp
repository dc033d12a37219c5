#pragma once
// Template bodies for ScalarMasterData; the polynomial blocks are kept in
// the printed (x, y, z, m, c^, c~) form so they can be compared term by term.

namespace knds {

template <class T>
AppendixPolys<T> ScalarMasterData::polys(const T& r) const {
  const auto s = point(r);
  const T &x = s.x, &y = s.y, &z = s.z, &H = s.H, &mu_ = s.mu;
  const T ch = c_hat(r);
  const double ct = c_tilde;
  AppendixPolys<T> P;
  P.P_X0 = (6.0 * (4.0 * z + m) * x - 64.0 * z * z - 16.0 * m * z) * y + 27.0 * x * x * x - 24.0 * (5.0 * z - m) * x * x +
           (152.0 * z * z - 2.0 * (35.0 * m - 12.0) * z + 3.0 * m * (3.0 * m + 2.0)) * x - 64.0 * z * z * z + 48.0 * m * z * z -
           8.0 * m * (m - 2.0) * z + 2.0 * m * m * (m + 2.0);
  P.P_X1 = 2.0 * (4.0 * z + m) * y + 9.0 * x * x - (16.0 * z - 5.0 * m + 6.0) * x + 8.0 * z * z - 6.0 * m * z - 4.0 * m;
  P.P_XA = -4.0 * (4.0 * z + m) * y - 18.0 * x * x + 4.0 * (8.0 * z - m + 6.0) * x - 16.0 * z * z + 4.0 * (m - 4.0) * z +
           2.0 * m * (m + 6.0);
  P.P_Y0 = 2.0 * (18.0 * x * x - 3.0 * (28.0 * z - m) * x + 96.0 * z * z - 8.0 * m * z) * y + 9.0 * x * x * x -
           6.0 * (10.0 * z - m) * x * x + (120.0 * z * z - 2.0 * (11.0 * m - 12.0) * z + 3.0 * m * (m + 2.0)) * x -
           64.0 * z * z * z + 16.0 * (m - 4.0) * z * z - 8.0 * m * (m + 2.0) * z;
  P.P_Y1 = 2.0 * (6.0 * x - 12.0 * z + m) * y + 3.0 * x * x - (12.0 * z + m + 6.0) * x + 8.0 * z * z + 2.0 * (m + 8.0) * z;
  P.P_YA = -4.0 * (6.0 * x - 12.0 * z + m) * y - 6.0 * x * x + 4.0 * (6.0 * z - m) * x - 16.0 * z * z + 4.0 * (m - 4.0) * z -
           2.0 * m * (m + 2.0);
  P.P_Z = P_Z(s);
  P.P_X = (9.0 * x - 36.0 * z + 3.0 * (12.0 * y - 6.0 - m)) * x - 6.0 * (12.0 * z - m) * y + 6.0 * (4.0 * z + m + 8.0) * z;
  P.P_Y = -3.0 * (9.0 * x - 16.0 * z + 5.0 * m - 6.0) * x - 6.0 * (4.0 * z + m) * y - 6.0 * (4.0 * z - 3.0 * m) * z + 12.0 * m;
  P.P_A = -8.0 * (ct + m * r) * z;

  P.P_Xp = -8.0 * z * H * mu_ - 3.0 * (9.0 * x - 8.0 * (5.0 * z - m)) * x * x - 3.0 * m * (3.0 * m + 2.0 + 2.0 * y) * x +
           2.0 * (35.0 * m - 12.0 * y - 12.0) * x * z + 64.0 * z * z * z - 8.0 * z * z * (19.0 * x - 8.0 * y + 6.0 * m) +
           8.0 * m * (2.0 * y + m - 2.0) * z - 2.0 * m * m * (m + 2.0) -
           (4.0 * z - ct / r) * ((9.0 * x - 16.0 * z + 2.0 * m - 12.0) * x + 2.0 * (m + 4.0 * z) * y +
                                 2.0 * (4.0 * z - m + 4.0) * z - m * (m + 6.0));
  const T x2 = x * x, x3 = x2 * x, x4 = x3 * x, z2 = z * z, z3 = z2 * z;
  P.P_Xm = 81.0 * (4.0 * z - x) * x4 - 18.0 * x4 * (4.0 * m + 3.0 * ch) -
           3.0 * x3 * (144.0 * z2 - 2.0 * z * (36.0 * ch + 23.0 * m) + m * (16.0 * ch + 3.0 * (3.0 * m + 2.0) + 6.0 * y)) -
           2.0 * x2 *
               (-96.0 * z3 + 8.0 * z2 * (18.0 * ch + m) - 2.0 * m * z * (35.0 * ch + 5.0 * m + 24.0) +
                3.0 * m * (-8.0 * y * z + (m + 2.0) * (m + 3.0 * ch) + 2.0 * ch * (y - 2.0))) -
           4.0 * m * m * (m + 2.0) * ch * x - 64.0 * x * z3 * (m - 2.0 * ch) - 16.0 * m * (6.0 * ch + 4.0 * y - m + 4.0) * x * z2 +
           8.0 * m * x * z * (m * (3.0 * ch + m + 6.0) + (4.0 * ch - 2.0 * m) * y);
  P.Q_p = 12.0 * x2 + (3.0 * (y - 9.0 * z - 3.0) + 5.0 * m + 2.0 * ch) * x + 16.0 * z2 - 2.0 * z * (3.0 * m + ch - 4.0) +
          2.0 * (m + ch) * y - 2.0 * (2.0 * m + ch);
  P.Q_m = -16.0 * r * a_plus(r) * mu_ * Q / (r * r) + (9.0 * x - 16.0 * z + 5.0 * m - 6.0) * x + 8.0 * z2 +
          2.0 * (m + 4.0 * z) * y - 6.0 * m * z - 4.0 * m;
  P.P_Yp = -9.0 * x3 + 6.0 * x2 * (3.0 * y + z + m - ch + 3.0) + 16.0 * m * z2 + 4.0 * x * z * (-12.0 * y - 6.0 * m + ch) +
           x * (12.0 * (2.0 * m + ch) * y + m * (7.0 * m + 12.0) + 12.0 * ch) - 16.0 * z * ((3.0 * m + 2.0 * ch) * y - m - 1.0) +
           4.0 * m * m * y + 2.0 * (m + 2.0) * (m + 2.0) * (-2.0 * z + m + ch - 2.0) + 16.0 * m * z + 8.0 * (m - ch + 2.0);
  P.P_Ym = 81.0 * x4 + 54.0 * x3 * (6.0 * y + 4.0 * z + m + ch + 1.0) +
           9.0 * x2 *
               (16.0 * z2 - 2.0 * z * (24.0 * x - m + 8.0 * ch) - 6.0 * x + 24.0 * (ch - 4.0 * z) * y +
                m * (6.0 * y + 3.0 * m + 4.0 * ch + 6.0)) +
           6.0 * x *
               (16.0 * z2 * (6.0 * y - 3.0 * m + ch) + 2.0 * z * (24.0 * (m - 2.0 * ch) * y + m * (m - 3.0 * ch - 12.0)) +
                3.0 * m * (2.0 * y + m + 2.0) * ch) +
           8.0 * z *
               (24.0 * m * z2 - 6.0 * z * (4.0 * (3.0 * m - 2.0 * ch) * y + m * (m - 4.0)) +
                3.0 * m * m * (2.0 * y + m - ch + 2.0) - 12.0 * m * ch);
  return P;
}

template <class T>
StationaryCoeffs<T> ScalarMasterData::stationary(const T& r, cplx sigma) const {
  const auto s = point(r);
  const auto P = polys(r);
  const cplx s2 = sigma * sigma;
  StationaryCoeffs<T> C;
  C.Htilde = s.H * (k2 * s.mup - 4.0 * s2 * r);
  const T& Ht = C.Htilde;
  const T ap = a_plus(r), am = a_minus(r);
  C.C_Xp = ap * P.P_X / (3.0 * Ht);
  C.C_Yp = ap * P.P_Y / (3.0 * Ht);
  C.C_Ap = 1.0 + s.mu * (m + 2.0) * P.P_A / (c_tilde * r * Ht);
  C.C_Adp = 2.0 * s.mu * s.mu * P.P_A / (c_tilde * Ht);
  C.C_Xm = am * P.P_X / (3.0 * Ht);
  C.C_Ym = am * P.P_Y / (3.0 * Ht);
  C.C_Am = b_minus * (1.0 + 6.0 * am * s.mu * (m + 2.0) * s.x / (r * Ht));
  C.C_Adm = 4.0 * b_minus * s.mu * s.mu * (c_tilde - 4.0 * r * s.z) / (r * Ht);
  return C;
}

template <class T>
std::array<T, 4> ScalarMasterData::xyza_from_psi(const T& r, cplx sigma, const T& pp, const T& ppd, const T& pm,
                                                 const T& pmd) const {
  const auto s = point(r);
  const auto P = polys(r);
  const cplx s2 = sigma * sigma;
  const T ch = c_hat(r);
  const T &H = s.H, &x = s.x, &z = s.z, &mu_ = s.mu;
  const double ct = c_tilde, M3 = 3.0 * M;
  T X = -1.0 * (4.0 * Q * s2 / (ch * mu_) + 2.0 * Q * P.P_Xp / (ch * r * r * H * H)) * pp +
        (M3 * s2 / (ch * mu_) + 3.0 * P.P_Xm / (8.0 * ct * ch * H * H)) * pm - (2.0 * Q / (ch * r * H)) * P.Q_p * ppd +
        (3.0 * x / (4.0 * ch * H)) * P.Q_m * pmd;
  T Y = (4.0 * Q * s2 / (ch * mu_) - 4.0 * Q * z * P.P_Yp / (r * ch * ct * H * H)) * pp -
        (M3 * s2 / (ch * mu_) + x * P.P_Ym / (8.0 * ct * ch * H * H)) * pm + (2.0 * Q / (ch * r)) * (4.0 * mu_ + P.Q_p / H) * ppd -
        (3.0 * x / (4.0 * ch)) * (4.0 * mu_ + P.Q_m / H) * pmd;
  T A = ((ct / r - 4.0 * z) / (2.0 * ch)) * pp + (2.0 * z * (ct + m * r) / (b_minus * ch * ct)) * pm;
  // Phi from inverting Psi+- = a+- Phi + b+- A; det a- - a+ b- = c^ r / (3M)
  T Phi = (pm - b_minus * pp) / (a_minus(r) - a_plus(r) * b_minus);
  return {X, Y, Phi, A};
}

template <class T>
std::array<T, 3> ScalarMasterData::xyz_from_phi(const T& r, cplx sigma, const T& phi, const T& phid, const T& A,
                                               const T& Ad) const {
  const auto s = point(r);
  const auto P = polys(r);
  const cplx s2 = sigma * sigma;
  const T &H = s.H, &mu_ = s.mu;
  T X = (s2 * r / mu_ - P.P_X0 / (2.0 * r * H * H)) * phi + P.P_X1 / (2.0 * H) * phid + 2.0 * Q * P.P_XA / (r * r * H * H) * A +
        8.0 * Q * mu_ / (r * H) * Ad;
  T Y = (-1.0 * s2 * r / mu_ - P.P_Y0 / (2.0 * r * H * H)) * phi + P.P_Y1 / (2.0 * H) * phid +
        2.0 * Q * P.P_YA / (r * r * H * H) * A - 8.0 * Q * mu_ / (r * H) * Ad;
  T Z = P.P_Z / (2.0 * H) * phi - r * mu_ * phid + 8.0 * Q * mu_ / (r * H) * A;
  return {X, Y, Z};
}

template <class T>
XYZSystem<T> ScalarMasterData::system(const T& r, cplx sigma) const {
  const auto s = point(r);
  const cplx s2 = sigma * sigma;
  const T &mu_ = s.mu, &mp = s.mup;
  const T r2 = r * r, r4 = r2 * r2;
  XYZSystem<T> S;
  const T zero = 0.0 * r;
  S.Tm = {{{zero, mp / mu_ - 2.0 / r, k2 / (r2 * mu_) - s2 / (mu_ * mu_)},
           {mp / (2.0 * mu_), -1.0 * mp / (2.0 * mu_), s2 / (mu_ * mu_)},
           {zero + 1.0, zero, zero}}};
  S.gamma = {-1.0 * s2 / mu_ - L + Q2 / r4 - mp * mp / (4.0 * mu_) - mp / r,
             -1.0 * s2 / mu_ + (k2 - 2.0) / r2 + L + 3.0 * Q2 / r4 - mp * mp / (4.0 * mu_) + 2.0 * mp / r,
             2.0 * s2 / (r * mu_) - k2 * mp / (2.0 * r2 * mu_)};
  const T c = 4.0 * Q / r2;
  S.f = {{{zero, c, zero, zero}, {zero, -1.0 * c, zero, zero}, {c, zero, zero, zero}}};
  S.h = {-4.0 * Q * k2 / r4, -8.0 * Q * mu_ / (r2 * r), zero, zero};
  return S;
}

}  // namespace knds
