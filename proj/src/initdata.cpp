#include "knds/initdata.hpp"

#include <algorithm>
#include <cmath>

#include "knds/chebyshev.hpp"
#include "knds/errors.hpp"

namespace knds {

using Eigen::VectorXd;

namespace {

VectorXd vec(const std::vector<double>& v) { return Eigen::Map<const VectorXd>(v.data(), Eigen::Index(v.size())); }
std::vector<double> stdvec(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

VectorXd sample(const RadialFn& f, const std::vector<double>& r) {
  VectorXd out = VectorXd::Zero(Eigen::Index(r.size()));
  if (f)
    for (size_t j = 0; j < r.size(); ++j) out[j] = f(r[j]);
  return out;
}

double sup(const VectorXd& f, const std::vector<bool>& mask) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < f.size(); ++j)
    if (mask[j]) m = std::max(m, std::abs(f[j]));
  return m;
}

// discrete H^k norm, k <= 2: sqrt(\int f^2 + f'^2 (+ f''^2))
double sobolev(const ChebGrid& g, const VectorXd& f, int k) {
  VectorXd s = f.cwiseAbs2();
  if (k >= 1) s += (g.D() * f).cwiseAbs2();
  if (k >= 2) s += (g.D2() * f).cwiseAbs2();
  return std::sqrt(std::max(0.0, g.weights().dot(s)));
}

}  // namespace

void RadialDataSet::validate() const {
  const size_t n = grid.size();
  for (auto* f : {&h_rr, &h_sphere, &k_rr, &k_sphere, &E_r, &B_r})
    if (f->size() != n) throw UsageError("radial data fields must match the grid length");
  if (n < 3) throw UsageError("radial data needs at least 3 grid points");
  for (size_t j = 0; j < n; ++j) {
    if (j > 0 && !(grid[j] > grid[j - 1])) throw DomainError("grid must be strictly increasing");
    if (!(h_rr[j] > 0.0) || !(h_sphere[j] > 0.0)) throw DomainError("metric components must be positive");
  }
}

nlohmann::ordered_json RadialDataSet::to_json() const {
  return {{"grid", grid}, {"h_rr", h_rr}, {"h_sphere", h_sphere}, {"k_rr", k_rr},
          {"k_sphere", k_sphere}, {"E_r", E_r}, {"B_r", B_r}};
}

RadialDataSet RadialDataSet::from_json(const nlohmann::json& j) {
  RadialDataSet d;
  try {
    j.at("grid").get_to(d.grid);
    j.at("h_rr").get_to(d.h_rr);
    j.at("h_sphere").get_to(d.h_sphere);
    j.at("k_rr").get_to(d.k_rr);
    j.at("k_sphere").get_to(d.k_sphere);
    j.at("E_r").get_to(d.E_r);
    j.at("B_r").get_to(d.B_r);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed radial data: ") + e.what());
  }
  d.validate();
  return d;
}

RadialDataSet rnds_slice(const BlackHoleParams& p, int n, double margin) {
  const HorizonData h = horizons(p);
  if (!h.nondegenerate) throw DegenerateError("RNdS slice needs nondegenerate parameters");
  if (!(margin > 0.0 && margin < 0.5)) throw UsageError("slice margin must lie in (0, 1/2)");
  const double width = h.r_plus - h.r_minus;
  ChebGrid g(h.r_minus + margin * width, h.r_plus - margin * width, n);
  RadialDataSet d;
  d.grid = g.nodes();
  for (double r : d.grid) {
    const double m = mu(p, r);
    d.h_rr.push_back(1.0 / m);
    d.h_sphere.push_back(r * r);
    d.k_rr.push_back(0.0);
    d.k_sphere.push_back(0.0);
    d.E_r.push_back(p.charge_e / (r * r * std::sqrt(m)));
    d.B_r.push_back(p.charge_m / (r * r * std::sqrt(m)));
  }
  return d;
}

Charges charges(const RadialDataSet& d, double r0) {
  d.validate();
  const double a = d.grid.front(), b = d.grid.back(), slack = 1e-14 * (std::abs(a) + std::abs(b));
  if (!(r0 >= a - slack && r0 <= b + slack)) throw DomainError("charge radius outside the data grid");
  r0 = std::clamp(r0, a, b);
  const int n = d.size();
  VectorXd qe(n), qm(n);
  for (int j = 0; j < n; ++j) {
    const double s = d.h_sphere[j] / std::sqrt(d.h_rr[j]);
    qe[j] = s * d.E_r[j];
    qm[j] = s * d.B_r[j];
  }
  if (ChebGrid::matches(d.grid)) {
    ChebGrid g(a, b, n);
    return {g.interpolate(qe, r0), g.interpolate(qm, r0)};
  }
  const int width = std::min(n, 9);
  const int near = int(std::lower_bound(d.grid.begin(), d.grid.end(), r0) - d.grid.begin());
  const int lo = std::clamp(near - width / 2, 0, n - width);
  std::vector<double> xs(d.grid.begin() + lo, d.grid.begin() + lo + width);
  const Eigen::MatrixXd c = fornberg_weights(r0, xs, 0);
  return {c.row(0).dot(qe.segment(lo, width)), c.row(0).dot(qm.segment(lo, width))};
}

RadialDataSet duality_rotate(const RadialDataSet& d, double theta) {
  RadialDataSet out = d;
  const double c = std::cos(theta), s = std::sin(theta);
  for (int j = 0; j < d.size(); ++j) {
    out.E_r[j] = c * d.E_r[j] - s * d.B_r[j];
    out.B_r[j] = s * d.E_r[j] + c * d.B_r[j];
  }
  return out;
}

double find_theta(const Charges& q) { return std::atan2(-q.Qm, q.Qe); }

double ResidualNorms::max() const { return std::max({hamiltonian, momentum, gauss_E, gauss_B}); }

ConstraintResidual constraint_residual(const RadialDataSet& d, double lambda, double margin) {
  d.validate();
  const DiffMatrices dm = diff_matrices(d.grid);
  const VectorXd X = vec(d.h_rr), Y = vec(d.h_sphere), E = vec(d.E_r), B = vec(d.B_r);
  const VectorXd Kr = vec(d.k_rr).cwiseQuotient(X), Kt = vec(d.k_sphere).cwiseQuotient(Y);
  const VectorXd Xp = dm.D * X, Yp = dm.D * Y, Ypp = dm.D2 * Y;
  const VectorXd sX = X.cwiseSqrt();
  const VectorXd flux_e = Y.cwiseProduct(E).cwiseQuotient(sX), flux_b = Y.cwiseProduct(B).cwiseQuotient(sX);
  const VectorXd dKt = dm.D * Kt, dfe = dm.D * flux_e, dfb = dm.D * flux_b;

  const int n = d.size();
  VectorXd ham(n), mom(n), ge(n), gb(n);
  for (int j = 0; j < n; ++j) {
    const double yl = Yp[j] / Y[j];
    // scalar curvature of X dr^2 + Y (round metric)
    const double Rh = (0.5 * yl * yl - 2.0 * Ypp[j] / Y[j] + Xp[j] * yl / X[j]) / X[j] + 2.0 / Y[j];
    const double trk = Kr[j] + 2.0 * Kt[j], k2 = Kr[j] * Kr[j] + 2.0 * Kt[j] * Kt[j];
    ham[j] = Rh - k2 + trk * trk - 2.0 * lambda - 2.0 * (E[j] * E[j] + B[j] * B[j]) / X[j];
    mom[j] = (2.0 * dKt[j] - yl * (Kr[j] - Kt[j])) / sX[j];
    ge[j] = dfe[j] / (sX[j] * Y[j]);
    gb[j] = dfb[j] / (sX[j] * Y[j]);
  }
  const double lo = d.grid.front() + margin * (d.grid.back() - d.grid.front());
  const double hi = d.grid.back() - margin * (d.grid.back() - d.grid.front());
  std::vector<bool> all(n, true), inner(n);
  for (int j = 0; j < n; ++j) inner[j] = d.grid[j] >= lo && d.grid[j] <= hi;

  ConstraintResidual r;
  r.spectral = dm.spectral;
  r.interior = {sup(ham, inner), sup(mom, inner), sup(ge, inner), sup(gb, inner)};
  r.full = {sup(ham, all), sup(mom, all), sup(ge, all), sup(gb, all)};
  return r;
}

nlohmann::ordered_json residual_json(const ConstraintResidual& r) {
  auto one = [](const ResidualNorms& n) {
    return nlohmann::ordered_json{
        {"hamiltonian", n.hamiltonian}, {"momentum", n.momentum}, {"gauss_E", n.gauss_E}, {"gauss_B", n.gauss_B}};
  };
  return {{"interior", one(r.interior)}, {"full", one(r.full)}, {"spectral", r.spectral}};
}

RadialFn ConformalSeed::bump(double amp, double center, double halfwidth) {
  return [=](double r) {
    const double s = (r - center) / halfwidth;
    return std::abs(s) < 1.0 ? amp * std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0;
  };
}

ConformalSeed& ConformalSeed::with_charge_shift(double dQe, double dQm) {
  if (dQe != 0.0) Etilde_fn = [dQe](double r) { return dQe / (r * r); };
  if (dQm != 0.0) Btilde_fn = [dQm](double r) { return dQm / (r * r); };
  return *this;
}

double ConformalSolution::psi_at(double r) const {
  ChebGrid g(grid.front(), grid.back(), int(grid.size()));
  return g.interpolate(vec(psi), r);
}

double ConformalSolution::V2_at(double r) const {
  ChebGrid g(grid.front(), grid.back(), int(grid.size()));
  return g.interpolate(vec(v), r);
}

nlohmann::ordered_json ConformalSolution::to_json() const {
  return {{"grid", grid},
          {"psi", psi},
          {"V2", v},
          {"DV2", w},
          {"residuals", residual_json(residuals)},
          {"equation_residuals", {{"hamiltonian", hamiltonian_eq}, {"momentum", momentum_eq}}},
          {"iterations", iterations},
          {"seed_norm", seed_norm},
          {"solution_norm", solution_norm},
          {"constant_estimate", constant_estimate()},
          {"data", data.to_json()}};
}

namespace {

// Everything about the background and the seed that does not depend on phi.
struct Problem {
  const ChebGrid& g;
  double lambda;
  VectorXd X0, Y0, R0, H, dH, q, e, b;  // q: trace-free amplitude of Q0 + Q~_1
  VectorXd c1;                          // Laplacian: (1/X0)(f'' + c1 f')
  VectorXd divq;                        // div(q diag(2,-1,-1)) radial component
  Eigen::MatrixXd W;                    // v -> w, the conformal Killing operator
  Eigen::MatrixXd A;                    // div D, end rows replaced by v' = 0
  Eigen::PartialPivLU<Eigen::MatrixXd> mom_lu;
  int n;

  Problem(const ChebGrid& grid, const RadialDataSet& bg, const ConformalSeed& s, double lam) : g(grid), lambda(lam) {
    n = g.size();
    const auto& r = bg.grid;
    const auto& D = g.D();
    X0 = vec(bg.h_rr);
    Y0 = vec(bg.h_sphere);
    const VectorXd Xp = D * X0, Yp = D * Y0, Ypp = g.D2() * Y0;
    const VectorXd xl = Xp.cwiseQuotient(X0), yl = Yp.cwiseQuotient(Y0);
    R0 = ((0.5 * yl.cwiseAbs2() - 2.0 * Ypp.cwiseQuotient(Y0) + xl.cwiseProduct(yl)).cwiseQuotient(X0)).array() +
         2.0 / Y0.array();
    c1 = yl - 0.5 * xl;

    const VectorXd Kr = vec(bg.k_rr).cwiseQuotient(X0), Kt = vec(bg.k_sphere).cwiseQuotient(Y0);
    H = (Kr + 2.0 * Kt) / 3.0 + sample(s.H0_fn, r) + sample(s.Htilde_fn, r);
    dH = D * H;
    q = (Kr - Kt) / 3.0;
    for (int j = 0; j < n; ++j) q[j] += s.Qtilde_amp * std::pow(Y0[0] / Y0[j], 1.5);
    divq = 2.0 * (D * q) + 3.0 * yl.cwiseProduct(q);

    const VectorXd sX = X0.cwiseSqrt();
    e = vec(bg.E_r).cwiseQuotient(sX) + sample(s.Etilde_fn, r);
    b = vec(bg.B_r).cwiseQuotient(sX) + sample(s.Btilde_fn, r);

    // D V for V = v d_r: w = (2 v' + v (X0'/X0 - Y0'/Y0)) / 3
    W = (2.0 * D + Eigen::MatrixXd((xl - yl).asDiagonal())) / 3.0;
    A = 2.0 * D * W + 3.0 * yl.asDiagonal() * W;
    A.row(0) = D.row(0);
    A.row(n - 1) = D.row(n - 1);
    mom_lu.compute(A);
  }

  VectorXd momentum_rhs(const VectorXd& phi) const {
    VectorXd f = 2.0 * phi.array().pow(6).matrix().cwiseProduct(dH) - divq;
    f[0] = f[n - 1] = 0.0;
    return f;
  }
  // trace-free amplitude u of Q0 + Q~_1 + D V2
  VectorXd solve_u(const VectorXd& phi, VectorXd& v) const {
    v = mom_lu.solve(momentum_rhs(phi));
    return q + W * v;
  }

  VectorXd hamiltonian(const VectorXd& psi, const VectorXd& u) const {
    const VectorXd lap = (g.D2() * psi + c1.cwiseProduct(g.D() * psi)).cwiseQuotient(X0);
    VectorXd F(n);
    for (int j = 0; j < n; ++j) {
      const double p = 1.0 + psi[j];
      F[j] = -lap[j] + 0.125 * R0[j] * p - 0.75 * u[j] * u[j] * std::pow(p, -7) +
             0.25 * (3.0 * H[j] * H[j] - lambda) * std::pow(p, 5) - 0.25 * (e[j] * e[j] + b[j] * b[j]) * std::pow(p, -3);
    }
    F[0] = g.D().row(0).dot(psi);
    F[n - 1] = g.D().row(n - 1).dot(psi);
    return F;
  }

  Eigen::MatrixXd jacobian(const VectorXd& psi, const VectorXd& u) const {
    Eigen::MatrixXd J = -(X0.cwiseInverse().asDiagonal() * (g.D2() + c1.asDiagonal() * g.D()));
    for (int j = 0; j < n; ++j) {
      const double p = 1.0 + psi[j];
      J(j, j) += 0.125 * R0[j] + 5.25 * u[j] * u[j] * std::pow(p, -8) +
                 1.25 * (3.0 * H[j] * H[j] - lambda) * std::pow(p, 4) + 0.75 * (e[j] * e[j] + b[j] * b[j]) * std::pow(p, -4);
    }
    J.row(0) = g.D().row(0);
    J.row(n - 1) = g.D().row(n - 1);
    return J;
  }

  RadialDataSet reconstruct(const std::vector<double>& r, const VectorXd& psi, const VectorXd& u) const {
    RadialDataSet d;
    d.grid = r;
    for (int j = 0; j < n; ++j) {
      const double p = 1.0 + psi[j], p4 = std::pow(p, 4), pm6 = std::pow(p, -6);
      const double X = p4 * X0[j], Y = p4 * Y0[j];
      d.h_rr.push_back(X);
      d.h_sphere.push_back(Y);
      d.k_rr.push_back((H[j] + 2.0 * pm6 * u[j]) * X);
      d.k_sphere.push_back((H[j] - pm6 * u[j]) * Y);
      d.E_r.push_back(e[j] * std::sqrt(X0[j]) / (p * p));
      d.B_r.push_back(b[j] * std::sqrt(X0[j]) / (p * p));
    }
    return d;
  }
};

void check_divergence_free(const VectorXd& f, const VectorXd& Y, const char* name) {
  const VectorXd flux = f.cwiseProduct(Y);
  const double mean = flux.mean(), scale = flux.cwiseAbs().maxCoeff();
  if ((flux.array() - mean).abs().maxCoeff() > 1e-10 * scale)
    throw DomainError(std::string(name) + " is not divergence-free: h_sphere * field must be constant");
}

}  // namespace

ConformalSolution solve_conformal(const RadialDataSet& bg, const ConformalSeed& seed, double lambda,
                                  const SolveOptions& opt) {
  bg.validate();
  if (!ChebGrid::matches(bg.grid)) throw UsageError("solve_conformal needs a Chebyshev-Lobatto background grid");
  if (!(opt.tol > 0.0) || opt.max_iterations < 1) throw UsageError("solver tolerance and iteration cap must be positive");
  const ChebGrid g(bg.grid.front(), bg.grid.back(), bg.size());
  const auto& r = bg.grid;
  const VectorXd Y0 = vec(bg.h_sphere);

  // seed components and their norms
  const VectorXd Ht = sample(seed.Htilde_fn, r), Et = sample(seed.Etilde_fn, r), Bt = sample(seed.Btilde_fn, r);
  check_divergence_free(Et, Y0, "E~");
  check_divergence_free(Bt, Y0, "B~");
  VectorXd qt(g.size());
  for (int j = 0; j < g.size(); ++j) qt[j] = seed.Qtilde_amp * std::pow(Y0[0] / Y0[j], 1.5);

  const Problem P(g, bg, seed, lambda);
  const VectorXd H0 = P.H - Ht;
  ConformalSolution sol;
  sol.grid = r;
  sol.seed_norm = sobolev(g, Ht, 1) + sobolev(g, qt, 1) + sobolev(g, Et, 1) + sobolev(g, Bt, 1);
  if (sol.seed_norm > opt.epsilon || sobolev(g, H0, 1) > opt.epsilon)
    throw DomainError("seed or background mean curvature exceeds the smallness threshold " + std::to_string(opt.epsilon));

  VectorXd psi = VectorXd::Zero(g.size()), v = VectorXd::Zero(g.size());
  VectorXd u = P.q;
  auto finish = [&](int its) {
    sol.psi = stdvec(psi);
    sol.v = stdvec(v);
    sol.w = stdvec(u - P.q);
    sol.data = P.reconstruct(r, psi, u);
    sol.residuals = constraint_residual(sol.data, lambda, opt.margin);
    const VectorXd F = P.hamiltonian(psi, u);
    const VectorXd M = P.A * v - P.momentum_rhs(VectorXd::Ones(g.size()) + psi);
    sol.hamiltonian_eq = F.segment(1, g.size() - 2).cwiseAbs().maxCoeff();
    sol.momentum_eq = M.segment(1, g.size() - 2).cwiseAbs().maxCoeff();
    sol.iterations = its;
    sol.solution_norm = sobolev(g, psi, 2) + sobolev(g, v, 1);
  };

  // the initial residual check: unperturbed data are returned untouched
  finish(0);
  if (sol.residuals.interior.max() < opt.tol) {
    sol.data = bg;
    sol.residuals = constraint_residual(bg, lambda, opt.margin);
    return sol;
  }

  VectorXd prev = psi;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    u = P.solve_u(VectorXd::Ones(g.size()) + psi, v);
    // Newton with backtracking on the Hamiltonian equation, V2 frozen
    VectorXd F = P.hamiltonian(psi, u);
    double fn = F.cwiseAbs().maxCoeff();
    for (int k = 0; k < 30; ++k) {
      const VectorXd step = P.jacobian(psi, u).partialPivLu().solve(-F);
      double alpha = 1.0;
      VectorXd trial, Ft;
      for (;;) {
        trial = psi + alpha * step;
        if ((trial.array() > -1.0).all()) {
          Ft = P.hamiltonian(trial, u);
          if (Ft.cwiseAbs().maxCoeff() <= (1.0 - 1e-4 * alpha) * fn || alpha < 1e-3) break;
        }
        alpha *= 0.5;
        if (alpha < 1e-6) throw ConformalFactorCollapse("line search cannot keep phi positive");
      }
      psi = trial;
      F = Ft;
      fn = F.cwiseAbs().maxCoeff();
      if (alpha * step.cwiseAbs().maxCoeff() <= 1e-15 * (1.0 + psi.cwiseAbs().maxCoeff())) break;
    }
    if (!((psi.array() > -1.0).all())) throw ConformalFactorCollapse("phi <= 0 encountered");

    finish(it);
    if (sol.residuals.interior.max() < opt.tol) return sol;
    const double change = (psi - prev).cwiseAbs().maxCoeff();
    prev = psi;
    if (it > 2 && change <= 1e-15 * (1.0 + psi.cwiseAbs().maxCoeff()))
      throw NoConvergence("constraint residuals stalled at " + std::to_string(sol.residuals.interior.max()) +
                          " (hamiltonian " + std::to_string(sol.residuals.interior.hamiltonian) + ", momentum " +
                          std::to_string(sol.residuals.interior.momentum) + ")");
  }
  throw NoConvergence("no convergence after " + std::to_string(opt.max_iterations) + " sweeps; residual " +
                      std::to_string(sol.residuals.interior.max()));
}

}  // namespace knds
