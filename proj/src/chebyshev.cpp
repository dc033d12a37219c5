#include "knds/chebyshev.hpp"

#include <algorithm>
#include <cmath>

#include "knds/errors.hpp"

namespace knds {

ChebGrid::ChebGrid(double a, double b, int n) : a_(a), b_(b) {
  if (n < 3) throw UsageError("Chebyshev grid needs at least 3 nodes");
  if (!(b > a)) throw DomainError("Chebyshev grid needs a < b");
  const int N = n - 1;
  const double h = 0.5 * (b - a);
  x_.resize(n);
  bary_.resize(n);
  for (int j = 0; j < n; ++j) {
    x_[j] = a + h * (1.0 - std::cos(M_PI * j / N));
    bary_[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == N) ? 0.5 : 1.0);
  }
  x_.front() = a;
  x_.back() = b;

  // t_i - t_j for t_j = -cos(pi j / N), via the product formula (no cancellation)
  auto dt = [&](int i, int j) {
    return 2.0 * std::sin(M_PI * (i + j) / (2.0 * N)) * std::sin(M_PI * (i - j) / (2.0 * N));
  };
  D_ = Eigen::MatrixXd::Zero(n, n);
  D2_ = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) D_(i, j) = (bary_[j] / bary_[i]) / dt(i, j);
  for (int i = 0; i < n; ++i) D_(i, i) = -D_.row(i).sum();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) D2_(i, j) = 2.0 * D_(i, j) * (D_(i, i) - 1.0 / dt(i, j));
  for (int i = 0; i < n; ++i) D2_(i, i) = -D2_.row(i).sum();
  D_ /= h;
  D2_ /= h * h;

  w_.resize(n);
  for (int k = 0; k < n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= N / 2; ++j) {
      const double bj = (2 * j == N) ? 1.0 : 2.0;
      s += bj / (4.0 * j * j - 1.0) * std::cos(2.0 * M_PI * j * k / N);
    }
    const double ck = (k == 0 || k == N) ? 1.0 : 2.0;
    w_[k] = h * ck / N * (1.0 - s);
  }
}

double ChebGrid::interpolate(const Eigen::VectorXd& f, double r) const {
  double num = 0.0, den = 0.0;
  for (int j = 0; j < size(); ++j) {
    const double d = r - x_[j];
    if (d == 0.0) return f[j];
    num += bary_[j] / d * f[j];
    den += bary_[j] / d;
  }
  return num / den;
}

bool ChebGrid::matches(const std::vector<double>& g) {
  const int n = int(g.size());
  if (n < 3) return false;
  const double a = g.front(), b = g.back(), tol = 1e-12 * (std::abs(a) + std::abs(b - a));
  for (int j = 0; j < n; ++j)
    if (std::abs(g[j] - (a + 0.5 * (b - a) * (1.0 - std::cos(M_PI * j / (n - 1))))) > tol) return false;
  return true;
}

Eigen::MatrixXd fornberg_weights(double z, const std::vector<double>& xs, int m) {
  const int n = int(xs.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m + 1, n);
  double c1 = 1.0, c4 = xs[0] - z;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = xs[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = xs[i] - xs[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
        c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
      c(0, j) = c4 * c(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

DiffMatrices diff_matrices(const std::vector<double>& grid) {
  const int n = int(grid.size());
  for (int i = 1; i < n; ++i)
    if (!(grid[i] > grid[i - 1])) throw DomainError("grid must be strictly increasing");
  if (ChebGrid::matches(grid)) {
    ChebGrid g(grid.front(), grid.back(), n);
    return {g.D(), g.D2(), true};
  }
  if (n < 3) throw UsageError("differentiation needs at least 3 grid points");
  const int width = std::min(n, 9);
  DiffMatrices out{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, n), false};
  for (int i = 0; i < n; ++i) {
    const int lo = std::clamp(i - width / 2, 0, n - width);
    std::vector<double> xs(grid.begin() + lo, grid.begin() + lo + width);
    const Eigen::MatrixXd c = fornberg_weights(grid[i], xs, 2);
    for (int j = 0; j < width; ++j) {
      out.D(i, lo + j) = c(1, j);
      out.D2(i, lo + j) = c(2, j);
    }
  }
  return out;
}

}  // namespace knds
