#pragma once
// Chebyshev-Lobatto collocation on [a, b] (nodes ascending), plus a
// high-order finite-difference fallback for arbitrary increasing grids.
#include <vector>

#include <Eigen/Dense>

namespace knds {

class ChebGrid {
public:
  // n nodes, n >= 3
  ChebGrid(double a, double b, int n);

  int size() const { return int(x_.size()); }
  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<double>& nodes() const { return x_; }
  const Eigen::MatrixXd& D() const { return D_; }
  const Eigen::MatrixXd& D2() const { return D2_; }
  // Clenshaw-Curtis weights: sum w_j f(x_j) ~ \int_a^b f
  const Eigen::VectorXd& weights() const { return w_; }

  // barycentric interpolation of nodal values at any r in [a, b]
  double interpolate(const Eigen::VectorXd& f, double r) const;

  // true when `grid` coincides with some Chebyshev-Lobatto grid to 1e-12 relative
  static bool matches(const std::vector<double>& grid);

private:
  double a_, b_;
  std::vector<double> x_;
  Eigen::MatrixXd D_, D2_;
  Eigen::VectorXd w_, bary_;
};

// Fornberg weights for derivatives 0..m at z from the stencil points xs.
// Returns (m+1) x xs.size().
Eigen::MatrixXd fornberg_weights(double z, const std::vector<double>& xs, int m);

// First and second derivative matrices on an arbitrary increasing grid:
// spectral when the grid is Chebyshev-Lobatto, otherwise 9-point stencils.
struct DiffMatrices {
  Eigen::MatrixXd D, D2;
  bool spectral;
};
DiffMatrices diff_matrices(const std::vector<double>& grid);

}  // namespace knds
