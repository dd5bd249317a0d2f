#pragma once

#include <span>
#include <vector>

namespace semflow {

/// Dense row-major matrix, used for the small 1D operators.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<std::size_t>(i) * cols + j]; }
};

/// Gauss-Lobatto-Legendre nodes, weights and nodal differentiation matrix
/// for polynomial degree N on [-1, 1]. Immutable after construction.
class Basis1D {
 public:
  /// Builds the basis for degree `order` (>= 1). Nodes are the roots of
  /// (1 - x^2) P'_N(x), obtained by Newton iteration in long double seeded
  /// with Chebyshev-Gauss-Lobatto points.
  explicit Basis1D(int order);

  int order() const noexcept { return order_; }
  int num_points() const noexcept { return order_ + 1; }
  std::span<const double> points() const noexcept { return points_; }
  std::span<const double> weights() const noexcept { return weights_; }

  /// D(i, j) = l_j'(xi_i).
  const Matrix& dmat() const noexcept { return dmat_; }
  /// Transpose of dmat(), stored for the weak-form contractions.
  const Matrix& dmat_t() const noexcept { return dmat_t_; }

 private:
  int order_;
  std::vector<double> points_;
  std::vector<double> weights_;
  Matrix dmat_;
  Matrix dmat_t_;
};

Basis1D make_basis(int order);

/// Copy of basis.dmat().
Matrix diff_matrix(const Basis1D& basis);

/// J(k, j) = l_j(target_k). Targets must lie in [-1, 1].
Matrix interp_matrix(const Basis1D& from, std::span<const double> to_points);

/// Legendre polynomial P_n(x) and its derivative, evaluated in long double.
struct LegendreValue {
  long double p;
  long double dp;
};
LegendreValue legendre(int n, long double x);

/// Gauss-Legendre rule with `n` points (used for over-integration).
struct GaussRule {
  std::vector<double> points;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int n);

}  // namespace semflow
