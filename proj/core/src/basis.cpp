#include "semflow/basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "semflow/error.hpp"

namespace semflow {
namespace {

constexpr int kMaxNewton = 100;
constexpr long double kNewtonTol = 1e-14L;

}  // namespace

LegendreValue legendre(int n, long double x) {
  if (n == 0) return {1.0L, 0.0L};
  long double p0 = 1.0L;
  long double p1 = x;
  for (int k = 2; k <= n; ++k) {
    const long double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  // P'_n from the recurrence (1 - x^2) P'_n = n (P_{n-1} - x P_n); at the
  // endpoints use P'_n(+-1) = (+-1)^{n+1} n(n+1)/2.
  long double dp;
  if (std::fabs(1.0L - x * x) < 1e-30L) {
    dp = 0.5L * n * (n + 1) * ((x > 0 || n % 2 == 1) ? 1.0L : -1.0L);
  } else {
    dp = n * (p0 - x * p1) / (1.0L - x * x);
  }
  return {p1, dp};
}

Basis1D::Basis1D(int order) : order_(order) {
  if (order < 1) {
    throw std::invalid_argument("Basis1D: polynomial order must be >= 1, got " +
                                std::to_string(order));
  }
  const int n = order;
  const int np = n + 1;
  std::vector<long double> x(np);
  x[0] = -1.0L;
  x[n] = 1.0L;
  for (int i = 1; i < n; ++i) {
    // Chebyshev-Gauss-Lobatto seed, ascending.
    long double xi = -std::cos(std::numbers::pi_v<long double> * i / n);
    bool converged = false;
    for (int it = 0; it < kMaxNewton; ++it) {
      // Newton step on (1 - x^2) P'_N written as x P_N - P_{N-1}.
      const LegendreValue pn = legendre(n, xi);
      const LegendreValue pm = legendre(n - 1, xi);
      const long double f = xi * pn.p - pm.p;
      const long double df = (n + 1) * pn.p;
      const long double dx = f / df;
      xi -= dx;
      if (std::fabs(dx) < kNewtonTol) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw ConvergenceError("Basis1D: GLL root " + std::to_string(i) + " for N=" +
                             std::to_string(n) + " did not converge");
    }
    x[i] = xi;
  }

  points_.resize(np);
  weights_.resize(np);
  std::vector<long double> pn(np);
  for (int i = 0; i < np; ++i) {
    pn[i] = legendre(n, x[i]).p;
    points_[i] = static_cast<double>(x[i]);
    weights_[i] = static_cast<double>(2.0L / (n * (n + 1) * pn[i] * pn[i]));
  }

  dmat_ = Matrix(np, np);
  for (int i = 0; i < np; ++i) {
    long double rowsum = 0.0L;
    for (int j = 0; j < np; ++j) {
      if (i == j) continue;
      const long double dij = pn[i] / (pn[j] * (x[i] - x[j]));
      dmat_(i, j) = static_cast<double>(dij);
      rowsum += dij;
    }
    // Diagonal from the zero row-sum identity (exact derivative of 1).
    dmat_(i, i) = static_cast<double>(-rowsum);
  }
  dmat_t_ = Matrix(np, np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j) dmat_t_(j, i) = dmat_(i, j);
}

Basis1D make_basis(int order) { return Basis1D(order); }

Matrix diff_matrix(const Basis1D& basis) { return basis.dmat(); }

Matrix interp_matrix(const Basis1D& from, std::span<const double> to_points) {
  const int np = from.num_points();
  const auto xs = from.points();
  // Barycentric weights in long double.
  std::vector<long double> bw(np, 1.0L);
  for (int j = 0; j < np; ++j)
    for (int k = 0; k < np; ++k)
      if (k != j) bw[j] /= (static_cast<long double>(xs[j]) - xs[k]);

  Matrix J(static_cast<int>(to_points.size()), np);
  for (std::size_t k = 0; k < to_points.size(); ++k) {
    const double t = to_points[k];
    if (!(t >= -1.0 && t <= 1.0)) {
      throw std::invalid_argument("interp_matrix: target point " + std::to_string(t) +
                                  " outside [-1, 1]");
    }
    int exact = -1;
    for (int j = 0; j < np; ++j)
      if (t == xs[j]) exact = j;
    if (exact >= 0) {
      J(static_cast<int>(k), exact) = 1.0;
      continue;
    }
    long double denom = 0.0L;
    std::vector<long double> terms(np);
    for (int j = 0; j < np; ++j) {
      terms[j] = bw[j] / (static_cast<long double>(t) - xs[j]);
      denom += terms[j];
    }
    for (int j = 0; j < np; ++j) J(static_cast<int>(k), j) = static_cast<double>(terms[j] / denom);
  }
  return J;
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one point");
  GaussRule rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    long double x = -std::cos(std::numbers::pi_v<long double> * (i + 0.75L) / (n + 0.5L));
    bool converged = false;
    for (int it = 0; it < kMaxNewton; ++it) {
      const LegendreValue v = legendre(n, x);
      const long double dx = v.p / v.dp;
      x -= dx;
      if (std::fabs(dx) < kNewtonTol) {
        converged = true;
        break;
      }
    }
    if (!converged) throw ConvergenceError("gauss_legendre: Newton did not converge");
    const LegendreValue v = legendre(n, x);
    rule.points[i] = static_cast<double>(x);
    rule.weights[i] = static_cast<double>(2.0L / ((1.0L - x * x) * v.dp * v.dp));
  }
  return rule;
}

}  // namespace semflow
