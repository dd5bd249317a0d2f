#pragma once

#include <array>
#include <span>
#include <vector>

#include "semflow/basis.hpp"
#include "semflow/space.hpp"

namespace semflow {

/// Three-component field in the local layout.
using VecField = std::array<std::vector<double>, 3>;

VecField make_vec_field(const FunctionSpace& space, double value = 0.0);

/// Coefficients of lambda_visc * K + lambda_mass * B.
struct HelmholtzCoeffs {
  double lambda_visc = 1.0;
  double lambda_mass = 0.0;

  /// Throws std::invalid_argument unless lambda_visc > 0 and lambda_mass >= 0.
  void validate() const;
};

/// Element-local weak Laplacian w^e = D^T G^e D u^e by sum factorization.
/// No gather-scatter is applied.
void ax_laplace(const FunctionSpace& space, std::span<const double> u, std::span<double> w);

/// lambda_visc * ax_laplace(u) + lambda_mass * B u, element-local.
void ax_helmholtz(const FunctionSpace& space, const HelmholtzCoeffs& coeffs, std::span<const double> u,
                  std::span<double> w);

/// Pointwise gradient through the inverse Jacobian.
VecField grad(const FunctionSpace& space, std::span<const double> u);
void grad(const FunctionSpace& space, std::span<const double> u, VecField& out);
std::vector<double> div(const FunctionSpace& space, const VecField& v);
VecField curl(const FunctionSpace& space, const VecField& v);

/// Weak divergence: out_i = sum_points B grad(l_i) . f, element-local.
void weak_div(const FunctionSpace& space, const VecField& f, std::span<double> out);

/// Element-local diagonal of the weak Laplacian.
std::vector<double> laplace_diagonal(const FunctionSpace& space);

/// Over-integration data for the convective term on ceil(3(N+1)/2)
/// Gauss-Legendre points per direction.
class Dealias {
 public:
  explicit Dealias(const FunctionSpace& space);
  int num_fine() const noexcept { return m_; }
  const Matrix& interp() const noexcept { return interp_; }
  const Matrix& interp_t() const noexcept { return interp_t_; }
  std::span<const double> fine_weight() const noexcept { return fine_w_; }

 private:
  int m_;
  Matrix interp_;
  Matrix interp_t_;
  std::vector<double> fine_w_;  // Gauss weights times det J, E * m^3
};

/// w = (v . grad) u. Without `dealias` the product is collocated at GLL
/// points; with it, the product is integrated on the fine grid against each
/// GLL basis function and divided by the element-local GLL mass.
void advect(const FunctionSpace& space, const VecField& v, std::span<const double> u, std::span<double> w,
            const Dealias* dealias = nullptr);

/// max over GLL points of dt * sum_s |v . grad r_s| / dxi_s, with
/// dxi_s = xi_{i+1} - xi_i (xi_N - xi_{N-1} on the last node).
double cfl(const FunctionSpace& space, const VecField& v, double dt);

}  // namespace semflow
