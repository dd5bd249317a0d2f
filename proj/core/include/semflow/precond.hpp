#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "semflow/gather_scatter.hpp"
#include "semflow/operators.hpp"
#include "semflow/space.hpp"

namespace semflow {

/// Assembled diagonal of lambda_visc * K + lambda_mass * B, local layout.
std::vector<double> helmholtz_diagonal(const FunctionSpace& space, const GatherScatter& gs,
                                       const HelmholtzCoeffs& coeffs);

/// Point-Jacobi scaling by the inverse assembled operator diagonal.
class BlockJacobi {
 public:
  /// `assembled_diag` is the gathered diagonal in the local layout. Points
  /// with mask 0 are skipped. Throws NumericalError on a nonpositive entry,
  /// naming its coordinates.
  BlockJacobi(const FunctionSpace& space, std::span<const double> assembled_diag, std::span<const double> mask = {});

  void apply(std::span<const double> r, std::span<double> z) const;
  std::span<const double> inv_diag() const noexcept { return inv_diag_; }

 private:
  std::vector<double> inv_diag_;
};

struct SchwarzOptions {
  bool use_coarse = true;
  int coarse_iterations = 10;
};

/// Overlapping additive Schwarz plus a trilinear coarse-grid correction for
/// the assembled stiffness operator.
///
/// Each element is extended by one GLL layer into its neighbors. The local
/// solve on the extended box uses fast diagonalization of separable 1D
/// operators built from the element's mean edge lengths. Sides on the
/// domain boundary are Dirichlet when the whole face is masked and Neumann
/// otherwise. Local contributions are combined symmetrically with the
/// inverse overlap count.
///
/// The coarse problem lives on element vertices with the Galerkin matrix
/// J^T A^e J and is solved by a fixed number of Jacobi-PCG iterations from a
/// zero start.
class HybridSchwarz {
 public:
  HybridSchwarz(const FunctionSpace& space, const GatherScatter& gs, std::span<const double> mask,
                SchwarzOptions options = {});

  /// z = M^{-1} r for an assembled residual r; z is continuous and masked.
  void apply(std::span<const double> r, std::span<double> z) const;
  /// Overlapping local part only.
  void apply_local(std::span<const double> r, std::span<double> z) const;
  /// Coarse correction only.
  void apply_coarse(std::span<const double> r, std::span<double> z) const;

  std::size_t num_coarse() const noexcept { return coarse_gid_.size(); }
  std::size_t num_coarse_free() const noexcept;

  /// Dense copy of the assembled coarse matrix (for tests).
  std::vector<double> coarse_matrix_dense() const;

 private:
  struct Box {
    std::array<int, 3> n{};  // box points per direction
    std::array<Matrix, 3> s, st;  // 1D eigenvectors and transposes
    std::vector<double> inv_lambda;        // 1 / (lr + ls + lt), box layout
    std::vector<std::int64_t> gids;        // -1 where no dof
  };

  const FunctionSpace* space_;
  const GatherScatter* gs_;
  SchwarzOptions options_;
  std::vector<double> mask_;
  std::vector<double> global_mask_;
  std::vector<Box> boxes_;
  std::vector<double> sqrt_w_;  // per global id

  // Coarse space.
  std::vector<std::int64_t> coarse_gid_;          // fine global id of each vertex
  std::vector<std::int64_t> elem_coarse_;         // 8 per element
  std::vector<double> phi_;                       // ppe x 8 trilinear weights
  std::vector<std::int64_t> crow_, ccol_;
  std::vector<double> cval_;
  std::vector<double> cdiag_inv_;
  std::vector<double> cmask_;

  void coarse_matvec(std::span<const double> x, std::span<double> y) const;
  void coarse_solve(std::span<const double> b, std::span<double> x) const;
};

}  // namespace semflow
