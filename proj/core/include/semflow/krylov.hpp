#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "semflow/gather_scatter.hpp"

namespace semflow {

/// y = op(x). Operators passed to the solvers return assembled, masked
/// results in the local layout.
using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;

struct SolverConfig {
  double abs_tol = 1e-8;
  int max_iter = 200;
  int restart_m = 10;

  /// Throws std::invalid_argument on out-of-range values.
  void validate() const;
};

struct SolveResult {
  int iterations = 0;
  double initial_residual = 0.0;
  double final_residual = 0.0;  ///< recomputed ||b - A x||
  bool converged = false;
  std::vector<double> history;  ///< residual estimate after each iteration
};

/// Inner products over the global vector when `gs` is given (each shared
/// point counted once), plain dot products otherwise.
class VectorSpace {
 public:
  explicit VectorSpace(const GatherScatter* gs = nullptr) : gs_(gs) {}
  double dot(std::span<const double> a, std::span<const double> b) const;
  double norm(std::span<const double> a) const;

 private:
  const GatherScatter* gs_;
};

/// Preconditioned conjugate gradients with absolute tolerance on the
/// residual 2-norm. `x` holds the initial guess on entry. `mask` (empty for
/// none) multiplies every search direction.
/// Throws ConvergenceError if <p, A p> <= 0.
SolveResult pcg(const LinearOp& apply_a, const LinearOp& apply_m, std::span<const double> rhs, std::span<double> x,
                const SolverConfig& config, std::span<const double> mask = {}, const GatherScatter* gs = nullptr);

/// Restarted right-preconditioned GMRES: solves A M^{-1} y = b with
/// modified Gram-Schmidt (one extra pass on loss of orthogonality) and
/// Givens rotations, then x = x0 + M^{-1} V y per cycle.
SolveResult gmres(const LinearOp& apply_a, const LinearOp& apply_m, std::span<const double> rhs,
                  std::span<double> x, const SolverConfig& config, std::span<const double> mask = {},
                  const GatherScatter* gs = nullptr);

/// Store of previous solutions for initial-guess projection.
///
/// Keeps x_k and A x_k with <A x_i, x_j> = delta_ij. The space is cleared
/// when it is full or after `reset_interval` appends.
class ProjectionSpace {
 public:
  explicit ProjectionSpace(int capacity = 20, int reset_interval = 20, const GatherScatter* gs = nullptr);

  int capacity() const noexcept { return capacity_; }
  int count() const noexcept { return static_cast<int>(x_.size()); }
  int steps_since_reset() const noexcept { return steps_; }
  const std::vector<std::vector<double>>& basis() const noexcept { return x_; }
  const std::vector<std::vector<double>>& applied() const noexcept { return ax_; }

  /// Returns the projection of the solution onto the stored span and
  /// deflates `rhs` in place.
  std::vector<double> project_pre(std::span<double> rhs) const;
  /// A-orthonormalizes x_new against the stored vectors and appends it.
  void project_post(std::span<const double> x_new, const LinearOp& apply_a);
  /// Drops all stored vectors (operator changed).
  void invalidate();

  /// Restores stored pairs, e.g. from a checkpoint.
  void restore(std::vector<std::vector<double>> x, std::vector<std::vector<double>> ax, int steps);

 private:
  int capacity_;
  int reset_interval_;
  int steps_ = 0;
  VectorSpace vs_;
  std::vector<std::vector<double>> x_;
  std::vector<std::vector<double>> ax_;
};

}  // namespace semflow
