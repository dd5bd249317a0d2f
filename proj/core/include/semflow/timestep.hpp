#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "semflow/bc.hpp"
#include "semflow/forcing.hpp"
#include "semflow/gather_scatter.hpp"
#include "semflow/krylov.hpp"
#include "semflow/operators.hpp"
#include "semflow/precond.hpp"
#include "semflow/space.hpp"

namespace semflow {

/// BDF (implicit) and extrapolation (explicit) coefficients of one order.
struct SchemeCoeffs {
  int order = 1;
  double gamma0 = 1.0;
  std::vector<double> alpha;
  std::vector<double> beta;
};

/// Orders 1..3; throws std::invalid_argument otherwise.
SchemeCoeffs scheme_coeffs(int order);

/// Velocity history v^n, v^{n-1}, v^{n-2}, explicit terms E = F - (v . grad) v
/// at the same levels, pressure and time.
struct FlowState {
  std::array<VecField, 3> v;
  std::array<VecField, 3> e;
  std::vector<double> p;
  double t = 0.0;
  std::int64_t step = 0;
  int levels = 1;  ///< valid history levels (1..3)
};

struct FlowParams {
  double nu = 1.0;
  double dt = 1e-3;
  int order = 3;
  bool dealias = true;
  SolverConfig pressure{1e-5, 200, 10};
  SolverConfig velocity{1e-8, 50, 10};
  int pressure_projection = 20;  ///< capacity; 0 disables
  int velocity_projection = 0;   ///< capacity; 0 disables
  bool schwarz = true;           ///< pressure preconditioner; Jacobi otherwise
  SchwarzOptions schwarz_options{};

  void validate() const;
};

struct StepReport {
  std::int64_t step = 0;
  double time = 0.0;
  int order = 1;
  double cfl = 0.0;
  int p_iters = 0;
  double p_res = 0.0;
  bool p_converged = true;
  std::array<int, 3> v_iters{};
  std::array<double, 3> v_res{};
  bool v_converged = true;
  double div_norm = 0.0;
};

/// P_N-P_N splitting: pressure Poisson solve followed by three velocity
/// Helmholtz solves per step, BDF/EXT of order up to 3 with a startup ramp.
class FlowSolver {
 public:
  /// `bcs` must be bound to `space`.
  FlowSolver(const FunctionSpace& space, const GatherScatter& gs, const BoundarySet& bcs, FlowParams params,
             VolumeForcing* forcing = nullptr);

  const FlowParams& params() const noexcept { return params_; }
  const FunctionSpace& space() const noexcept { return *space_; }
  const GatherScatter& gs() const noexcept { return *gs_; }

  /// Fresh start from v0 at t0 (one history level).
  FlowState initial_state(const VecField& v0, double t0) const;
  /// Start from full history: v[q] at t0 - q dt. Explicit terms are
  /// evaluated for the older levels.
  FlowState history_state(const std::array<VecField, 3>& v, double t0);

  /// E^n = F(t^n) - (v^n . grad) v^n into state.e[0].
  void compute_explicit(FlowState& state);

  /// Assembled, masked pressure right-hand side for the current state;
  /// requires state.e[0] to be current. `vhat` receives vhat/dt when given.
  std::vector<double> pressure_rhs(const FlowState& state, VecField* vhat = nullptr) const;

  /// Advances one step.
  StepReport step(FlowState& state);

  /// Assembled masked pressure operator.
  void apply_pressure_op(std::span<const double> x, std::span<double> y) const;

  ProjectionSpace* pressure_projection() noexcept { return p_proj_.get(); }
  std::array<ProjectionSpace*, 3> velocity_projections() noexcept;
  const HybridSchwarz* schwarz() const noexcept { return schwarz_.get(); }

  /// Velocity projection spaces depend on gamma0 / dt; `order` is the
  /// order they were built for (restored from checkpoints).
  int velocity_projection_order() const noexcept { return v_proj_order_; }
  void set_velocity_projection_order(int order) noexcept { v_proj_order_ = order; }

 private:
  const FunctionSpace* space_;
  const GatherScatter* gs_;
  const BoundarySet* bcs_;
  FlowParams params_;
  VolumeForcing* forcing_;
  std::unique_ptr<Dealias> dealias_;
  std::unique_ptr<HybridSchwarz> schwarz_;
  std::unique_ptr<BlockJacobi> p_jacobi_;
  std::array<std::unique_ptr<BlockJacobi>, 3> v_jacobi_;  // per scheme order
  std::unique_ptr<ProjectionSpace> p_proj_;
  std::array<std::unique_ptr<ProjectionSpace>, 3> v_proj_;
  int v_proj_order_ = 0;
  // Facets whose normal velocity enters the pressure equation.
  std::vector<std::size_t> flux_facets_;

  int current_order(const FlowState& state) const;
  const BlockJacobi& velocity_jacobi(int order);
};

/// Throws NumericalError naming `name` if any entry is not finite.
void check_field(std::span<const double> f, const char* name);

}  // namespace semflow
