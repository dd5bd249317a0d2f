#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "semflow/mesh.hpp"
#include "semflow/operators.hpp"
#include "semflow/space.hpp"

namespace semflow {

/// Stochastic wall-normal tripping force along a spanwise line.
struct TrippingConfig {
  double x0 = -4.5;
  double lx = 1.0;
  double ly = 0.5;
  double z_min = -1.0;
  double z_max = 1.0;
  double ts_amp = 0.0;   ///< steady amplitude T_s
  double tu_amp = 0.3;   ///< unsteady amplitude T_u
  double t_s = 0.14;     ///< segment length in time
  int n_modes = 40;
  std::uint64_t seed = 1;

  /// Throws ConfigError unless t_s, lx, ly > 0, n_modes >= 1, z_min <= z_max.
  void validate() const;
};

/// Random phases of one spanwise Fourier series.
struct TripModes {
  std::vector<double> phase;
};

/// Phases for segment `segment`, derived only from (seed, segment).
TripModes trip_modes(const TrippingConfig& config, std::int64_t segment);
/// Phases of the steady part.
TripModes trip_steady_modes(const TrippingConfig& config);

/// sqrt(2/N_m) sum_m cos(k_m z + phi_m), k_m = m (2 pi / t_s) / N_m.
double trip_series(const TrippingConfig& config, const TripModes& modes, double z);

/// 3p^2 - 2p^3.
double smoothstep(double p);

struct TrippingState {
  std::int64_t segment = 0;
  TripModes current;   ///< h^i
  TripModes next;      ///< h^{i+1}
  TripModes steady;    ///< g(z)
  double last_time = 0.0;
  std::int64_t draws = 0;  ///< coefficient sets drawn so far
};

TrippingState trip_init(const TrippingConfig& config, double t);

/// Moves the state to the segment containing t. Crossing one boundary
/// shifts h^{i+1} into h^i and draws one new set. Throws
/// std::invalid_argument if t is earlier than a previous call.
void trip_advance(const TrippingConfig& config, TrippingState& state, double t);

/// g(z, t); `state` must be at the segment of t. Zero outside [z_min, z_max].
double trip_g(const TrippingConfig& config, const TrippingState& state, double z, double t);

/// F_2 = g(z, t) exp(-(x - x0)^2 / lx^2 - y^2 / ly^2).
double trip_eval(const TrippingConfig& config, const TrippingState& state, const Vec3& x, double t);

/// Volume force: optional tripping plus an optional analytic term.
class VolumeForcing {
 public:
  using Analytic = std::function<Vec3(const Vec3&, double)>;

  VolumeForcing() = default;

  void set_tripping(const TrippingConfig& config, double t0);
  void set_analytic(Analytic f) { analytic_ = std::move(f); }
  bool active() const noexcept { return trip_.has_value() || static_cast<bool>(analytic_); }

  /// F at time t at every GLL point. Advances the tripping state.
  void evaluate(const FunctionSpace& space, double t, VecField& f);

  const std::optional<TrippingConfig>& tripping() const noexcept { return trip_; }
  const TrippingState& tripping_state() const noexcept { return state_; }
  /// Replaces the tripping state, e.g. from a checkpoint.
  void restore_tripping(TrippingState state) { state_ = std::move(state); }

 private:
  std::optional<TrippingConfig> trip_;
  TrippingState state_;
  Analytic analytic_;
};

}  // namespace semflow
