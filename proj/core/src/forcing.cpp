#include "semflow/forcing.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "semflow/error.hpp"

namespace semflow {

namespace {

TripModes draw(const TrippingConfig& config, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::mt19937_64 rng(seq);
  TripModes m;
  m.phase.resize(static_cast<std::size_t>(config.n_modes));
  for (auto& p : m.phase) p = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 * std::numbers::pi;
  return m;
}

std::int64_t segment_of(const TrippingConfig& config, double t) {
  return static_cast<std::int64_t>(std::floor(t / config.t_s));
}

}  // namespace

void TrippingConfig::validate() const {
  if (!(t_s > 0.0)) throw ConfigError("tripping t_s must be positive");
  if (!(lx > 0.0) || !(ly > 0.0)) throw ConfigError("tripping attenuation lengths must be positive");
  if (n_modes < 1) throw ConfigError("tripping n_modes must be >= 1");
  if (!(z_min <= z_max)) throw ConfigError("tripping span requires z_min <= z_max");
}

TripModes trip_modes(const TrippingConfig& config, std::int64_t segment) {
  // Segment streams use the even numbers, the steady set uses 1.
  return draw(config, static_cast<std::uint64_t>(segment) * 2u + 2u);
}

TripModes trip_steady_modes(const TrippingConfig& config) { return draw(config, 1u); }

double trip_series(const TrippingConfig& config, const TripModes& modes, double z) {
  const double kc = 2.0 * std::numbers::pi / config.t_s;
  const int nm = static_cast<int>(modes.phase.size());
  double s = 0.0;
  for (int m = 1; m <= nm; ++m) s += std::cos(m * kc / nm * z + modes.phase[static_cast<std::size_t>(m - 1)]);
  return std::sqrt(2.0 / nm) * s;
}

double smoothstep(double p) { return p * p * (3.0 - 2.0 * p); }

TrippingState trip_init(const TrippingConfig& config, double t) {
  config.validate();
  TrippingState s;
  s.segment = segment_of(config, t);
  s.current = trip_modes(config, s.segment);
  s.next = trip_modes(config, s.segment + 1);
  s.steady = trip_steady_modes(config);
  s.last_time = t;
  s.draws = 3;
  return s;
}

void trip_advance(const TrippingConfig& config, TrippingState& state, double t) {
  if (t < state.last_time) throw std::invalid_argument("tripping time moved backwards");
  state.last_time = t;
  const std::int64_t seg = segment_of(config, t);
  if (seg == state.segment) return;
  if (seg == state.segment + 1) {
    state.current = std::move(state.next);
    state.next = trip_modes(config, seg + 1);
    state.draws += 1;
  } else {
    state.current = trip_modes(config, seg);
    state.next = trip_modes(config, seg + 1);
    state.draws += 2;
  }
  state.segment = seg;
}

double trip_g(const TrippingConfig& config, const TrippingState& state, double z, double t) {
  if (z < config.z_min || z > config.z_max) return 0.0;
  const double p = t / config.t_s - static_cast<double>(state.segment);
  if (p < -1e-12 || p > 1.0 + 1e-12) throw std::invalid_argument("tripping state not advanced to time t");
  const double b = smoothstep(p);
  double g = 0.0;
  if (config.ts_amp != 0.0) g += config.ts_amp * trip_series(config, state.steady, z);
  if (config.tu_amp != 0.0)
    g += config.tu_amp * ((1.0 - b) * trip_series(config, state.current, z) + b * trip_series(config, state.next, z));
  return g;
}

double trip_eval(const TrippingConfig& config, const TrippingState& state, const Vec3& x, double t) {
  if (x[2] < config.z_min || x[2] > config.z_max) return 0.0;
  const double dx = (x[0] - config.x0) / config.lx;
  const double dy = x[1] / config.ly;
  const double r2 = dx * dx + dy * dy;
  // exp(-60) < 1e-26: treated as outside the forcing region.
  if (r2 > 60.0) return 0.0;
  return trip_g(config, state, x[2], t) * std::exp(-r2);
}

void VolumeForcing::set_tripping(const TrippingConfig& config, double t0) {
  trip_ = config;
  state_ = trip_init(config, t0);
}

void VolumeForcing::evaluate(const FunctionSpace& space, double t, VecField& f) {
  for (auto& c : f) c.assign(space.num_local(), 0.0);
  const std::size_t nl = space.num_local();
  if (trip_) {
    trip_advance(*trip_, state_, t);
    for (std::size_t l = 0; l < nl; ++l) {
      const Vec3 x{space.coord(0)[l], space.coord(1)[l], space.coord(2)[l]};
      f[1][l] += trip_eval(*trip_, state_, x, t);
    }
  }
  if (analytic_) {
    for (std::size_t l = 0; l < nl; ++l) {
      const Vec3 x{space.coord(0)[l], space.coord(1)[l], space.coord(2)[l]};
      const Vec3 v = analytic_(x, t);
      for (std::size_t c = 0; c < 3; ++c) f[c][l] += v[c];
    }
  }
}

}  // namespace semflow
