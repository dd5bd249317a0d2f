#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semflow/forcing.hpp"
#include "semflow/space.hpp"
#include "semflow/timestep.hpp"

namespace semflow {

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

struct ScalarOutput {
  std::string name;
  std::span<const double> values;
};

struct VectorOutput {
  std::string name;
  const VecField* values;
};

/// Legacy ASCII VTK unstructured grid: one point per local GLL point and
/// N^3 linear hexahedra per element.
void write_vtk(const FunctionSpace& space, const std::filesystem::path& path,
               const std::vector<ScalarOutput>& scalars, const std::vector<VectorOutput>& vectors);

struct StoredProjection {
  std::vector<std::vector<double>> x;
  std::vector<std::vector<double>> ax;
  int steps = 0;
};

/// Everything needed to continue a run bit-identically.
struct Checkpoint {
  std::uint64_t num_elements = 0;
  int order = 0;
  double dt = 0.0;
  FlowState state;
  std::optional<StoredProjection> pressure_projection;
  std::array<std::optional<StoredProjection>, 3> velocity_projection;
  int velocity_projection_order = 0;
  std::optional<TrippingState> tripping;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& cp);
/// Throws ParseError on bad magic, unknown version or truncation.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void write_checkpoint(const Checkpoint& cp, const std::filesystem::path& path);
Checkpoint read_checkpoint(const std::filesystem::path& path);

/// Captures the solver and forcing state after a step.
Checkpoint make_checkpoint(FlowSolver& solver, const FlowState& state, const VolumeForcing* forcing);
/// Restores projection and forcing state into `solver` / `forcing` and
/// returns the flow state. Throws ConfigError when the checkpoint does not
/// fit the space or time step.
FlowState restore_checkpoint(const Checkpoint& cp, FlowSolver& solver, VolumeForcing* forcing);

}  // namespace semflow
