#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "semflow/bc.hpp"
#include "semflow/forcing.hpp"
#include "semflow/krylov.hpp"
#include "semflow/mesh.hpp"
#include "semflow/timestep.hpp"

namespace semflow {

inline constexpr int kCaseFormatVersion = 1;

struct MeshSpec {
  std::string file;       ///< mesh file; empty when generated
  std::string generator;  ///< "box" or "cylinder"
  std::array<Interval, 3> box_extent{Interval{0.0, 1.0}, Interval{0.0, 1.0}, Interval{0.0, 1.0}};
  std::array<int, 3> box_counts{2, 2, 2};
  std::array<std::string, 6> box_tags{"x_lo", "x_hi", "y_lo", "y_hi", "z_lo", "z_hi"};
  CylinderBoxParams cylinder;
};

/// One boundary block of the case file.
struct BcEntry {
  std::string tag;
  BcKind kind = BcKind::NoSlip;
  InflowParams inflow;
  RotorParams rotor;
  Vec3 value{0.0, 0.0, 0.0};
  std::string function;  ///< named analytic value, e.g. "taylor_green"
};

struct ForceSpec {
  std::string tag;  ///< empty: no force output
  double u_cl = 1.0;
  double h = 1.0;
  double diameter = 1.0;
  bool symmetric_stress = false;
  bool body_normal = true;
};

struct OutputSpec {
  int diagnostics_every = 1;
  int forces_every = 1;
  int fields_every = 0;      ///< 0: only the final snapshot
  int checkpoint_every = 0;  ///< 0: only the final checkpoint
};

struct InitialSpec {
  std::string type = "zero";  ///< zero, uniform, taylor_green
  Vec3 velocity{0.0, 0.0, 0.0};
};

struct CaseConfig {
  int version = kCaseFormatVersion;
  std::string name = "case";
  MeshSpec mesh;
  int order = 5;
  double nu = 0.01;
  double dt = 1e-3;
  std::int64_t steps = 10;
  int scheme_order = 3;
  bool dealias = true;
  SolverConfig pressure{1e-5, 200, 10};
  SolverConfig velocity{1e-8, 50, 10};
  int pressure_projection = 20;
  int velocity_projection = 0;
  bool schwarz = true;
  std::vector<BcEntry> boundaries;
  std::optional<TrippingConfig> tripping;
  ForceSpec forces;
  OutputSpec output;
  InitialSpec initial;
  std::uint64_t seed = 1;
  std::filesystem::path base_dir;  ///< directory of the case file

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Parses the JSON case text. Relative mesh paths resolve against
/// `base_dir`. Throws ConfigError naming the offending key.
CaseConfig parse_case(const std::string& text, const std::filesystem::path& base_dir = {});
CaseConfig load_case(const std::filesystem::path& path);

/// Builds the mesh described by the case.
Mesh build_mesh(const CaseConfig& config);
/// Builds the boundary set (unbound).
BoundarySet build_boundaries(const CaseConfig& config);
FlowParams flow_params(const CaseConfig& config);

}  // namespace semflow
