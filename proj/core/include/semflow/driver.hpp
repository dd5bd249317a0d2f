#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "semflow/case_config.hpp"
#include "semflow/diagnostics.hpp"

namespace semflow {

struct RunOptions {
  int threads = 0;  ///< 0 keeps the runtime default
  std::filesystem::path output_dir = ".";
  bool benchmark = false;
  int benchmark_steps = 500;
  int benchmark_window = 100;  ///< trailing steps used for the timing summary
  std::filesystem::path restart;  ///< checkpoint to continue from; empty for a fresh start
  std::ostream* log = nullptr;    ///< progress and warnings; nullptr for silence
};

struct StatSummary {
  std::int64_t count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

struct RunSummary {
  std::int64_t first_step = 0;  ///< step number the run started from
  std::int64_t final_step = 0;
  double final_time = 0.0;
  double max_cfl = 0.0;
  std::int64_t unconverged_solves = 0;
  double div_norm = 0.0;
  double kinetic_energy = 0.0;
  StatSummary step_seconds;  ///< over the trailing timing window
  StatSummary c_d;
  StatSummary c_l;
  std::optional<ForceRecord> last_force;
};

/// Runs a case and writes diagnostics.csv, timing.csv, forces.csv,
/// forces_stats.csv, VTK snapshots and checkpoints into the output
/// directory. Throws on configuration or numerical failure.
RunSummary run_case(const CaseConfig& config, const RunOptions& options);

}  // namespace semflow
