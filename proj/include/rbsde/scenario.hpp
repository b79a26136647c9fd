#pragma once

#include <optional>

#include "rbsde/expr.hpp"
#include "rbsde/horizon_infinite.hpp"

// Batch front door: scenario files in, CSV tables and a PASS/FAIL report out.
// One scenario per process; no interactive state.

namespace rbsde {

struct KernelConfig {
  enum class Mode { explicit_table, cox, anticipative_mix };
  Mode mode = Mode::cox;
  std::vector<std::vector<double>> table;  // explicit rows, leaf order, length depth+2
  std::string hazard;                      // cox / anticipative-mix
  double mix = 0.0;                        // anticipative tilt in (-1, 1)
  bool finite_tau = false;
};

// A data entry is either an expression over (n, t, W) or an explicit by-level
// table (one row per level, row n holding 2^n values in path-bit order).
struct DataEntry {
  std::string expr;
  std::optional<std::vector<std::vector<double>>> table;
};

struct DataConfig {
  DataEntry f{"0", std::nullopt};
  std::optional<DataEntry> S;  // nullopt = no barrier
  DataEntry h{"0", std::nullopt};
};

struct ScenarioConfig {
  int depth = 2;
  double dt = 1.0;
  KernelConfig kernel;
  DataConfig data;
  std::optional<DataConfig> data2;  // second block for the stability experiment
  bool infinite_horizon = false;
  int T = 0;  // bounded horizon; defaults to depth
  std::vector<double> p_grid = {1.25, 1.5, 2.0, 3.0, 4.0};
  std::vector<std::string> experiments = {"solve"};
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  static ScenarioConfig load(const std::string& path);  // ScenarioParseError on bad input
  static ScenarioConfig from_json_text(const std::string& text);
};

// Kernel expansion used by the scenario runner (and directly testable).
DensityKernel expand_kernel(const KernelConfig& cfg, const TreeModel& tree);
AdaptedProcess evaluate_expression(const std::string& text, const TreeModel& tree);
AdaptedProcess evaluate_data_entry(const DataEntry& entry, const TreeModel& tree);

struct RunOptions {
  std::string out_dir_override;
  int threads = 0;             // 0 = keep current setting
  std::vector<double> p_override;
  bool verify_only = false;    // checks only, no solution tables
};

struct RunReport {
  int exit_code = 0;  // 0 ok, 1 numerical FAIL, 2 parse/config, 3 model invariant
  std::vector<std::string> lines;
  std::vector<std::string> files;
  bool any_fail = false;
};

RunReport run_scenario(const ScenarioConfig& cfg, const RunOptions& opt);
// Maps ScenarioParseError -> exit 2 and ConstructionError/ContractError -> 3.
RunReport run_scenario_file(const std::string& path, const RunOptions& opt);

std::string config_schema();

// Shortest round-trip decimal representation (17 significant digits at most).
std::string format_double(double v);

}  // namespace rbsde
