#pragma once

// Command-line front end. Every subcommand works inside one artifact
// directory with fixed file names, so the steps chain without extra flags:
//
//   generate   -> dataset.json
//   fit        -> predictor.json
//   calibrate  -> calibration.json
//   coverage   -> coverage.json, scores.csv
//   plan       -> plan.json, plan.csv
//   simulate   -> runs/run_<id>_<mode>.{json,csv}, batch_report.json,
//                 batch_summary.csv, paired_cost.csv
//   report     -> report.json

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "csmpc/conformal.hpp"
#include "csmpc/core.hpp"
#include "csmpc/io.hpp"
#include "csmpc/predictors.hpp"
#include "csmpc/simulation.hpp"

namespace csmpc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInternal = 2;

struct RunConfig {
  std::filesystem::path dir = ".";

  ScenarioConfig scenario;
  std::size_t k_train = 500;
  std::size_t k_val = 500;
  std::size_t k_test = 500;
  std::uint64_t data_seed = 0;

  PredictorKind predictor = PredictorKind::Autoregressive;
  int order = 4;

  double delta = 0.05;
  int T = 0;  // 0: the dataset horizon
  int H = 0;  // 0: T
  ScoreMode score_mode = ScoreMode::JointNorm;
  CoverageKind coverage = CoverageKind::JointFromZero;
  int histogram_bins = 20;

  /// Overrides applied on top of default_simulation_config(scenario).
  json planner = json::object();
  json solver = json::object();
  json start = nullptr;

  BatchMode mode = BatchMode::Both;
  std::size_t runs = 0;  // 0: every test trajectory

  int plan_t = 0;
  bool plan_openloop = false;
  std::size_t plan_trajectory = 0;  // position within the test split
};

/// Field-by-field merge of a JSON config file over `cfg`; unknown keys are
/// rejected with the offending name.
void apply_config(RunConfig& cfg, const json& j);

/// The effective configuration without filesystem paths, as echoed into
/// artifacts.
json config_echo(const RunConfig& cfg);

/// Simulation settings after applying the planner/solver/start overrides and
/// the horizons in `cfg`.
SimulationConfig simulation_config(const RunConfig& cfg, const ScenarioConfig& scenario, int T, int H);

/// Parses argv-style arguments (without the program name) and runs the
/// subcommand. Returns the process exit code.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace csmpc::cli
