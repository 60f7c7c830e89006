#pragma once

// Closed-loop (receding-horizon) and open-loop execution against recorded
// agent trajectories, plus batch evaluation. Agents replay their recorded
// motion and never react to the robot.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "csmpc/conformal.hpp"
#include "csmpc/core.hpp"
#include "csmpc/planner.hpp"
#include "csmpc/predictors.hpp"

namespace csmpc {

enum class RunMode { Mpc, OpenLoop };
enum class BatchMode { Mpc, OpenLoop, Both };

std::string_view to_string(RunMode m);
RunMode run_mode_from_string(std::string_view s);
std::string_view to_string(BatchMode m);
BatchMode batch_mode_from_string(std::string_view s);

struct SimulationConfig {
  PlannerConfig planner;
  SolverConfig solver;
  RobotState start;
  friend bool operator==(const SimulationConfig&, const SimulationConfig&) = default;
};

/// Vehicle, workspace, goal and safety distance taken from the scenario.
SimulationConfig default_simulation_config(const ScenarioConfig& scenario);

struct StepRecord {
  int t = 0;
  RobotState state;       // x_t
  JointState observed;    // y_t
  std::vector<JointState> predictions;  // y_hat_{tau|t} over the window (empty if not replanned)
  std::vector<RegionRadius> regions;    // constraint regions used over the window
  ControlInput control;
  PlanStatus status = PlanStatus::Feasible;
  double max_slack = 0.0;
  bool slack_retry = false;
  bool braked = false;
  /// ||y_{t+1} - y_hat_{t+1|t}|| <= C_{t+1|t} with the calibrated (not
  /// worst-case) region; only recorded when a prediction was made at t.
  bool one_step_checked = false;
  bool one_step_covered = false;
};

struct RunSummary {
  double min_constraint = 0.0;  // min over tau = 1..T of c(x_tau, y_tau)
  double total_cost = 0.0;
  bool safe = false;            // min_constraint >= 0
  bool goal_reached = false;
  int infeasible_steps = 0;     // solves that needed the slack retry
  int braked_steps = 0;
  /// The fallback had to brake at least once: no admissible plan was found,
  /// so the run is outside the safety guarantee.
  bool flagged = false;
  int one_step_checks = 0;
  int one_step_covered = 0;
};

struct RunLog {
  std::size_t trajectory_id = 0;
  RunMode mode = RunMode::Mpc;
  double delta = 0.0;
  int horizon = 0;             // T
  int prediction_horizon = 0;  // H
  std::uint64_t data_seed = 0;
  std::uint64_t solver_seed = 0;
  std::vector<RobotState> states;      // x_0 .. x_T
  std::vector<JointState> agents;      // y_0 .. y_T
  std::vector<ControlInput> controls;  // u_0 .. u_{T-1}
  std::vector<double> realized_constraint;  // c(x_tau, y_tau), tau = 0..T
  std::vector<StepRecord> steps;
  RunSummary summary;
};

/// Recomputes the summary from the logged states, agents and steps.
RunSummary summarize(const RunLog& log, const SimulationConfig& cfg);

RunLog run_closed_loop(const Trajectory& env, const PredictorSpec& predictor,
                       const CalibrationTable& table, const SimulationConfig& cfg);

/// Executes the single t = 0 plan with H = T. There is no slack retry: if that
/// plan is infeasible the robot brakes for the whole run.
RunLog run_open_loop(const Trajectory& env, const PredictorSpec& predictor,
                     const CalibrationTable& table, const SimulationConfig& cfg);

struct ModeStats {
  std::size_t runs = 0;
  std::size_t violations = 0;
  std::size_t flagged = 0;
  std::size_t unflagged_violations = 0;
  std::size_t braked_runs = 0;
  std::size_t slack_runs = 0;         // some solve needed the slack retry
  std::size_t strict_runs = 0;        // every solve feasible without slack
  std::size_t strict_violations = 0;
  std::size_t goal_reached = 0;
  double violation_rate_all = 0.0;
  double violation_rate_unflagged = 0.0;
  double violation_rate_strict = 0.0;
  double flagged_rate = 0.0;
  double mean_cost = 0.0;
  double median_cost = 0.0;
};

struct PairedCost {
  std::size_t trajectory_id = 0;
  double open_loop_cost = 0.0;
  double mpc_cost = 0.0;
  bool open_loop_flagged = false;
  bool mpc_flagged = false;
};

struct BatchReport {
  std::size_t runs = 0;
  std::optional<ModeStats> mpc;
  std::optional<ModeStats> open_loop;
  std::vector<PairedCost> pairs;
  std::size_t one_step_checks = 0;
  std::size_t one_step_covered = 0;
  double one_step_rate = 0.0;
  double delta = 0.0;
  int horizon = 0;
  int prediction_horizon = 0;
  std::uint64_t data_seed = 0;
  std::uint64_t solver_seed = 0;
};

/// Pure fold over run logs.
BatchReport aggregate(std::span<const RunLog> logs);

struct BatchResult {
  BatchReport report;
  std::vector<RunLog> logs;
};

/// Runs every trajectory in `test` (positions `test_ids` in the source
/// dataset). Aborts with ValidationError if any id was used for calibration.
BatchResult batch_evaluate(std::span<const Trajectory> test, std::span<const std::size_t> test_ids,
                           const PredictorSpec& predictor, const CalibrationTable& table,
                           const SimulationConfig& cfg, BatchMode mode, std::uint64_t data_seed = 0);

/// The first `max_runs` test-split trajectories of `data` (all if 0).
BatchResult batch_evaluate(const Dataset& data, const PredictorSpec& predictor,
                           const CalibrationTable& table, const SimulationConfig& cfg, BatchMode mode,
                           std::size_t max_runs = 0);

}  // namespace csmpc
