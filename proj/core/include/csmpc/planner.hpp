#pragma once

// Tightened optimal control problem and its solver.
//
// At time t the planner picks controls u_t..u_{T-1} for the bicycle model,
// minimising the task cost subject to
//
//   c(x_tau, y_hat_{tau|t}) >= L * C_{tau|t}   for tau in t+1..min(t+H, T)
//
// plus control/state bounds and (optionally) a hard terminal goal. If the
// realized agent state lies inside the prediction region, Lipschitz continuity
// of c turns the tightened constraint into c(x_tau, y_tau) >= 0.
//
// The solver is single shooting with a quadratic penalty on the constraints,
// minimised by projected gradient descent (Barzilai-Borwein steps with Armijo
// backtracking). Gradients come from an adjoint pass through the rollout. The
// penalty weight grows geometrically over a fixed number of stages and the
// best of several starts is kept.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "csmpc/conformal.hpp"
#include "csmpc/core.hpp"
#include "csmpc/dynamics.hpp"
#include "csmpc/predictors.hpp"

namespace csmpc {

enum class GoalMode { HardTerminal, SoftTerminal };
enum class PlanStatus { Feasible, FeasibleWithSlack, Infeasible };

std::string_view to_string(GoalMode m);
GoalMode goal_mode_from_string(std::string_view s);
std::string_view to_string(PlanStatus s);
PlanStatus plan_status_from_string(std::string_view s);

struct CostWeights {
  double speed_sq = 1.0;        // sum of v_tau^2
  double terminal_goal = 10.0;  // ||p_T - p_goal|| (soft goal mode only)
  double control_effort = 0.01; // sum of steering^2 + accel^2
  friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

struct GoalRegion {
  Vec2 center{6.0, 0.0};
  double radius = 0.25;
  friend bool operator==(const GoalRegion&, const GoalRegion&) = default;
};

/// Problem data that stays fixed across planning steps.
struct PlannerConfig {
  VehicleParams vehicle;
  ControlBounds control_bounds;
  StateBounds state_bounds;
  ConstraintSpec constraint;
  CostWeights weights;
  GoalRegion goal;
  GoalMode goal_mode = GoalMode::SoftTerminal;
  int prediction_horizon = 20;  // H
  bool worst_case_regions = false;
  /// Retry an infeasible solve with slack before falling back to braking.
  bool slack_retry = true;
  double slack_penalty = 100.0;
  /// Closed-loop fallback brakes when the slack needed exceeds this (meters).
  double slack_cap = 0.5;
  friend bool operator==(const PlannerConfig&, const PlannerConfig&) = default;
};

struct SolverConfig {
  double constraint_tol = 1e-6;
  /// Constraints are penalised against targets moved inward by this margin so
  /// that the finite penalty weight still lands on the feasible side.
  double backoff = 0.01;
  double penalty_initial = 10.0;
  double penalty_growth = 10.0;
  int penalty_stages = 5;
  int iterations_per_stage = 400;
  int random_starts = 4;
  std::uint64_t seed = 0;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct OcpSpec {
  int t = 0;
  int T = 1;
  /// Constrained window tau = t+1 .. t+predictions.size(), with matching regions.
  std::vector<JointState> predictions;
  std::vector<RegionRadius> regions;
  VehicleParams vehicle;
  ControlBounds control_bounds;
  StateBounds state_bounds;
  ConstraintSpec constraint;
  CostWeights weights;
  GoalRegion goal;
  GoalMode goal_mode = GoalMode::SoftTerminal;
  bool slack_enabled = false;
  double slack_penalty = 100.0;

  int window_end() const { return t + static_cast<int>(predictions.size()); }
};

/// Window t+1..min(t+H, T) with regions C_{tau|t} from `table`.
OcpSpec make_ocp(int t, int T, const PredictionSet& predictions, const CalibrationTable& table,
                 const PlannerConfig& cfg);

struct PlanResult {
  std::vector<ControlInput> controls;  // u_t .. u_{T-1}
  std::vector<RobotState> states;      // x_t .. x_T (states[0] is the given x_t)
  double cost = 0.0;                   // task cost J, slack penalty excluded
  PlanStatus status = PlanStatus::Infeasible;
  double max_violation = 0.0;
  std::vector<double> slacks;          // per constrained tau
  int iterations = 0;
  std::string reason;
};

/// Task cost of executing `controls` from x_t: weighted speed, effort and
/// (soft mode) terminal goal distance.
double task_cost(const OcpSpec& spec, std::span<const RobotState> states,
                 std::span<const ControlInput> controls);

PlanResult solve_ocp(int t, const RobotState& x_t, const OcpSpec& spec, const SolverConfig& solver,
                     std::span<const ControlInput> warm_start = {});

/// The penalised objective minimised by solve_ocp at penalty weight `mu`, with
/// its gradient written to `grad` (flattened as steering_0, accel_0, ...) when
/// `grad` is non-empty. Exposed for gradient checks.
double penalty_objective(int t, const RobotState& x_t, const OcpSpec& spec,
                         std::span<const ControlInput> controls, double mu, double backoff,
                         std::span<double> grad);

/// Independent re-evaluation of a returned plan.
struct PlanCheck {
  bool states_match = false;
  bool controls_in_bounds = false;
  double max_constraint_violation = 0.0;  // max over window of L*C - c(x, y_hat)
  double max_state_violation = 0.0;
  double goal_violation = 0.0;            // hard goal mode only
  bool feasible = false;                  // everything within tol
};
PlanCheck check_plan(const RobotState& x_t, const OcpSpec& spec, const PlanResult& plan, double tol);

PlanResult open_loop_plan(const RobotState& x0, const PredictionSet& predictions,
                          const CalibrationTable& table, const PlannerConfig& cfg,
                          const SolverConfig& solver);

/// Drop the first control and repeat the last one.
std::vector<ControlInput> shift_controls(std::span<const ControlInput> controls);

/// phi = 0 and the strongest deceleration that does not reverse the robot.
ControlInput braking_control(const RobotState& x, const PlannerConfig& cfg);

struct MpcStepResult {
  ControlInput control;
  PlanResult plan;
  PredictionSet predictions;
  std::vector<RegionRadius> regions;
  bool slack_retry = false;
  bool braked = false;
};

/// One receding-horizon step: predict from the history, solve, and return the
/// first control. An infeasible solve is retried with slack; if that still
/// fails or needs more slack than cfg.slack_cap, the robot brakes.
MpcStepResult mpc_step(int t, const RobotState& x_t, std::span<const JointState> history,
                       const Trajectory* truth, const PredictorSpec& predictor,
                       const CalibrationTable& table, const PlannerConfig& cfg,
                       const SolverConfig& solver, std::span<const ControlInput> warm_start = {});

}  // namespace csmpc
