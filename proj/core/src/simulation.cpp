#include "csmpc/simulation.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "csmpc/parallel.hpp"

namespace csmpc {

std::string_view to_string(RunMode m) { return m == RunMode::Mpc ? "mpc" : "openloop"; }

RunMode run_mode_from_string(std::string_view s) {
  if (s == "mpc") return RunMode::Mpc;
  if (s == "openloop" || s == "open-loop") return RunMode::OpenLoop;
  throw ValidationError("unknown run mode '" + std::string(s) + "'");
}

std::string_view to_string(BatchMode m) {
  switch (m) {
    case BatchMode::Mpc: return "mpc";
    case BatchMode::OpenLoop: return "openloop";
    case BatchMode::Both: return "both";
  }
  return "?";
}

BatchMode batch_mode_from_string(std::string_view s) {
  if (s == "mpc") return BatchMode::Mpc;
  if (s == "openloop" || s == "open-loop") return BatchMode::OpenLoop;
  if (s == "both") return BatchMode::Both;
  throw ValidationError("unknown simulation mode '" + std::string(s) + "' (expected mpc|openloop|both)");
}

SimulationConfig default_simulation_config(const ScenarioConfig& scenario) {
  SimulationConfig cfg;
  cfg.planner.vehicle.dt = scenario.dt;
  cfg.planner.state_bounds.workspace = scenario.workspace;
  cfg.planner.constraint.safety_distance = scenario.safety_distance;
  cfg.planner.goal = {scenario.goal_center, scenario.goal_radius};
  cfg.planner.prediction_horizon = scenario.horizon;
  cfg.start = {scenario.robot_start.x, scenario.robot_start.y, scenario.robot_start_heading,
               scenario.robot_start_speed};
  return cfg;
}

namespace {

double realized_cost(const SimulationConfig& cfg, std::span<const RobotState> states,
                     std::span<const ControlInput> controls) {
  OcpSpec spec;
  spec.weights = cfg.planner.weights;
  spec.goal = cfg.planner.goal;
  spec.goal_mode = cfg.planner.goal_mode;
  return task_cost(spec, states, controls);
}

RunLog start_log(const Trajectory& env, const CalibrationTable& table, const SimulationConfig& cfg,
                 RunMode mode) {
  const int T = table.horizon();
  if (env.horizon() < T) throw ValidationError("environment trajectory shorter than table horizon");
  RunLog log;
  log.mode = mode;
  log.delta = table.delta();
  log.horizon = T;
  log.prediction_horizon = mode == RunMode::Mpc ? cfg.planner.prediction_horizon : T;
  log.solver_seed = cfg.solver.seed;
  log.states.push_back(cfg.start);
  for (int t = 0; t <= T; ++t) log.agents.push_back(env.at(t));
  return log;
}

void finish_log(RunLog& log, const SimulationConfig& cfg) {
  for (std::size_t k = 0; k < log.states.size(); ++k) {
    log.realized_constraint.push_back(
        constraint_value(log.states[k].position(), log.agents[k], cfg.planner.constraint));
  }
  log.summary = summarize(log, cfg);
}

}  // namespace

RunSummary summarize(const RunLog& log, const SimulationConfig& cfg) {
  RunSummary s;
  s.min_constraint = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < log.states.size(); ++k) {
    s.min_constraint = std::min(
        s.min_constraint, constraint_value(log.states[k].position(), log.agents.at(k), cfg.planner.constraint));
  }
  s.safe = s.min_constraint >= 0.0;
  s.total_cost = realized_cost(cfg, log.states, log.controls);
  s.goal_reached = !log.states.empty() &&
                   distance(log.states.back().position(), cfg.planner.goal.center) <= cfg.planner.goal.radius;
  for (const StepRecord& r : log.steps) {
    s.infeasible_steps += r.slack_retry ? 1 : 0;
    s.braked_steps += r.braked ? 1 : 0;
    if (r.one_step_checked) {
      ++s.one_step_checks;
      s.one_step_covered += r.one_step_covered ? 1 : 0;
    }
  }
  s.flagged = s.braked_steps > 0;
  return s;
}

RunLog run_closed_loop(const Trajectory& env, const PredictorSpec& predictor,
                       const CalibrationTable& table, const SimulationConfig& cfg) {
  RunLog log = start_log(env, table, cfg, RunMode::Mpc);
  const int T = table.horizon();
  std::vector<ControlInput> warm;
  for (int t = 0; t < T; ++t) {
    const RobotState x = log.states.back();
    MpcStepResult step = mpc_step(t, x, env.history_through(t), &env, predictor, table, cfg.planner,
                                  cfg.solver, warm);
    StepRecord rec;
    rec.t = t;
    rec.state = x;
    rec.observed = env.at(t);
    rec.predictions = step.predictions.values;
    rec.regions = step.regions;
    rec.control = step.control;
    rec.status = step.plan.status;
    rec.max_slack = step.plan.slacks.empty() ? 0.0 : *std::max_element(step.plan.slacks.begin(), step.plan.slacks.end());
    rec.slack_retry = step.slack_retry;
    rec.braked = step.braked;
    if (!step.predictions.values.empty()) {
      rec.one_step_checked = true;
      rec.one_step_covered = table.region(t, t + 1).covers(
          nonconformity_score(env.at(t + 1), step.predictions.at(t + 1), table.mode()));
    }
    log.steps.push_back(std::move(rec));
    log.controls.push_back(step.control);
    log.states.push_back(bicycle_step(x, step.control, cfg.planner.vehicle.dt, cfg.planner.vehicle.wheelbase));
    warm = step.braked ? std::vector<ControlInput>{} : shift_controls(step.plan.controls);
  }
  finish_log(log, cfg);
  return log;
}

RunLog run_open_loop(const Trajectory& env, const PredictorSpec& predictor,
                     const CalibrationTable& table, const SimulationConfig& cfg) {
  RunLog log = start_log(env, table, cfg, RunMode::OpenLoop);
  const int T = table.horizon();
  PlannerConfig full = cfg.planner;
  full.prediction_horizon = T;
  full.slack_retry = false;
  MpcStepResult first = mpc_step(0, cfg.start, env.history_through(0), &env, predictor, table, full, cfg.solver);
  for (int t = 0; t < T; ++t) {
    const RobotState x = log.states.back();
    StepRecord rec;
    rec.t = t;
    rec.state = x;
    rec.observed = env.at(t);
    if (t == 0) {
      rec.predictions = first.predictions.values;
      rec.regions = first.regions;
      rec.status = first.plan.status;
      rec.max_slack = first.plan.slacks.empty() ? 0.0 : *std::max_element(first.plan.slacks.begin(), first.plan.slacks.end());
      rec.slack_retry = first.slack_retry;
    }
    rec.braked = first.braked;
    rec.control = first.braked ? braking_control(x, cfg.planner) : first.plan.controls[static_cast<std::size_t>(t)];
    log.steps.push_back(rec);
    log.controls.push_back(rec.control);
    log.states.push_back(bicycle_step(x, rec.control, cfg.planner.vehicle.dt, cfg.planner.vehicle.wheelbase));
  }
  finish_log(log, cfg);
  return log;
}

namespace {

ModeStats mode_stats(const std::vector<const RunLog*>& logs) {
  ModeStats m;
  m.runs = logs.size();
  std::vector<double> costs;
  double sum = 0.0;
  for (const RunLog* l : logs) {
    const RunSummary& s = l->summary;
    m.violations += s.safe ? 0 : 1;
    m.flagged += s.flagged ? 1 : 0;
    m.unflagged_violations += (!s.safe && !s.flagged) ? 1 : 0;
    m.braked_runs += s.braked_steps > 0 ? 1 : 0;
    m.slack_runs += s.infeasible_steps > 0 ? 1 : 0;
    if (s.infeasible_steps == 0 && s.braked_steps == 0) {
      ++m.strict_runs;
      m.strict_violations += s.safe ? 0 : 1;
    }
    m.goal_reached += s.goal_reached ? 1 : 0;
    costs.push_back(s.total_cost);
    sum += s.total_cost;
  }
  if (m.runs > 0) {
    m.violation_rate_all = static_cast<double>(m.violations) / static_cast<double>(m.runs);
    const std::size_t unflagged = m.runs - m.flagged;
    m.violation_rate_unflagged =
        unflagged > 0 ? static_cast<double>(m.unflagged_violations) / static_cast<double>(unflagged) : 0.0;
    m.violation_rate_strict = m.strict_runs > 0 ? static_cast<double>(m.strict_violations) /
                                                        static_cast<double>(m.strict_runs)
                                                  : 0.0;
    m.flagged_rate = static_cast<double>(m.flagged) / static_cast<double>(m.runs);
    m.mean_cost = sum / static_cast<double>(m.runs);
    std::sort(costs.begin(), costs.end());
    const std::size_t mid = costs.size() / 2;
    m.median_cost = costs.size() % 2 == 1 ? costs[mid] : 0.5 * (costs[mid - 1] + costs[mid]);
  }
  return m;
}

}  // namespace

BatchReport aggregate(std::span<const RunLog> logs) {
  BatchReport r;
  r.runs = logs.size();
  if (logs.empty()) return r;
  r.delta = logs.front().delta;
  r.horizon = logs.front().horizon;
  r.data_seed = logs.front().data_seed;
  r.solver_seed = logs.front().solver_seed;
  std::vector<const RunLog*> mpc, open;
  for (const RunLog& l : logs) {
    if (l.delta != r.delta || l.horizon != r.horizon || l.data_seed != r.data_seed ||
        l.solver_seed != r.solver_seed) {
      throw ValidationError("run logs come from different experiments (delta/T/seed mismatch)");
    }
    (l.mode == RunMode::Mpc ? mpc : open).push_back(&l);
  }
  r.prediction_horizon = mpc.empty() ? r.horizon : mpc.front()->prediction_horizon;
  if (!mpc.empty()) r.mpc = mode_stats(mpc);
  if (!open.empty()) r.open_loop = mode_stats(open);
  for (const RunLog* l : mpc) {
    r.one_step_checks += static_cast<std::size_t>(l->summary.one_step_checks);
    r.one_step_covered += static_cast<std::size_t>(l->summary.one_step_covered);
  }
  r.one_step_rate = r.one_step_checks > 0
                        ? static_cast<double>(r.one_step_covered) / static_cast<double>(r.one_step_checks)
                        : 0.0;
  for (const RunLog* m : mpc) {
    for (const RunLog* o : open) {
      if (o->trajectory_id == m->trajectory_id) {
        r.pairs.push_back({m->trajectory_id, o->summary.total_cost, m->summary.total_cost,
                           o->summary.flagged, m->summary.flagged});
        break;
      }
    }
  }
  std::sort(r.pairs.begin(), r.pairs.end(),
            [](const PairedCost& a, const PairedCost& b) { return a.trajectory_id < b.trajectory_id; });
  return r;
}

BatchResult batch_evaluate(std::span<const Trajectory> test, std::span<const std::size_t> test_ids,
                           const PredictorSpec& predictor, const CalibrationTable& table,
                           const SimulationConfig& cfg, BatchMode mode, std::uint64_t data_seed) {
  if (test.empty()) throw ValidationError("batch evaluation needs at least one test trajectory");
  if (test_ids.size() != test.size()) throw ValidationError("one id per test trajectory is required");
  const std::set<std::size_t> calib(table.calibration_ids().begin(), table.calibration_ids().end());
  for (std::size_t id : test_ids) {
    if (calib.contains(id)) {
      throw ValidationError("split hygiene: trajectory " + std::to_string(id) +
                            " was used for calibration and cannot be a test environment");
    }
  }
  const std::size_t per = mode == BatchMode::Both ? 2 : 1;
  BatchResult out;
  out.logs.resize(test.size() * per);
  parallel_for(out.logs.size(), [&](std::size_t slot) {
    const std::size_t i = slot / per;
    const bool open = mode == BatchMode::OpenLoop || (mode == BatchMode::Both && slot % 2 == 1);
    RunLog log = open ? run_open_loop(test[i], predictor, table, cfg)
                      : run_closed_loop(test[i], predictor, table, cfg);
    log.trajectory_id = test_ids[i];
    log.data_seed = data_seed;
    out.logs[slot] = std::move(log);
  });
  out.report = aggregate(out.logs);
  return out;
}

BatchResult batch_evaluate(const Dataset& data, const PredictorSpec& predictor,
                           const CalibrationTable& table, const SimulationConfig& cfg, BatchMode mode,
                           std::size_t max_runs) {
  std::vector<std::size_t> ids = data.indices(Split::Test);
  if (max_runs > 0 && ids.size() > max_runs) ids.resize(max_runs);
  std::vector<Trajectory> test;
  test.reserve(ids.size());
  for (std::size_t id : ids) test.push_back(data.trajectories.at(id));
  return batch_evaluate(test, ids, predictor, table, cfg, mode, data.seed);
}

}  // namespace csmpc
