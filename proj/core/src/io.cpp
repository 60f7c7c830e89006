#include "csmpc/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace csmpc {
namespace {

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ValidationError(std::string("missing field '") + key + "'");
  return *it;
}

}  // namespace

void to_json(json& j, const Vec2& v) { j = json::array({v.x, v.y}); }

void from_json(const json& j, Vec2& v) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("2-vector must be a [x, y] array");
  v.x = j[0].get<double>();
  v.y = j[1].get<double>();
}

void to_json(json& j, const ScenarioConfig& c) {
  j = json{{"agent_count", c.agent_count},
           {"T", c.horizon},
           {"h", c.history_len},
           {"dt", c.dt},
           {"workspace", {{"min", c.workspace.min}, {"max", c.workspace.max}}},
           {"spawn_margin", c.spawn_margin},
           {"crossing", c.crossing},
           {"band_depth", c.band_depth},
           {"speed_min", c.speed_min},
           {"speed_max", c.speed_max},
           {"noise_scale", c.noise_scale},
           {"robot_clearance", c.robot_clearance},
           {"robot_start", c.robot_start},
           {"robot_start_heading", c.robot_start_heading},
           {"robot_start_speed", c.robot_start_speed},
           {"goal_center", c.goal_center},
           {"goal_radius", c.goal_radius},
           {"epsilon", c.safety_distance}};
}

void from_json(const json& j, ScenarioConfig& c) {
  read_opt(j, "agent_count", c.agent_count);
  read_opt(j, "T", c.horizon);
  read_opt(j, "h", c.history_len);
  read_opt(j, "dt", c.dt);
  if (auto it = j.find("workspace"); it != j.end()) {
    read_opt(*it, "min", c.workspace.min);
    read_opt(*it, "max", c.workspace.max);
  }
  read_opt(j, "spawn_margin", c.spawn_margin);
  read_opt(j, "crossing", c.crossing);
  read_opt(j, "band_depth", c.band_depth);
  read_opt(j, "speed_min", c.speed_min);
  read_opt(j, "speed_max", c.speed_max);
  read_opt(j, "noise_scale", c.noise_scale);
  read_opt(j, "robot_clearance", c.robot_clearance);
  read_opt(j, "robot_start", c.robot_start);
  read_opt(j, "robot_start_heading", c.robot_start_heading);
  read_opt(j, "robot_start_speed", c.robot_start_speed);
  read_opt(j, "goal_center", c.goal_center);
  read_opt(j, "goal_radius", c.goal_radius);
  read_opt(j, "epsilon", c.safety_distance);
}

void to_json(json& j, const Dataset& d) {
  json trajs = json::array();
  for (std::size_t i = 0; i < d.trajectories.size(); ++i) {
    json states = json::array();
    for (const JointState& js : d.trajectories[i].states()) {
      json agents = json::array();
      for (const AgentState& a : js.agents) agents.push_back(a);
      states.push_back(std::move(agents));
    }
    trajs.push_back({{"split", to_string(d.splits.at(i))}, {"states", std::move(states)}});
  }
  j = json{{"seed", d.seed}, {"scenario", d.scenario}, {"trajectories", std::move(trajs)}};
}

void from_json(const json& j, Dataset& d) {
  d = Dataset{};
  d.seed = field(j, "seed").get<std::uint64_t>();
  d.scenario = field(j, "scenario").get<ScenarioConfig>();
  for (const json& tj : field(j, "trajectories")) {
    d.splits.push_back(split_from_string(field(tj, "split").get<std::string>()));
    std::vector<JointState> states;
    for (const json& sj : field(tj, "states")) {
      JointState js;
      for (const json& aj : sj) js.agents.push_back(aj.get<Vec2>());
      states.push_back(std::move(js));
    }
    d.trajectories.emplace_back(std::move(states), d.scenario.history_len);
  }
}

void to_json(json& j, const PredictorSpec& s) {
  j = json{{"kind", to_string(s.kind)}, {"q", s.order}};
  if (s.kind == PredictorKind::Autoregressive) {
    j["coefficients"] = s.coefficients;
    j["min_norm_fallback"] = s.min_norm_fallback;
  }
  if (s.kind == PredictorKind::NoisyOracle) {
    json errs = json::array();
    for (const auto& step : s.oracle_errors) {
      json row = json::array();
      for (const Vec2& e : step) row.push_back(e);
      errs.push_back(std::move(row));
    }
    j["oracle_errors"] = std::move(errs);
  }
}

void from_json(const json& j, PredictorSpec& s) {
  s = PredictorSpec{};
  s.kind = predictor_kind_from_string(field(j, "kind").get<std::string>());
  read_opt(j, "q", s.order);
  read_opt(j, "coefficients", s.coefficients);
  read_opt(j, "min_norm_fallback", s.min_norm_fallback);
  if (auto it = j.find("oracle_errors"); it != j.end()) {
    for (const json& row : *it) {
      std::vector<Vec2> step;
      for (const json& e : row) step.push_back(e.get<Vec2>());
      s.oracle_errors.push_back(std::move(step));
    }
  }
  validate(s);
}

void to_json(json& j, const RegionRadius& c) {
  if (c.is_unbounded()) {
    j = "unbounded";
  } else {
    j = c.radius();
  }
}

RegionRadius region_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() != "unbounded") throw ValidationError("region value must be a number or \"unbounded\"");
    return RegionRadius::unbounded();
  }
  return RegionRadius::bounded(j.get<double>());
}

void to_json(json& j, const CalibrationTable& t) {
  json regions = json::array();
  for (int s = 0; s < t.horizon(); ++s) {
    for (int tau = s + 1; tau <= std::min(s + t.prediction_horizon(), t.horizon()); ++tau) {
      regions.push_back({{"t", s}, {"tau", tau}, {"C", t.region(s, tau)}});
    }
  }
  j = json{{"delta", t.delta()},
           {"T", t.horizon()},
           {"H", t.prediction_horizon()},
           {"delta_bar", t.delta_bar()},
           {"p", t.quantile_index()},
           {"mode", to_string(t.mode())},
           {"K_val", t.k_val()},
           {"calibration_ids", t.calibration_ids()},
           {"regions", std::move(regions)}};
}

CalibrationTable calibration_table_from_json(const json& j) {
  CalibrationTable t(field(j, "delta").get<double>(), field(j, "T").get<int>(), field(j, "H").get<int>(),
                     score_mode_from_string(field(j, "mode").get<std::string>()),
                     field(j, "K_val").get<std::size_t>());
  if (auto it = j.find("p"); it != j.end() && it->get<std::size_t>() != t.quantile_index()) {
    throw ValidationError("calibration table p disagrees with K_val and delta/T");
  }
  std::vector<std::size_t> ids;
  read_opt(j, "calibration_ids", ids);
  t.set_calibration_ids(std::move(ids));
  std::size_t seen = 0;
  for (const json& r : field(j, "regions")) {
    t.set(field(r, "t").get<int>(), field(r, "tau").get<int>(), region_from_json(field(r, "C")));
    ++seen;
  }
  std::size_t expected = 0;
  for (int s = 0; s < t.horizon(); ++s) {
    expected += static_cast<std::size_t>(std::min(s + t.prediction_horizon(), t.horizon()) - s);
  }
  if (seen != expected) throw ValidationError("calibration table is missing region entries");
  return t;
}

void to_json(json& j, const CoverageReport& r) {
  j = json{{"kind", to_string(r.kind)},
           {"rate", r.rate},
           {"passes", std::count(r.passes.begin(), r.passes.end(), true)},
           {"total", r.passes.size()},
           {"failures", r.failures}};
}

void to_json(json& j, const RobotState& s) { j = json::array({s.x, s.y, s.heading, s.speed}); }

void from_json(const json& j, RobotState& s) {
  if (!j.is_array() || j.size() != 4) throw ValidationError("robot state must be [x, y, theta, v]");
  s = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

void to_json(json& j, const ControlInput& u) { j = json::array({u.steering, u.accel}); }

void from_json(const json& j, ControlInput& u) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("control must be [phi, a]");
  u = {j[0].get<double>(), j[1].get<double>()};
}

void to_json(json& j, const PlannerConfig& c) {
  j = json{{"dt", c.vehicle.dt},
           {"wheelbase", c.vehicle.wheelbase},
           {"steering_max", c.control_bounds.steering_max},
           {"accel_min", c.control_bounds.accel_min},
           {"accel_max", c.control_bounds.accel_max},
           {"workspace", {{"min", c.state_bounds.workspace.min}, {"max", c.state_bounds.workspace.max}}},
           {"speed_max", c.state_bounds.speed_max},
           {"epsilon", c.constraint.safety_distance},
           {"lipschitz", c.constraint.lipschitz},
           {"w_speed_sq", c.weights.speed_sq},
           {"w_terminal_goal", c.weights.terminal_goal},
           {"w_control_effort", c.weights.control_effort},
           {"goal_center", c.goal.center},
           {"goal_radius", c.goal.radius},
           {"goal_mode", to_string(c.goal_mode)},
           {"H", c.prediction_horizon},
           {"worst_case_regions", c.worst_case_regions},
           {"slack_retry", c.slack_retry},
           {"slack_penalty", c.slack_penalty},
           {"slack_cap", c.slack_cap}};
}

void from_json(const json& j, PlannerConfig& c) {
  read_opt(j, "dt", c.vehicle.dt);
  read_opt(j, "wheelbase", c.vehicle.wheelbase);
  read_opt(j, "steering_max", c.control_bounds.steering_max);
  read_opt(j, "accel_min", c.control_bounds.accel_min);
  read_opt(j, "accel_max", c.control_bounds.accel_max);
  if (auto it = j.find("workspace"); it != j.end()) {
    read_opt(*it, "min", c.state_bounds.workspace.min);
    read_opt(*it, "max", c.state_bounds.workspace.max);
  }
  read_opt(j, "speed_max", c.state_bounds.speed_max);
  read_opt(j, "epsilon", c.constraint.safety_distance);
  read_opt(j, "lipschitz", c.constraint.lipschitz);
  read_opt(j, "w_speed_sq", c.weights.speed_sq);
  read_opt(j, "w_terminal_goal", c.weights.terminal_goal);
  read_opt(j, "w_control_effort", c.weights.control_effort);
  read_opt(j, "goal_center", c.goal.center);
  read_opt(j, "goal_radius", c.goal.radius);
  if (auto it = j.find("goal_mode"); it != j.end()) c.goal_mode = goal_mode_from_string(it->get<std::string>());
  read_opt(j, "H", c.prediction_horizon);
  read_opt(j, "worst_case_regions", c.worst_case_regions);
  read_opt(j, "slack_retry", c.slack_retry);
  read_opt(j, "slack_penalty", c.slack_penalty);
  read_opt(j, "slack_cap", c.slack_cap);
}

void to_json(json& j, const SolverConfig& c) {
  j = json{{"constraint_tol", c.constraint_tol},
           {"backoff", c.backoff},
           {"penalty_initial", c.penalty_initial},
           {"penalty_growth", c.penalty_growth},
           {"penalty_stages", c.penalty_stages},
           {"iterations_per_stage", c.iterations_per_stage},
           {"random_starts", c.random_starts},
           {"seed", c.seed}};
}

void from_json(const json& j, SolverConfig& c) {
  read_opt(j, "constraint_tol", c.constraint_tol);
  read_opt(j, "backoff", c.backoff);
  read_opt(j, "penalty_initial", c.penalty_initial);
  read_opt(j, "penalty_growth", c.penalty_growth);
  read_opt(j, "penalty_stages", c.penalty_stages);
  read_opt(j, "iterations_per_stage", c.iterations_per_stage);
  read_opt(j, "random_starts", c.random_starts);
  read_opt(j, "seed", c.seed);
}

void to_json(json& j, const SimulationConfig& c) {
  j = json{{"planner", c.planner}, {"solver", c.solver}, {"start", c.start}};
}

void from_json(const json& j, SimulationConfig& c) {
  read_opt(j, "planner", c.planner);
  read_opt(j, "solver", c.solver);
  read_opt(j, "start", c.start);
}

void to_json(json& j, const PlanResult& p) {
  j = json{{"controls", p.controls}, {"states", p.states},     {"cost", p.cost},
           {"status", to_string(p.status)}, {"max_violation", p.max_violation},
           {"slacks", p.slacks},     {"iterations", p.iterations}, {"reason", p.reason}};
  if (!std::isfinite(p.max_violation)) j["max_violation"] = "inf";
}

void from_json(const json& j, PlanResult& p) {
  p = PlanResult{};
  p.controls = field(j, "controls").get<std::vector<ControlInput>>();
  p.states = field(j, "states").get<std::vector<RobotState>>();
  p.cost = field(j, "cost").get<double>();
  p.status = plan_status_from_string(field(j, "status").get<std::string>());
  const json& mv = field(j, "max_violation");
  p.max_violation = mv.is_string() ? std::numeric_limits<double>::infinity() : mv.get<double>();
  p.slacks = field(j, "slacks").get<std::vector<double>>();
  p.iterations = field(j, "iterations").get<int>();
  read_opt(j, "reason", p.reason);
}

namespace {

json joint_json(const JointState& js) {
  json a = json::array();
  for (const AgentState& s : js.agents) a.push_back(s);
  return a;
}

JointState joint_from(const json& j) {
  JointState js;
  for (const json& a : j) js.agents.push_back(a.get<Vec2>());
  return js;
}

}  // namespace

void to_json(json& j, const StepRecord& r) {
  json preds = json::array();
  for (const JointState& p : r.predictions) preds.push_back(joint_json(p));
  json regions = json::array();
  for (const RegionRadius& c : r.regions) regions.push_back(c);
  j = json{{"t", r.t},
           {"state", r.state},
           {"observed", joint_json(r.observed)},
           {"predictions", std::move(preds)},
           {"regions", std::move(regions)},
           {"control", r.control},
           {"status", to_string(r.status)},
           {"max_slack", r.max_slack},
           {"slack_retry", r.slack_retry},
           {"braked", r.braked},
           {"one_step_checked", r.one_step_checked},
           {"one_step_covered", r.one_step_covered}};
}

void from_json(const json& j, StepRecord& r) {
  r = StepRecord{};
  r.t = field(j, "t").get<int>();
  r.state = field(j, "state").get<RobotState>();
  r.observed = joint_from(field(j, "observed"));
  for (const json& p : field(j, "predictions")) r.predictions.push_back(joint_from(p));
  for (const json& c : field(j, "regions")) r.regions.push_back(region_from_json(c));
  r.control = field(j, "control").get<ControlInput>();
  r.status = plan_status_from_string(field(j, "status").get<std::string>());
  r.max_slack = field(j, "max_slack").get<double>();
  r.slack_retry = field(j, "slack_retry").get<bool>();
  r.braked = field(j, "braked").get<bool>();
  r.one_step_checked = field(j, "one_step_checked").get<bool>();
  r.one_step_covered = field(j, "one_step_covered").get<bool>();
}

void to_json(json& j, const RunLog& l) {
  json agents = json::array();
  for (const JointState& a : l.agents) agents.push_back(joint_json(a));
  const RunSummary& s = l.summary;
  j = json{{"trajectory", l.trajectory_id},
           {"mode", to_string(l.mode)},
           {"delta", l.delta},
           {"T", l.horizon},
           {"H", l.prediction_horizon},
           {"data_seed", l.data_seed},
           {"solver_seed", l.solver_seed},
           {"states", l.states},
           {"agents", std::move(agents)},
           {"controls", l.controls},
           {"realized_c", l.realized_constraint},
           {"steps", l.steps},
           {"summary",
            {{"min_c", s.min_constraint},
             {"total_cost", s.total_cost},
             {"safe", s.safe},
             {"goal_reached", s.goal_reached},
             {"infeasible_steps", s.infeasible_steps},
             {"braked_steps", s.braked_steps},
             {"flagged", s.flagged},
             {"one_step_checks", s.one_step_checks},
             {"one_step_covered", s.one_step_covered}}}};
}

void from_json(const json& j, RunLog& l) {
  l = RunLog{};
  l.trajectory_id = field(j, "trajectory").get<std::size_t>();
  l.mode = run_mode_from_string(field(j, "mode").get<std::string>());
  l.delta = field(j, "delta").get<double>();
  l.horizon = field(j, "T").get<int>();
  l.prediction_horizon = field(j, "H").get<int>();
  l.data_seed = field(j, "data_seed").get<std::uint64_t>();
  l.solver_seed = field(j, "solver_seed").get<std::uint64_t>();
  l.states = field(j, "states").get<std::vector<RobotState>>();
  for (const json& a : field(j, "agents")) l.agents.push_back(joint_from(a));
  l.controls = field(j, "controls").get<std::vector<ControlInput>>();
  l.realized_constraint = field(j, "realized_c").get<std::vector<double>>();
  l.steps = field(j, "steps").get<std::vector<StepRecord>>();
  const json& s = field(j, "summary");
  l.summary.min_constraint = field(s, "min_c").get<double>();
  l.summary.total_cost = field(s, "total_cost").get<double>();
  l.summary.safe = field(s, "safe").get<bool>();
  l.summary.goal_reached = field(s, "goal_reached").get<bool>();
  l.summary.infeasible_steps = field(s, "infeasible_steps").get<int>();
  l.summary.braked_steps = field(s, "braked_steps").get<int>();
  l.summary.flagged = field(s, "flagged").get<bool>();
  l.summary.one_step_checks = field(s, "one_step_checks").get<int>();
  l.summary.one_step_covered = field(s, "one_step_covered").get<int>();
}

namespace {

json mode_json(const ModeStats& m) {
  return json{{"runs", m.runs},
              {"violations", m.violations},
              {"flagged", m.flagged},
              {"unflagged_violations", m.unflagged_violations},
              {"braked_runs", m.braked_runs},
              {"slack_runs", m.slack_runs},
              {"strict_runs", m.strict_runs},
              {"strict_violations", m.strict_violations},
              {"goal_reached", m.goal_reached},
              {"violation_rate_all", m.violation_rate_all},
              {"violation_rate_unflagged", m.violation_rate_unflagged},
              {"violation_rate_strict", m.violation_rate_strict},
              {"flagged_rate", m.flagged_rate},
              {"mean_cost", m.mean_cost},
              {"median_cost", m.median_cost}};
}

}  // namespace

void to_json(json& j, const BatchReport& r) {
  json pairs = json::array();
  for (const PairedCost& p : r.pairs) {
    pairs.push_back({{"trajectory", p.trajectory_id},
                     {"openloop_cost", p.open_loop_cost},
                     {"mpc_cost", p.mpc_cost},
                     {"openloop_flagged", p.open_loop_flagged},
                     {"mpc_flagged", p.mpc_flagged}});
  }
  j = json{{"runs", r.runs},
           {"mpc", r.mpc ? mode_json(*r.mpc) : json(nullptr)},
           {"openloop", r.open_loop ? mode_json(*r.open_loop) : json(nullptr)},
           {"pairs", std::move(pairs)},
           {"one_step", {{"checks", r.one_step_checks}, {"covered", r.one_step_covered}, {"rate", r.one_step_rate}}},
           {"delta", r.delta},
           {"T", r.horizon},
           {"H", r.prediction_horizon},
           {"data_seed", r.data_seed},
           {"solver_seed", r.solver_seed}};
}

// ---------------------------------------------------------------------------

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::filesystem::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) { write_file_atomic(path, j.dump(1) + "\n"); }

Dataset read_dataset(const std::filesystem::path& path) {
  try {
    return read_json(path).get<Dataset>();
  } catch (const json::exception& e) {
    throw ValidationError("malformed dataset " + path.string() + ": " + e.what());
  }
}

void write_dataset(const std::filesystem::path& path, const Dataset& d) { write_json(path, json(d)); }

std::string trajectory_csv(const Trajectory& tr) {
  std::string out = "t,agent,x,y\n";
  for (int t = -tr.history_len(); t <= tr.horizon(); ++t) {
    const JointState& js = tr.at(t);
    for (std::size_t j = 0; j < js.size(); ++j) {
      out += std::to_string(t) + "," + std::to_string(j) + "," + num(js[j].x) + "," + num(js[j].y) + "\n";
    }
  }
  return out;
}

std::string plan_csv(const OcpSpec& spec, const PlanResult& plan) {
  std::string out = "tau,x,y,theta,v,c,C\n";
  for (std::size_t k = 0; k < plan.states.size(); ++k) {
    const RobotState& s = plan.states[k];
    std::string c_val;
    std::string region;
    if (k >= 1 && k <= spec.predictions.size()) {
      c_val = num(constraint_value(s.position(), spec.predictions[k - 1], spec.constraint));
      region = spec.regions[k - 1].is_unbounded() ? "inf" : num(spec.regions[k - 1].radius());
    }
    out += std::to_string(spec.t + static_cast<int>(k)) + "," + num(s.x) + "," + num(s.y) + "," +
           num(s.heading) + "," + num(s.speed) + "," + c_val + "," + region + "\n";
  }
  return out;
}

std::string score_histogram_csv(const ScoreTensor& scores, const CalibrationTable& table, int bins) {
  if (bins < 1) throw ValidationError("histogram needs at least one bin");
  std::string out = "t,tau,bin_lo,bin_hi,count,C\n";
  for (int t = 0; t < scores.horizon(); ++t) {
    for (int tau = t + 1; tau <= std::min(t + scores.prediction_horizon(), scores.horizon()); ++tau) {
      const auto s = scores.scores(t, tau);
      const double hi = std::max(*std::max_element(s.begin(), s.end()), 1e-12);
      std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
      for (double v : s) {
        auto b = static_cast<std::size_t>(v / hi * bins);
        counts[std::min(b, counts.size() - 1)]++;
      }
      std::string region = "";
      if (table.has(t, tau)) {
        const RegionRadius& c = table.region(t, tau);
        region = c.is_unbounded() ? "inf" : num(c.radius());
      }
      for (int b = 0; b < bins; ++b) {
        out += std::to_string(t) + "," + std::to_string(tau) + "," + num(hi * b / bins) + "," +
               num(hi * (b + 1) / bins) + "," + std::to_string(counts[static_cast<std::size_t>(b)]) + "," +
               region + "\n";
      }
    }
  }
  return out;
}

std::string batch_summary_csv(std::span<const RunLog> logs) {
  std::string out = "trajectory,mode,cost,min_c,safe,flagged,goal_reached,infeasible_steps,one_step_checks,one_step_covered\n";
  for (const RunLog& l : logs) {
    const RunSummary& s = l.summary;
    out += std::to_string(l.trajectory_id) + "," + std::string(to_string(l.mode)) + "," + num(s.total_cost) + "," +
           num(s.min_constraint) + "," + (s.safe ? "1" : "0") + "," + (s.flagged ? "1" : "0") + "," +
           (s.goal_reached ? "1" : "0") + "," + std::to_string(s.infeasible_steps) + "," +
           std::to_string(s.one_step_checks) + "," + std::to_string(s.one_step_covered) + "\n";
  }
  return out;
}

std::string paired_cost_csv(const BatchReport& report) {
  std::string out = "trajectory,openloop_cost,mpc_cost,openloop_flagged,mpc_flagged\n";
  for (const PairedCost& p : report.pairs) {
    out += std::to_string(p.trajectory_id) + "," + num(p.open_loop_cost) + "," + num(p.mpc_cost) + "," +
           (p.open_loop_flagged ? "1" : "0") + "," + (p.mpc_flagged ? "1" : "0") + "\n";
  }
  return out;
}

std::string run_overlay_csv(const RunLog& log) {
  std::string out = "t,robot_x,robot_y,agent,x,y,c\n";
  for (std::size_t k = 0; k < log.states.size(); ++k) {
    const RobotState& s = log.states[k];
    for (std::size_t j = 0; j < log.agents[k].size(); ++j) {
      out += std::to_string(k) + "," + num(s.x) + "," + num(s.y) + "," + std::to_string(j) + "," +
             num(log.agents[k][j].x) + "," + num(log.agents[k][j].y) + "," + num(log.realized_constraint[k]) + "\n";
    }
  }
  return out;
}

}  // namespace csmpc
