#include "csmpc_cli/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>

#include "csmpc/planner.hpp"
#include "csmpc/scenario.hpp"

namespace csmpc::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kDataset = "dataset.json";
constexpr const char* kPredictor = "predictor.json";
constexpr const char* kTable = "calibration.json";

template <typename T>
T get_field(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ValidationError("config." + key + ": " + e.what());
  }
}

}  // namespace

void apply_config(RunConfig& cfg, const json& j) {
  if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "dir") {
      cfg.dir = get_field<std::string>(v, key);
    } else if (key == "scenario") {
      try {
        from_json(v, cfg.scenario);
      } catch (const json::exception& e) {
        throw ValidationError("config.scenario: " + std::string(e.what()));
      }
    } else if (key == "counts") {
      if (v.contains("train")) cfg.k_train = get_field<std::size_t>(v["train"], "counts.train");
      if (v.contains("val")) cfg.k_val = get_field<std::size_t>(v["val"], "counts.val");
      if (v.contains("test")) cfg.k_test = get_field<std::size_t>(v["test"], "counts.test");
    } else if (key == "data_seed") {
      cfg.data_seed = get_field<std::uint64_t>(v, key);
    } else if (key == "predictor") {
      if (v.contains("kind")) {
        cfg.predictor = predictor_kind_from_string(get_field<std::string>(v["kind"], "predictor.kind"));
      }
      if (v.contains("q")) cfg.order = get_field<int>(v["q"], "predictor.q");
    } else if (key == "delta") {
      cfg.delta = get_field<double>(v, key);
    } else if (key == "T") {
      cfg.T = get_field<int>(v, key);
    } else if (key == "H") {
      cfg.H = get_field<int>(v, key);
    } else if (key == "score_mode") {
      cfg.score_mode = score_mode_from_string(get_field<std::string>(v, key));
    } else if (key == "coverage_kind") {
      cfg.coverage = coverage_kind_from_string(get_field<std::string>(v, key));
    } else if (key == "histogram_bins") {
      cfg.histogram_bins = get_field<int>(v, key);
    } else if (key == "planner") {
      if (!v.is_object()) throw ValidationError("config.planner must be an object");
      cfg.planner.update(v);
    } else if (key == "solver") {
      if (!v.is_object()) throw ValidationError("config.solver must be an object");
      cfg.solver.update(v);
    } else if (key == "start") {
      cfg.start = v;
    } else if (key == "mode") {
      cfg.mode = batch_mode_from_string(get_field<std::string>(v, key));
    } else if (key == "runs") {
      cfg.runs = get_field<std::size_t>(v, key);
    } else if (key == "plan") {
      if (v.contains("t")) cfg.plan_t = get_field<int>(v["t"], "plan.t");
      if (v.contains("openloop")) cfg.plan_openloop = get_field<bool>(v["openloop"], "plan.openloop");
      if (v.contains("trajectory")) cfg.plan_trajectory = get_field<std::size_t>(v["trajectory"], "plan.trajectory");
    } else {
      throw ValidationError("config: unknown field '" + key + "'");
    }
  }
}

json config_echo(const RunConfig& cfg) {
  return json{{"scenario", cfg.scenario},
              {"counts", {{"train", cfg.k_train}, {"val", cfg.k_val}, {"test", cfg.k_test}}},
              {"data_seed", cfg.data_seed},
              {"predictor", {{"kind", to_string(cfg.predictor)}, {"q", cfg.order}}},
              {"delta", cfg.delta},
              {"T", cfg.T},
              {"H", cfg.H},
              {"score_mode", to_string(cfg.score_mode)},
              {"coverage_kind", to_string(cfg.coverage)},
              {"histogram_bins", cfg.histogram_bins},
              {"planner", cfg.planner},
              {"solver", cfg.solver},
              {"start", cfg.start},
              {"mode", to_string(cfg.mode)},
              {"runs", cfg.runs},
              {"plan", {{"t", cfg.plan_t}, {"openloop", cfg.plan_openloop}, {"trajectory", cfg.plan_trajectory}}}};
}

SimulationConfig simulation_config(const RunConfig& cfg, const ScenarioConfig& scenario, int T, int H) {
  SimulationConfig sim = default_simulation_config(scenario);
  sim.planner.prediction_horizon = std::min(H, T);
  try {
    from_json(cfg.planner, sim.planner);
    from_json(cfg.solver, sim.solver);
    if (!cfg.start.is_null()) from_json(cfg.start, sim.start);
  } catch (const json::exception& e) {
    throw ValidationError("config.planner/solver/start: " + std::string(e.what()));
  }
  if (sim.planner.prediction_horizon < 1 || sim.planner.prediction_horizon > H) {
    throw ValidationError("planner.H must lie in [1, H]");
  }
  return sim;
}

namespace {

struct Horizons {
  int T;
  int H;
};

Horizons resolve_horizons(const RunConfig& cfg, const Dataset& data) {
  const int T = cfg.T > 0 ? cfg.T : data.scenario.horizon;
  const int H = cfg.H > 0 ? cfg.H : T;
  if (T > data.scenario.horizon) throw ValidationError("T exceeds the dataset horizon");
  if (H < 1 || H > T) throw ValidationError("H must satisfy 1 <= H <= T");
  if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  return {T, H};
}

void write_artifact(const fs::path& path, json body, const RunConfig& cfg) {
  body["config"] = config_echo(cfg);
  write_json(path, body);
}

void write_csv(const fs::path& path, const std::string& csv, const RunConfig& cfg) {
  write_file_atomic(path, "# config " + config_echo(cfg).dump() + "\n" + csv);
}

Dataset load_dataset(const RunConfig& cfg) {
  Dataset d = read_dataset(cfg.dir / kDataset);
  const auto problems = validate_dataset(d);
  if (!problems.empty()) throw ValidationError("dataset: " + problems.front());
  return d;
}

PredictorSpec load_predictor(const RunConfig& cfg) {
  try {
    return read_json(cfg.dir / kPredictor).get<PredictorSpec>();
  } catch (const json::exception& e) {
    throw ValidationError("predictor.json: " + std::string(e.what()));
  }
}

CalibrationTable load_table(const RunConfig& cfg) {
  try {
    return calibration_table_from_json(read_json(cfg.dir / kTable));
  } catch (const json::exception& e) {
    throw ValidationError("calibration.json: " + std::string(e.what()));
  }
}

std::string fixed(double v, int digits = 4) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

int cmd_generate(RunConfig cfg, std::optional<int> T, std::ostream& out) {
  if (T) cfg.scenario.horizon = *T;
  const Dataset d = generate_dataset(cfg.scenario, cfg.k_train, cfg.k_val, cfg.k_test, cfg.data_seed);
  write_artifact(cfg.dir / kDataset, json(d), cfg);
  out << "generate: " << d.trajectories.size() << " trajectories (" << cfg.k_train << "/" << cfg.k_val << "/"
      << cfg.k_test << ") -> " << (cfg.dir / kDataset).string() << "\n";
  return kExitOk;
}

int cmd_fit(const RunConfig& cfg, std::ostream& out) {
  const Dataset d = load_dataset(cfg);
  PredictorSpec spec;
  switch (cfg.predictor) {
    case PredictorKind::ConstantVelocity: spec = PredictorSpec::constant_velocity(); break;
    case PredictorKind::NoisyOracle: spec = PredictorSpec::noisy_oracle(); break;
    case PredictorKind::Autoregressive: {
      const auto train = d.select(Split::Train);
      if (train.empty()) throw ValidationError("fit: the autoregressive predictor needs a training split");
      spec = fit_autoregressive(train, cfg.order);
      break;
    }
  }
  write_artifact(cfg.dir / kPredictor, json(spec), cfg);
  out << "fit: " << to_string(spec.kind) << " q=" << spec.order
      << (spec.min_norm_fallback ? " (minimum-norm fallback)" : "") << " -> " << (cfg.dir / kPredictor).string()
      << "\n";
  return kExitOk;
}

int cmd_calibrate(const RunConfig& cfg, std::ostream& out) {
  const Dataset d = load_dataset(cfg);
  const PredictorSpec spec = load_predictor(cfg);
  const auto [T, H] = resolve_horizons(cfg, d);
  const CalibrationTable table = calibrate(d, spec, cfg.delta, T, H, cfg.score_mode);
  write_artifact(cfg.dir / kTable, json(table), cfg);
  std::size_t unbounded = 0;
  for (int t = 0; t < T; ++t) {
    for (int tau = t + 1; tau <= std::min(t + H, T); ++tau) unbounded += table.region(t, tau).is_unbounded();
  }
  out << "calibrate: K=" << table.k_val() << " p=" << table.quantile_index() << " T=" << T << " H=" << H
      << " mode=" << to_string(table.mode()) << " unbounded=" << unbounded << " -> "
      << (cfg.dir / kTable).string() << "\n";
  return kExitOk;
}

int cmd_coverage(const RunConfig& cfg, std::ostream& out) {
  const Dataset d = load_dataset(cfg);
  const PredictorSpec spec = load_predictor(cfg);
  const CalibrationTable table = load_table(cfg);
  const auto ids = d.indices(Split::Test);
  const auto test = d.select(Split::Test);
  const CoverageReport report = empirical_coverage(test, spec, table, cfg.coverage);
  json body = report;
  json failures = json::array();
  for (std::size_t pos : report.failures) failures.push_back(ids.at(pos));
  body["failures"] = std::move(failures);
  body["delta"] = table.delta();
  body["T"] = table.horizon();
  body["H"] = table.prediction_horizon();
  write_artifact(cfg.dir / "coverage.json", body, cfg);
  const ScoreTensor scores =
      collect_scores(test, spec, table.horizon(), table.prediction_horizon(), table.mode());
  write_csv(cfg.dir / "scores.csv", score_histogram_csv(scores, table, cfg.histogram_bins), cfg);
  out << "coverage: " << to_string(report.kind) << " rate=" << fixed(report.rate) << " over " << test.size()
      << " test trajectories, " << report.failures.size() << " failures\n";
  return kExitOk;
}

int cmd_plan(const RunConfig& cfg, std::ostream& out) {
  const Dataset d = load_dataset(cfg);
  const PredictorSpec spec = load_predictor(cfg);
  const CalibrationTable table = load_table(cfg);
  const auto ids = d.indices(Split::Test);
  if (cfg.plan_trajectory >= ids.size()) throw ValidationError("plan.trajectory exceeds the test split size");
  const std::size_t id = ids[cfg.plan_trajectory];
  const Trajectory& env = d.trajectories[id];
  const int T = table.horizon();
  const SimulationConfig sim = simulation_config(cfg, d.scenario, T, table.prediction_horizon());
  const int t = cfg.plan_t;
  if (t < 0 || t >= T) throw ValidationError("plan.t must satisfy 0 <= t < T");
  const CalibrationTable regions = sim.planner.worst_case_regions ? worst_case_over_time(table) : table;

  json body;
  PlanResult plan;
  OcpSpec ocp;
  if (cfg.plan_openloop) {
    if (t != 0) throw ValidationError("plan: open-loop planning starts at t = 0");
    const PredictionSet preds = predict(spec, env.history_through(0), 0, T, T, &env);
    plan = open_loop_plan(sim.start, preds, table, sim.planner, sim.solver);
    PlannerConfig full = sim.planner;
    full.prediction_horizon = T;
    ocp = make_ocp(0, T, preds, regions, full);
  } else {
    const MpcStepResult step = mpc_step(t, sim.start, env.history_through(t), &env, spec, table, sim.planner,
                                        sim.solver);
    plan = step.plan;
    ocp = make_ocp(t, T, step.predictions, regions, sim.planner);
    body["first_control"] = step.control;
    body["slack_retry"] = step.slack_retry;
    body["braked"] = step.braked;
  }
  body["trajectory"] = id;
  body["t"] = t;
  body["openloop"] = cfg.plan_openloop;
  body["plan"] = plan;
  write_artifact(cfg.dir / "plan.json", body, cfg);
  write_csv(cfg.dir / "plan.csv", plan_csv(ocp, plan), cfg);
  out << "plan: trajectory " << id << " t=" << t << (cfg.plan_openloop ? " open-loop" : " mpc")
      << " status=" << to_string(plan.status) << " cost=" << fixed(plan.cost) << "\n";
  return kExitOk;
}

std::string run_stem(const RunLog& log) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "run_%06zu_", log.trajectory_id);
  return buf + std::string(to_string(log.mode));
}

std::string stats_line(const char* name, const std::optional<ModeStats>& m) {
  if (!m) return "";
  return std::string(" ") + name + ": runs=" + std::to_string(m->runs) +
         " violations=" + std::to_string(m->violations) + " flagged=" + std::to_string(m->flagged) +
         " unflagged-violation-rate=" + fixed(m->violation_rate_unflagged) + " mean-cost=" + fixed(m->mean_cost);
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  const Dataset d = load_dataset(cfg);
  const PredictorSpec spec = load_predictor(cfg);
  const CalibrationTable table = load_table(cfg);
  const SimulationConfig sim = simulation_config(cfg, d.scenario, table.horizon(), table.prediction_horizon());
  const BatchResult result = batch_evaluate(d, spec, table, sim, cfg.mode, cfg.runs);

  const fs::path runs = cfg.dir / "runs";
  if (fs::exists(runs)) {
    for (const auto& entry : fs::directory_iterator(runs)) {
      const std::string name = entry.path().filename().string();
      if (name.rfind("run_", 0) == 0) fs::remove(entry.path());
    }
  }
  for (const RunLog& log : result.logs) {
    write_artifact(runs / (run_stem(log) + ".json"), json(log), cfg);
    write_csv(runs / (run_stem(log) + ".csv"), run_overlay_csv(log), cfg);
  }
  write_artifact(cfg.dir / "batch_report.json", json{{"report", result.report}}, cfg);
  write_csv(cfg.dir / "batch_summary.csv", batch_summary_csv(result.logs), cfg);
  if (cfg.mode == BatchMode::Both) write_csv(cfg.dir / "paired_cost.csv", paired_cost_csv(result.report), cfg);
  out << "simulate: " << result.logs.size() << " runs" << stats_line("mpc", result.report.mpc)
      << stats_line("openloop", result.report.open_loop);
  if (result.report.one_step_checks > 0) out << " one-step-coverage=" << fixed(result.report.one_step_rate, 5);
  out << "\n";
  return kExitOk;
}

int cmd_report(const RunConfig& cfg, std::ostream& out) {
  const fs::path runs = cfg.dir / "runs";
  if (!fs::is_directory(runs)) throw ValidationError("report: no runs directory in " + cfg.dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(runs)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  if (files.empty()) throw ValidationError("report: no run logs in " + runs.string());
  std::sort(files.begin(), files.end());
  std::vector<RunLog> logs;
  json config;
  for (const fs::path& f : files) {
    const json j = read_json(f);
    try {
      logs.push_back(j.get<RunLog>());
    } catch (const json::exception& e) {
      throw ValidationError(f.filename().string() + ": " + e.what());
    }
    if (config.is_null() && j.contains("config")) config = j["config"];
  }
  const BatchReport report = aggregate(logs);
  json body{{"report", report}};
  if (!config.is_null()) body["config"] = config;
  write_json(cfg.dir / "report.json", body);
  out << "report: " << logs.size() << " runs" << stats_line("mpc", report.mpc)
      << stats_line("openloop", report.open_loop) << "\n";
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformal-prediction safe MPC: data, calibration, planning and simulation", "csmpc"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  std::optional<std::string> dir;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--dir", dir, "artifact directory (default: current directory)");
  };

  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> n_train, n_val, n_test;
  std::optional<int> gen_T;
  auto* gen = app.add_subcommand("generate", "sample a synthetic dataset");
  common(gen);
  gen->add_option("--out", dir, "artifact directory");
  gen->add_option("--seed", seed, "dataset seed");
  gen->add_option("--train", n_train, "training trajectories");
  gen->add_option("--val", n_val, "validation trajectories");
  gen->add_option("--test", n_test, "test trajectories");
  gen->add_option("--T", gen_T, "task horizon of every trajectory");

  std::optional<std::string> fit_kind;
  std::optional<int> order;
  auto* fit = app.add_subcommand("fit", "fit or select the trajectory predictor");
  common(fit);
  fit->add_option("--kind", fit_kind, "autoregressive|constant-velocity|noisy-oracle");
  fit->add_option("--order", order, "autoregressive lag count q");

  std::optional<double> delta;
  std::optional<int> T, H;
  std::optional<std::string> score_mode;
  auto* cal = app.add_subcommand("calibrate", "compute the conformal region table");
  common(cal);
  cal->add_option("--delta", delta, "failure probability");
  cal->add_option("--T", T, "union-bound horizon");
  cal->add_option("--H", H, "prediction horizon");
  cal->add_option("--mode", score_mode, "joint|agentmax");

  std::optional<std::string> cov_kind;
  std::optional<int> bins;
  auto* cov = app.add_subcommand("coverage", "audit region coverage on the test split");
  common(cov);
  cov->add_option("--kind", cov_kind, "joint|onestep");
  cov->add_option("--bins", bins, "histogram bins per (t, tau)");

  std::optional<int> plan_t;
  bool openloop = false;
  std::optional<std::size_t> plan_traj;
  auto* plan = app.add_subcommand("plan", "solve one planning problem");
  common(plan);
  plan->add_option("--t", plan_t, "planning time");
  plan->add_flag("--openloop", openloop, "open-loop plan over the full horizon");
  plan->add_option("--trajectory", plan_traj, "position within the test split");

  std::optional<std::string> sim_mode;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> solver_seed;
  auto* sim = app.add_subcommand("simulate", "closed-loop and open-loop batch evaluation");
  common(sim);
  sim->add_option("--mode", sim_mode, "mpc|openloop|both");
  sim->add_option("--runs", runs, "number of test trajectories (default: all)");
  sim->add_option("--solver-seed", solver_seed, "seed of the solver's random starts");

  auto* rep = app.add_subcommand("report", "aggregate run logs");
  common(rep);
  rep->add_option("--in", dir, "artifact directory holding runs/");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    RunConfig cfg;
    if (config_path) apply_config(cfg, read_json(*config_path));
    if (dir) cfg.dir = *dir;
    if (seed) cfg.data_seed = *seed;
    if (n_train) cfg.k_train = *n_train;
    if (n_val) cfg.k_val = *n_val;
    if (n_test) cfg.k_test = *n_test;
    if (fit_kind) cfg.predictor = predictor_kind_from_string(*fit_kind);
    if (order) cfg.order = *order;
    if (delta) cfg.delta = *delta;
    if (T) cfg.T = *T;
    if (H) cfg.H = *H;
    if (score_mode) cfg.score_mode = score_mode_from_string(*score_mode);
    if (cov_kind) cfg.coverage = coverage_kind_from_string(*cov_kind);
    if (bins) cfg.histogram_bins = *bins;
    if (plan_t) cfg.plan_t = *plan_t;
    if (openloop) cfg.plan_openloop = true;
    if (plan_traj) cfg.plan_trajectory = *plan_traj;
    if (sim_mode) cfg.mode = batch_mode_from_string(*sim_mode);
    if (runs) cfg.runs = *runs;
    if (solver_seed) cfg.solver["seed"] = *solver_seed;

    if (gen->parsed()) return cmd_generate(cfg, gen_T, out);
    if (fit->parsed()) return cmd_fit(cfg, out);
    if (cal->parsed()) return cmd_calibrate(cfg, out);
    if (cov->parsed()) return cmd_coverage(cfg, out);
    if (plan->parsed()) return cmd_plan(cfg, out);
    if (sim->parsed()) return cmd_simulate(cfg, out);
    if (rep->parsed()) return cmd_report(cfg, out);
    err << "error: no subcommand\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace csmpc::cli
