#pragma once

// JSON and CSV serialization of every csmpc artifact. Doubles are written in
// shortest round-trip form, so write-then-read reproduces values exactly.

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "csmpc/conformal.hpp"
#include "csmpc/core.hpp"
#include "csmpc/planner.hpp"
#include "csmpc/predictors.hpp"
#include "csmpc/simulation.hpp"

namespace csmpc {

using json = nlohmann::json;

void to_json(json& j, const Vec2& v);
void from_json(const json& j, Vec2& v);
void to_json(json& j, const ScenarioConfig& c);
void from_json(const json& j, ScenarioConfig& c);
void to_json(json& j, const Dataset& d);
void from_json(const json& j, Dataset& d);
void to_json(json& j, const PredictorSpec& s);
void from_json(const json& j, PredictorSpec& s);
void to_json(json& j, const RegionRadius& c);
RegionRadius region_from_json(const json& j);
void to_json(json& j, const CalibrationTable& t);
CalibrationTable calibration_table_from_json(const json& j);
void to_json(json& j, const CoverageReport& r);

void to_json(json& j, const RobotState& s);
void from_json(const json& j, RobotState& s);
void to_json(json& j, const ControlInput& u);
void from_json(const json& j, ControlInput& u);
void to_json(json& j, const PlannerConfig& c);
void from_json(const json& j, PlannerConfig& c);
void to_json(json& j, const SolverConfig& c);
void from_json(const json& j, SolverConfig& c);
void to_json(json& j, const SimulationConfig& c);
void from_json(const json& j, SimulationConfig& c);
void to_json(json& j, const PlanResult& p);
void from_json(const json& j, PlanResult& p);

void to_json(json& j, const StepRecord& r);
void from_json(const json& j, StepRecord& r);
void to_json(json& j, const RunLog& l);
void from_json(const json& j, RunLog& l);
void to_json(json& j, const BatchReport& r);

/// Writes `contents` to a sibling temp file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const Dataset& d);

/// Columns t, agent, x, y with t = -h..T.
std::string trajectory_csv(const Trajectory& tr);
/// Columns tau, x, y, theta, v, c, C for the planned rollout of `plan`.
std::string plan_csv(const OcpSpec& spec, const PlanResult& plan);
/// Columns t, tau, bin_lo, bin_hi, count, C: `bins` equal-width bins per pair.
std::string score_histogram_csv(const ScoreTensor& scores, const CalibrationTable& table, int bins);
/// One row per run: trajectory, mode, cost, min_c, safe, flagged, goal_reached.
std::string batch_summary_csv(std::span<const RunLog> logs);
/// One row per paired trajectory: trajectory, openloop_cost, mpc_cost, flags.
std::string paired_cost_csv(const BatchReport& report);
/// Robot and agent positions per step: t, robot_x, robot_y, agent, x, y, c.
std::string run_overlay_csv(const RunLog& log);

}  // namespace csmpc
