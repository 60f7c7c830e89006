#include "csmpc/core.hpp"

#include <sstream>

namespace csmpc {

Trajectory::Trajectory(std::vector<JointState> states, int history_len)
    : states_(std::move(states)), history_len_(history_len) {
  if (history_len_ < 0) throw ValidationError("trajectory history_len must be >= 0");
  if (static_cast<int>(states_.size()) < history_len_ + 2) {
    throw ValidationError("trajectory needs at least history_len + 2 states");
  }
}

const JointState& Trajectory::at(int t) const {
  if (t < -history_len_ || t > horizon()) {
    throw std::out_of_range("trajectory time index " + std::to_string(t) + " outside [" +
                            std::to_string(-history_len_) + ", " + std::to_string(horizon()) + "]");
  }
  return states_[static_cast<std::size_t>(t + history_len_)];
}

std::span<const JointState> Trajectory::history_through(int t) const {
  at(t);  // bounds check
  return std::span<const JointState>(states_).first(static_cast<std::size_t>(t + history_len_ + 1));
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "?";
}

Split split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw ValidationError("unknown split label '" + std::string(s) + "'");
}

void validate(const ScenarioConfig& cfg) {
  auto fail = [](const std::string& what) { throw ValidationError("scenario." + what); };
  if (cfg.agent_count < 1) fail("agent_count must be >= 1");
  if (cfg.horizon < 1) fail("horizon (T) must be >= 1");
  if (cfg.history_len < 1) fail("history_len must be >= 1");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) fail("dt must be > 0");
  if (!(cfg.safety_distance >= 0.0)) fail("safety_distance must be >= 0");
  if (!(cfg.speed_min >= 0.0) || !(cfg.speed_max >= cfg.speed_min)) {
    fail("speed range must satisfy 0 <= speed_min <= speed_max");
  }
  if (!(cfg.noise_scale >= 0.0)) fail("noise_scale must be >= 0");
  if (!(cfg.spawn_margin >= 0.0)) fail("spawn_margin must be >= 0");
  if (!(cfg.robot_clearance >= 0.0)) fail("robot_clearance must be >= 0");
  if (!(cfg.band_depth >= 0.0)) fail("band_depth must be >= 0");
  if (!(cfg.goal_radius >= 0.0)) fail("goal_radius must be >= 0");
  const Box& w = cfg.workspace;
  if (!w.min.finite() || !w.max.finite() || !(w.max.x > w.min.x) || !(w.max.y > w.min.y)) {
    fail("workspace must be a non-empty finite box");
  }
}

std::size_t Dataset::count(Split s) const {
  std::size_t n = 0;
  for (Split x : splits) n += (x == s);
  return n;
}

std::vector<std::size_t> Dataset::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits.size(); ++i) {
    if (splits[i] == s) out.push_back(i);
  }
  return out;
}

std::vector<Trajectory> Dataset::select(Split s) const {
  std::vector<Trajectory> out;
  for (std::size_t i : indices(s)) out.push_back(trajectories.at(i));
  return out;
}

std::vector<std::string> validate_dataset(const Dataset& d) {
  std::vector<std::string> out;
  auto report = [&](std::size_t i, const std::string& rule) {
    std::ostringstream os;
    os << "trajectory " << i << ": " << rule;
    out.push_back(os.str());
  };

  if (d.splits.size() != d.trajectories.size()) {
    out.push_back("split labels (" + std::to_string(d.splits.size()) +
                  ") do not partition the trajectory list (" +
                  std::to_string(d.trajectories.size()) + ")");
  }
  if (d.count(Split::Val) < 1) out.push_back("validation split is empty");
  if (d.count(Split::Test) < 1) out.push_back("test split is empty");
  if (d.trajectories.empty()) return out;

  // The first trajectory fixes N, h and T for the dataset.
  const Trajectory& ref = d.trajectories.front();
  const std::size_t n_ref = ref.agent_count();
  for (std::size_t i = 0; i < d.trajectories.size(); ++i) {
    const Trajectory& tr = d.trajectories[i];
    if (tr.history_len() != ref.history_len()) report(i, "history length mismatch");
    if (tr.horizon() != ref.horizon()) report(i, "horizon mismatch");
    if (tr.states().size() < static_cast<std::size_t>(tr.history_len()) + 2) {
      report(i, "fewer than h + 2 states");
    }
    bool count_ok = true;
    bool finite_ok = true;
    for (std::size_t k = 0; k < tr.states().size(); ++k) {
      const JointState& js = tr.states()[k];
      if (js.size() == 0 || js.size() != n_ref) count_ok = false;
      for (const AgentState& a : js.agents) {
        if (!a.finite() && finite_ok) {
          finite_ok = false;
          report(i, "non-finite coordinate at time index " +
                        std::to_string(static_cast<int>(k) - tr.history_len()));
        }
      }
    }
    if (!count_ok) {
      report(i, "agent-count mismatch (expected " + std::to_string(n_ref) + ")");
    }
  }
  if (d.scenario.history_len != ref.history_len() || d.scenario.horizon != ref.horizon()) {
    out.push_back("scenario h/T disagree with trajectory lengths");
  }
  return out;
}

}  // namespace csmpc
