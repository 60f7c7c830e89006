#include "csmpc/scenario.hpp"

#include <array>

#include "csmpc/parallel.hpp"

namespace csmpc {
namespace {

constexpr int kMaxRedraws = 10000;

Box spawn_box(const ScenarioConfig& cfg) {
  const double m = cfg.spawn_margin;
  Box b{{cfg.workspace.min.x + m, cfg.workspace.min.y + m},
        {cfg.workspace.max.x - m, cfg.workspace.max.y - m}};
  if (!(b.max.x >= b.min.x) || !(b.max.y >= b.min.y)) {
    throw ValidationError("scenario.spawn_margin leaves no room for agent start/goal sampling");
  }
  if (cfg.crossing && 2.0 * cfg.band_depth > b.max.y - b.min.y) {
    throw ValidationError("scenario.band_depth: start and goal bands overlap");
  }
  return b;
}

std::uint32_t split_code(Split s) {
  switch (s) {
    case Split::Train: return 1;
    case Split::Val: return 2;
    case Split::Test: return 3;
  }
  return 0;
}

}  // namespace

Rng trajectory_stream(std::uint64_t seed, Split split, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    split_code(split), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

AgentScript sample_agent_script(const ScenarioConfig& cfg, Rng& rng) {
  const Box b = spawn_box(cfg);
  std::uniform_real_distribution<double> ux(b.min.x, b.max.x);
  std::uniform_real_distribution<double> uy(b.min.y, b.max.y);
  std::uniform_real_distribution<double> us(cfg.speed_min, cfg.speed_max);
  AgentScript s;
  if (cfg.crossing) {
    std::uniform_real_distribution<double> band(0.0, cfg.band_depth);
    const bool from_top = std::bernoulli_distribution(0.5)(rng);
    const double top = b.max.y - band(rng);
    const double bottom = b.min.y + band(rng);
    s.start = {ux(rng), from_top ? top : bottom};
    s.goal = {ux(rng), from_top ? bottom : top};
  } else {
    s.start = {ux(rng), uy(rng)};
    s.goal = {ux(rng), uy(rng)};
  }
  s.speed = cfg.speed_max > cfg.speed_min ? us(rng) : cfg.speed_min;
  s.noise_scale = cfg.noise_scale;
  return s;
}

std::vector<AgentState> walk_agent(const AgentScript& script, int steps, double dt, Rng& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<AgentState> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  Vec2 p = script.start;
  Vec2 nominal = script.start;  // noiseless reference used to decide arrival
  bool arrived = false;
  out.push_back(p);
  const double step_len = script.speed * dt;
  for (int k = 0; k < steps; ++k) {
    Vec2 d{0.0, 0.0};
    if (!arrived) {
      const Vec2 to_goal = script.goal - nominal;
      const double dist = to_goal.norm();
      if (dist <= step_len) {
        d = to_goal;
        arrived = true;
      } else {
        d = (step_len / dist) * to_goal;
      }
      nominal = nominal + d;
    }
    const double nx = noise(rng);
    const double ny = noise(rng);
    p = p + d + Vec2{script.noise_scale * nx, script.noise_scale * ny};
    out.push_back(p);
  }
  return out;
}

Trajectory sample_trajectory(const ScenarioConfig& cfg, Rng& rng) {
  validate(cfg);
  spawn_box(cfg);
  const int len = cfg.history_len + cfg.horizon + 1;
  const auto n = static_cast<std::size_t>(cfg.agent_count);
  for (int attempt = 0; attempt < kMaxRedraws; ++attempt) {
    std::vector<JointState> states(static_cast<std::size_t>(len), JointState{std::vector<AgentState>(n)});
    for (std::size_t j = 0; j < n; ++j) {
      const AgentScript script = sample_agent_script(cfg, rng);
      const auto path = walk_agent(script, len - 1, cfg.dt, rng);
      for (std::size_t k = 0; k < path.size(); ++k) states[k][j] = path[k];
    }
    bool clear = true;
    if (cfg.robot_clearance > 0.0) {
      for (const AgentState& a : states[static_cast<std::size_t>(cfg.history_len)].agents) {
        if (distance(a, cfg.robot_start) < cfg.robot_clearance) clear = false;
      }
    }
    if (clear) return Trajectory(std::move(states), cfg.history_len);
  }
  throw ValidationError("scenario.robot_clearance rejects every sampled trajectory");
}

Dataset generate_dataset(const ScenarioConfig& cfg, std::size_t k_train, std::size_t k_val,
                         std::size_t k_test, std::uint64_t seed) {
  validate(cfg);
  spawn_box(cfg);
  if (k_val < 1 || k_test < 1) throw ValidationError("validation and test counts must be >= 1");
  Dataset d;
  d.seed = seed;
  d.scenario = cfg;
  const std::array<std::pair<Split, std::size_t>, 3> plan{
      {{Split::Train, k_train}, {Split::Val, k_val}, {Split::Test, k_test}}};
  for (const auto& [split, count] : plan) {
    for (std::size_t i = 0; i < count; ++i) d.splits.push_back(split);
  }
  d.trajectories.resize(d.splits.size());
  std::vector<std::pair<Split, std::size_t>> keys;
  for (const auto& [split, count] : plan) {
    for (std::size_t i = 0; i < count; ++i) keys.emplace_back(split, i);
  }
  parallel_for(keys.size(), [&](std::size_t pos) {
    Rng rng = trajectory_stream(seed, keys[pos].first, keys[pos].second);
    d.trajectories[pos] = sample_trajectory(cfg, rng);
  });
  return d;
}

}  // namespace csmpc
