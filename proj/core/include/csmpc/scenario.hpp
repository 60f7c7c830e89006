#pragma once

// Synthetic goal-directed pedestrian generator. Every trajectory is drawn from
// its own random stream derived from (seed, split, index), so trajectories are
// i.i.d. given the configuration and datasets can grow without perturbing
// earlier draws.

#include <cstdint>
#include <random>
#include <vector>

#include "csmpc/core.hpp"

namespace csmpc {

using Rng = std::mt19937_64;

struct AgentScript {
  Vec2 start;
  Vec2 goal;
  double speed = 0.0;        // m/s
  double noise_scale = 0.0;  // per-step displacement std, m
};

/// Child stream for trajectory `index` of `split`.
Rng trajectory_stream(std::uint64_t seed, Split split, std::uint64_t index);

AgentScript sample_agent_script(const ScenarioConfig& cfg, Rng& rng);

/// Positions p_0..p_{steps}: move toward the goal at the scripted speed plus
/// isotropic Gaussian noise; nominal motion stops once the goal is reached.
std::vector<AgentState> walk_agent(const AgentScript& script, int steps, double dt, Rng& rng);

/// One trajectory of length h + T + 1. Redraws (from the same stream) while an
/// agent sits within robot_clearance of the robot start at t = 0.
Trajectory sample_trajectory(const ScenarioConfig& cfg, Rng& rng);

Dataset generate_dataset(const ScenarioConfig& cfg, std::size_t k_train, std::size_t k_val,
                         std::size_t k_test, std::uint64_t seed);

}  // namespace csmpc
