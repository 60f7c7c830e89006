#include <gtest/gtest.h>

#include <cmath>

#include "csmpc/scenario.hpp"

using namespace csmpc;

TEST(Generator, SameSeedSameDataset) {
  const ScenarioConfig cfg;
  EXPECT_EQ(generate_dataset(cfg, 3, 4, 5, 11), generate_dataset(cfg, 3, 4, 5, 11));
  EXPECT_NE(generate_dataset(cfg, 3, 4, 5, 11), generate_dataset(cfg, 3, 4, 5, 12));
}

TEST(Generator, SplitSizes) {
  const Dataset d = generate_dataset(ScenarioConfig{}, 0, 500, 500, 7);
  EXPECT_EQ(d.trajectories.size(), 1000u);
  EXPECT_EQ(d.count(Split::Train), 0u);
  EXPECT_EQ(d.count(Split::Val), 500u);
  EXPECT_EQ(d.count(Split::Test), 500u);
  EXPECT_TRUE(validate_dataset(d).empty());
}

TEST(Generator, RequiresValidationAndTestTrajectories) {
  EXPECT_THROW(generate_dataset(ScenarioConfig{}, 1, 0, 1, 0), ValidationError);
  EXPECT_THROW(generate_dataset(ScenarioConfig{}, 1, 1, 0, 0), ValidationError);
}

TEST(Generator, GrowingASplitKeepsEarlierDraws) {
  const ScenarioConfig cfg;
  const Dataset small = generate_dataset(cfg, 0, 2, 1, 7);
  const Dataset large = generate_dataset(cfg, 0, 5, 1, 7);
  const auto a = small.select(Split::Val);
  const auto b = large.select(Split::Val);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]) << "index " << i;
}

TEST(Generator, TrajectoryComesFromItsIndexStream) {
  const ScenarioConfig cfg;
  const Dataset d = generate_dataset(cfg, 2, 3, 2, 99);
  const auto test_ids = d.indices(Split::Test);
  for (std::size_t i = 0; i < test_ids.size(); ++i) {
    Rng rng = trajectory_stream(99, Split::Test, i);
    EXPECT_EQ(sample_trajectory(cfg, rng), d.trajectories[test_ids[i]]);
  }
}

TEST(Generator, ShapeMatchesConfig) {
  ScenarioConfig cfg;
  cfg.agent_count = 4;
  cfg.history_len = 5;
  cfg.horizon = 7;
  const Dataset d = generate_dataset(cfg, 1, 1, 1, 3);
  for (const Trajectory& tr : d.trajectories) {
    EXPECT_EQ(tr.agent_count(), 4u);
    EXPECT_EQ(tr.history_len(), 5);
    EXPECT_EQ(tr.horizon(), 7);
  }
}

TEST(Generator, RobotStartIsClearAtTimeZero) {
  const ScenarioConfig cfg;
  const Dataset d = generate_dataset(cfg, 0, 100, 100, 5);
  for (const Trajectory& tr : d.trajectories) {
    for (const AgentState& a : tr.at(0).agents) EXPECT_GE(distance(a, cfg.robot_start), cfg.robot_clearance);
  }
}

TEST(Walker, NoiselessPathIsEvenlySpacedOnTheSegment) {
  AgentScript s;
  s.start = {0.0, 0.0};
  s.goal = {3.0, 4.0};
  s.speed = 1.0;
  s.noise_scale = 0.0;
  Rng rng(1);
  const double dt = 0.5;
  const auto path = walk_agent(s, 14, dt, rng);
  ASSERT_EQ(path.size(), 15u);
  for (std::size_t k = 0; k < path.size(); ++k) {
    const Vec2 p = path[k];
    // On the segment: collinear with start and goal, within its extent.
    EXPECT_NEAR(p.x * 4.0 - p.y * 3.0, 0.0, 1e-12);
    EXPECT_LE(p.norm(), 5.0 + 1e-12);
    if (k > 0 && k <= 10) EXPECT_NEAR(distance(p, path[k - 1]), dt * s.speed, 1e-12);
  }
  // Arrival after 10 steps of 0.5 m, then nominal motion stops.
  EXPECT_NEAR(distance(path[10], s.goal), 0.0, 1e-12);
  for (std::size_t k = 11; k < path.size(); ++k) EXPECT_NEAR(distance(path[k], s.goal), 0.0, 1e-12);
}

TEST(Walker, FirstStepNoiseHasConfiguredSpread) {
  AgentScript s;
  s.start = {0.0, 0.0};
  s.goal = {100.0, 0.0};
  s.speed = 1.0;
  s.noise_scale = 0.05;
  const double dt = 0.125;
  const int n = 10000;
  double sx = 0.0, sxx = 0.0, sy = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    Rng rng = trajectory_stream(2024, Split::Train, static_cast<std::uint64_t>(i));
    const auto path = walk_agent(s, 1, dt, rng);
    const double ex = path[1].x - dt * s.speed;
    const double ey = path[1].y;
    sx += ex;
    sxx += ex * ex;
    sy += ey;
    syy += ey * ey;
  }
  const double vx = (sxx - sx * sx / n) / (n - 1);
  const double vy = (syy - sy * sy / n) / (n - 1);
  EXPECT_NEAR(std::sqrt(vx), s.noise_scale, 0.03 * s.noise_scale);
  EXPECT_NEAR(std::sqrt(vy), s.noise_scale, 0.03 * s.noise_scale);
}

TEST(Generator, NoiselessAgentsStayInsideWorkspace) {
  for (bool crossing : {true, false}) {
    ScenarioConfig cfg;
    cfg.noise_scale = 0.0;
    cfg.crossing = crossing;
    const Dataset d = generate_dataset(cfg, 0, 200, 1, 8);
    for (const Trajectory& tr : d.trajectories) {
      for (const JointState& js : tr.states()) {
        for (const AgentState& a : js.agents) EXPECT_TRUE(cfg.workspace.contains(a));
      }
    }
  }
}

TEST(Generator, CrossingAgentsStartAndFinishInOppositeBands) {
  const ScenarioConfig cfg;
  Rng rng(3);
  const double top = cfg.workspace.max.y - cfg.spawn_margin;
  const double bottom = cfg.workspace.min.y + cfg.spawn_margin;
  for (int i = 0; i < 1000; ++i) {
    const AgentScript s = sample_agent_script(cfg, rng);
    const bool from_top = s.start.y >= top - cfg.band_depth;
    const double goal_band_edge = from_top ? bottom : top;
    EXPECT_LE(std::abs(s.goal.y - goal_band_edge), cfg.band_depth);
    EXPECT_LE(std::abs(s.start.y - (from_top ? top : bottom)), cfg.band_depth);
    EXPECT_GE(s.speed, cfg.speed_min);
    EXPECT_LE(s.speed, cfg.speed_max);
  }
}

TEST(Generator, RejectsWorkspaceWithoutRoomForSpawning) {
  ScenarioConfig cfg;
  cfg.spawn_margin = 10.0;
  EXPECT_THROW(generate_dataset(cfg, 0, 1, 1, 0), ValidationError);
  cfg = ScenarioConfig{};
  cfg.band_depth = 5.0;
  EXPECT_THROW(generate_dataset(cfg, 0, 1, 1, 0), ValidationError);
}

TEST(Generator, ImpossibleClearanceIsReported) {
  ScenarioConfig cfg;
  cfg.robot_clearance = 100.0;
  EXPECT_THROW(generate_dataset(cfg, 0, 1, 1, 0), ValidationError);
}
