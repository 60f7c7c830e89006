#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "csmpc/core.hpp"

using namespace csmpc;

namespace {

Trajectory line_trajectory(int h, int T, std::size_t agents, double offset = 0.0) {
  std::vector<JointState> states;
  for (int k = -h; k <= T; ++k) {
    JointState js;
    for (std::size_t j = 0; j < agents; ++j) js.agents.push_back({k + offset, static_cast<double>(j)});
    states.push_back(js);
  }
  return Trajectory(std::move(states), h);
}

Dataset small_dataset() {
  Dataset d;
  d.scenario.history_len = 2;
  d.scenario.horizon = 3;
  d.trajectories = {line_trajectory(2, 3, 2), line_trajectory(2, 3, 2, 1.0), line_trajectory(2, 3, 2, 2.0)};
  d.splits = {Split::Train, Split::Val, Split::Test};
  return d;
}

}  // namespace

TEST(Vec2, ArithmeticAndNorm) {
  const Vec2 a{3.0, 4.0};
  const Vec2 b{1.0, -1.0};
  EXPECT_EQ(a + b, (Vec2{4.0, 3.0}));
  EXPECT_EQ(a - b, (Vec2{2.0, 5.0}));
  EXPECT_EQ(2.0 * b, (Vec2{2.0, -2.0}));
  EXPECT_DOUBLE_EQ(a.norm(), 5.0);
  EXPECT_DOUBLE_EQ(a.squared_norm(), 25.0);
  EXPECT_DOUBLE_EQ(distance(a, b), std::hypot(2.0, 5.0));
  EXPECT_FALSE((Vec2{std::numeric_limits<double>::quiet_NaN(), 0.0}).finite());
}

TEST(Trajectory, IndexesFromMinusHistoryToHorizon) {
  const Trajectory tr = line_trajectory(3, 5, 2);
  EXPECT_EQ(tr.history_len(), 3);
  EXPECT_EQ(tr.horizon(), 5);
  EXPECT_EQ(tr.agent_count(), 2u);
  EXPECT_DOUBLE_EQ(tr.at(-3)[0].x, -3.0);
  EXPECT_DOUBLE_EQ(tr.at(0)[0].x, 0.0);
  EXPECT_DOUBLE_EQ(tr.at(5)[1].x, 5.0);
  EXPECT_THROW(tr.at(-4), std::out_of_range);
  EXPECT_THROW(tr.at(6), std::out_of_range);
}

TEST(Trajectory, HistoryThroughEndsAtT) {
  const Trajectory tr = line_trajectory(2, 4, 1);
  const auto hist = tr.history_through(1);
  ASSERT_EQ(hist.size(), 4u);
  EXPECT_DOUBLE_EQ(hist.front()[0].x, -2.0);
  EXPECT_DOUBLE_EQ(hist.back()[0].x, 1.0);
}

TEST(Trajectory, RejectsTooFewStates) {
  std::vector<JointState> states(3, JointState{{Vec2{}}});
  EXPECT_THROW(Trajectory(states, 2), ValidationError);
  EXPECT_NO_THROW(Trajectory(states, 1));
}

TEST(Split, StringRoundTrip) {
  for (Split s : {Split::Train, Split::Val, Split::Test}) EXPECT_EQ(split_from_string(to_string(s)), s);
  EXPECT_THROW(split_from_string("holdout"), ValidationError);
}

TEST(ScenarioConfig, DefaultsValidate) { EXPECT_NO_THROW(validate(ScenarioConfig{})); }

TEST(ScenarioConfig, ErrorsNameTheField) {
  auto message_for = [](auto mutate) {
    ScenarioConfig c;
    mutate(c);
    try {
      validate(c);
    } catch (const ValidationError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message_for([](ScenarioConfig& c) { c.agent_count = 0; }).find("agent_count"), std::string::npos);
  EXPECT_NE(message_for([](ScenarioConfig& c) { c.dt = 0.0; }).find("dt"), std::string::npos);
  EXPECT_NE(message_for([](ScenarioConfig& c) { c.speed_min = 2.0; }).find("speed"), std::string::npos);
  EXPECT_NE(message_for([](ScenarioConfig& c) { c.noise_scale = -1.0; }).find("noise_scale"), std::string::npos);
  EXPECT_NE(message_for([](ScenarioConfig& c) { c.workspace.max.x = c.workspace.min.x; }).find("workspace"),
            std::string::npos);
}

TEST(Dataset, IndicesAndSelect) {
  const Dataset d = small_dataset();
  EXPECT_EQ(d.count(Split::Val), 1u);
  EXPECT_EQ(d.indices(Split::Test), (std::vector<std::size_t>{2}));
  ASSERT_EQ(d.select(Split::Val).size(), 1u);
  EXPECT_EQ(d.select(Split::Val).front(), d.trajectories[1]);
}

TEST(Dataset, WellFormedHasNoViolations) { EXPECT_TRUE(validate_dataset(small_dataset()).empty()); }

TEST(Dataset, EmptyTrainSplitIsAllowed) {
  Dataset d = small_dataset();
  d.splits[0] = Split::Val;
  EXPECT_TRUE(validate_dataset(d).empty());
}

TEST(Dataset, AgentCountMismatchNamesTrajectory) {
  Dataset d = small_dataset();
  d.trajectories[2] = line_trajectory(2, 3, 3);
  const auto v = validate_dataset(d);
  ASSERT_FALSE(v.empty());
  EXPECT_NE(v.front().find("trajectory 2"), std::string::npos);
  EXPECT_NE(v.front().find("agent-count"), std::string::npos);
}

TEST(Dataset, NonFiniteCoordinateNamesTrajectory) {
  Dataset d = small_dataset();
  auto states = d.trajectories[1].states();
  states[3][0].y = std::numeric_limits<double>::infinity();
  d.trajectories[1] = Trajectory(states, 2);
  const auto v = validate_dataset(d);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v.front().find("trajectory 1"), std::string::npos);
  EXPECT_NE(v.front().find("non-finite"), std::string::npos);
}

TEST(Dataset, EmptyValidationOrTestSplitIsReported) {
  Dataset d = small_dataset();
  d.splits = {Split::Train, Split::Train, Split::Test};
  EXPECT_FALSE(validate_dataset(d).empty());
  d.splits = {Split::Train, Split::Val, Split::Val};
  EXPECT_FALSE(validate_dataset(d).empty());
}
