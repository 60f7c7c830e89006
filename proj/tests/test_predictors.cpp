#include <gtest/gtest.h>

#include <random>

#include "csmpc/predictors.hpp"
#include "csmpc/scenario.hpp"

using namespace csmpc;

namespace {

JointState one(Vec2 p) { return JointState{{p}}; }

// Agents driven by a fixed AR(2) displacement map with random initial
// displacements; no noise, so the generating coefficients are recoverable.
std::vector<Trajectory> ar2_data(const std::vector<double>& coef, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<Trajectory> out;
  for (int i = 0; i < count; ++i) {
    std::vector<JointState> states;
    const std::size_t agents = 2;
    std::vector<Vec2> p(agents), d1(agents), d2(agents);
    for (std::size_t j = 0; j < agents; ++j) {
      p[j] = {n01(rng), n01(rng)};
      d1[j] = {0.1 * n01(rng), 0.1 * n01(rng)};
      d2[j] = {0.1 * n01(rng), 0.1 * n01(rng)};
    }
    for (int k = 0; k < 12; ++k) {
      JointState js;
      for (std::size_t j = 0; j < agents; ++j) {
        const Vec2 d{coef[0] * d1[j].x + coef[1] * d1[j].y + coef[4] * d2[j].x + coef[5] * d2[j].y,
                     coef[2] * d1[j].x + coef[3] * d1[j].y + coef[6] * d2[j].x + coef[7] * d2[j].y};
        p[j] = p[j] + d;
        d2[j] = d1[j];
        d1[j] = d;
        js.agents.push_back(p[j]);
      }
      states.push_back(js);
    }
    out.emplace_back(std::move(states), 4);
  }
  return out;
}

}  // namespace

TEST(ConstantVelocity, ExtrapolatesLinearly) {
  const std::vector<JointState> hist{one({0.0, 0.0}), one({1.0, 0.0})};
  const PredictionSet p = predict(PredictorSpec::constant_velocity(), hist, 0, 2, 10);
  ASSERT_EQ(p.values.size(), 2u);
  EXPECT_EQ(p.at(1)[0], (Vec2{2.0, 0.0}));
  EXPECT_EQ(p.at(2)[0], (Vec2{3.0, 0.0}));
  EXPECT_EQ(p.first(), 1);
  EXPECT_EQ(p.last(), 2);
  EXPECT_THROW(p.at(3), std::out_of_range);
}

TEST(Predict, WindowStopsAtTaskHorizon) {
  const std::vector<JointState> hist{one({0.0, 0.0}), one({1.0, 1.0})};
  const PredictionSet p = predict(PredictorSpec::constant_velocity(), hist, 8, 5, 10);
  EXPECT_EQ(p.first(), 9);
  EXPECT_EQ(p.last(), 10);
}

TEST(Predict, TooShortHistoryIsRejected) {
  const std::vector<JointState> hist{one({0.0, 0.0})};
  EXPECT_THROW(predict(PredictorSpec::constant_velocity(), hist, 0, 1, 5), ValidationError);
  PredictorSpec ar;
  ar.kind = PredictorKind::Autoregressive;
  ar.order = 3;
  ar.coefficients.assign(12, 0.0);
  EXPECT_EQ(ar.required_history(), 4u);
  const std::vector<JointState> three(3, one({0.0, 0.0}));
  EXPECT_THROW(predict(ar, three, 0, 1, 5), ValidationError);
}

TEST(Predict, RecursionConsistency) {
  const Dataset d = generate_dataset(ScenarioConfig{}, 20, 5, 1, 4);
  const PredictorSpec ar = fit_autoregressive(d.select(Split::Train), 3);
  for (const PredictorSpec& spec : {PredictorSpec::constant_velocity(), ar}) {
    for (const Trajectory& tr : d.select(Split::Val)) {
      for (int t : {0, 3, 10}) {
        const auto long_run = predict(spec, tr.history_through(t), t, 5, tr.horizon());
        const auto short_run = predict(spec, tr.history_through(t), t, 1, tr.horizon());
        EXPECT_EQ(long_run.at(t + 1), short_run.at(t + 1));
      }
    }
  }
}

TEST(Autoregressive, IdentityLagOneIsConstantVelocity) {
  PredictorSpec ar;
  ar.kind = PredictorKind::Autoregressive;
  ar.order = 1;
  ar.coefficients = {1.0, 0.0, 0.0, 1.0};
  const std::vector<JointState> hist{one({0.5, -1.0}), one({1.0, -0.5}), one({1.25, 0.5})};
  const auto a = predict(ar, hist, 0, 6, 6);
  const auto b = predict(PredictorSpec::constant_velocity(), hist, 0, 6, 6);
  EXPECT_EQ(a.values, b.values);
}

TEST(Autoregressive, RecoversGeneratingCoefficients) {
  const std::vector<double> truth{0.6, 0.1, -0.2, 0.5, 0.3, 0.0, 0.1, 0.2};
  const auto data = ar2_data(truth, 30, 17);
  const PredictorSpec fit = fit_autoregressive(data, 2);
  EXPECT_FALSE(fit.min_norm_fallback);
  ASSERT_EQ(fit.coefficients.size(), truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) EXPECT_NEAR(fit.coefficients[i], truth[i], 1e-9) << i;
}

TEST(Autoregressive, StationaryAgentsFallBackToMinimumNorm) {
  std::vector<JointState> still(8, JointState{{Vec2{1.0, 2.0}, Vec2{-3.0, 0.5}}});
  const std::vector<Trajectory> data{Trajectory(still, 3)};
  const PredictorSpec fit = fit_autoregressive(data, 2);
  EXPECT_TRUE(fit.min_norm_fallback);
  for (double c : fit.coefficients) EXPECT_EQ(c, 0.0);
}

TEST(Autoregressive, RejectsBadOrder) {
  const auto data = ar2_data({1, 0, 0, 1, 0, 0, 0, 0}, 2, 1);
  EXPECT_THROW(fit_autoregressive(data, 0), ValidationError);
  EXPECT_THROW(fit_autoregressive({}, 1), ValidationError);
  PredictorSpec bad;
  bad.kind = PredictorKind::Autoregressive;
  bad.order = 2;
  bad.coefficients = {1.0};
  EXPECT_THROW(validate(bad), ValidationError);
}

TEST(NoisyOracle, AddsScheduledOffsetsToTruth) {
  const Dataset d = generate_dataset(ScenarioConfig{}, 0, 1, 1, 2);
  const Trajectory& tr = d.trajectories[0];
  const auto hist = tr.history_through(2);

  const auto exact = predict(PredictorSpec::noisy_oracle(), hist, 2, 4, tr.horizon(), &tr);
  for (int tau = 3; tau <= 6; ++tau) EXPECT_EQ(exact.at(tau), tr.at(tau));

  // Step 1 broadcast, step 2 per agent, later steps reuse step 2.
  const std::vector<std::vector<Vec2>> errors{{Vec2{0.1, 0.0}}, {Vec2{0.0, 1.0}, Vec2{0.0, 2.0}, Vec2{0.0, 3.0}}};
  const auto noisy = predict(PredictorSpec::noisy_oracle(errors), hist, 2, 4, tr.horizon(), &tr);
  for (std::size_t j = 0; j < 3; ++j) {
    EXPECT_EQ(noisy.at(3)[j], tr.at(3)[j] + (Vec2{0.1, 0.0}));
    EXPECT_EQ(noisy.at(4)[j], tr.at(4)[j] + (Vec2{0.0, 1.0 + static_cast<double>(j)}));
    EXPECT_EQ(noisy.at(6)[j], tr.at(6)[j] + (Vec2{0.0, 1.0 + static_cast<double>(j)}));
  }
  EXPECT_THROW(predict(PredictorSpec::noisy_oracle(), hist, 2, 4, tr.horizon()), ValidationError);
}

TEST(PredictorKind, StringRoundTrip) {
  for (auto k : {PredictorKind::ConstantVelocity, PredictorKind::Autoregressive, PredictorKind::NoisyOracle}) {
    EXPECT_EQ(predictor_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(predictor_kind_from_string("ar"), PredictorKind::Autoregressive);
  EXPECT_THROW(predictor_kind_from_string("lstm"), ValidationError);
}
