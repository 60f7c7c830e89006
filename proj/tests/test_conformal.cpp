#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "csmpc/conformal.hpp"
#include "csmpc/scenario.hpp"
#include "oracles.hpp"

using namespace csmpc;
using csmpc::testing::as_double;
using csmpc::testing::brute_force_quantile;
using csmpc::testing::exact_quantile_index;
using csmpc::testing::Fraction;

TEST(QuantileIndex, MatchesExactRationalArithmetic) {
  // delta = 0.05 split over T in {1, 2, 4, 5, 10, 20}.
  for (std::uint64_t T : {1u, 2u, 4u, 5u, 10u, 20u}) {
    const Fraction f{1, 20 * T};
    for (std::size_t k = 1; k <= 2000; ++k) {
      EXPECT_EQ(quantile_index(k, f.value()), exact_quantile_index(k, f)) << "K=" << k << " T=" << T;
    }
  }
  for (std::uint64_t den : {3u, 7u, 10u, 100u, 1000u}) {
    const Fraction f{1, den};
    for (std::size_t k = 1; k <= 500; ++k) EXPECT_EQ(quantile_index(k, f.value()), exact_quantile_index(k, f));
  }
}

TEST(QuantileIndex, KnownValues) {
  // K = 500, delta = 0.05, T = 20: ceil(501 * 0.9975) = 500.
  EXPECT_EQ(quantile_index(500, 0.05 / 20), 500u);
  // K = 19, delta_bar = 0.05: (K+1)(1 - 0.05) = 19 exactly.
  EXPECT_EQ(quantile_index(19, 0.05), 19u);
  // Too few samples for the level: the sentinel is selected.
  EXPECT_EQ(quantile_index(10, 0.01), 11u);
  EXPECT_THROW(quantile_index(10, 0.0), std::invalid_argument);
  EXPECT_THROW(quantile_index(10, 1.0), std::invalid_argument);
}

TEST(ConformalQuantile, EqualsBruteForceIncludingSentinel) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> size(1, 60);
  std::uniform_int_distribution<int> level(0, 4);
  // Coarse values so that ties occur.
  std::uniform_int_distribution<int> value(0, 9);
  const double levels[] = {0.5, 0.2, 0.1, 0.05, 0.0025};
  int sentinel_cases = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> scores(static_cast<std::size_t>(size(rng)));
    for (double& s : scores) s = 0.25 * value(rng);
    const double db = levels[level(rng)];
    const RegionRadius got = conformal_quantile(scores, db);
    const double want = brute_force_quantile(scores, quantile_index(scores.size(), db));
    EXPECT_EQ(as_double(got), want);
    sentinel_cases += got.is_unbounded() ? 1 : 0;
  }
  EXPECT_GT(sentinel_cases, 0);
}

TEST(ConformalQuantile, PermutationInvariantAndInputUntouched) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<double> scores(200);
  for (double& s : scores) s = u(rng);
  const std::vector<double> copy = scores;
  const RegionRadius base = conformal_quantile(scores, 0.05);
  EXPECT_EQ(scores, copy);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(scores.begin(), scores.end(), rng);
    EXPECT_EQ(conformal_quantile(scores, 0.05), base);
  }
}

TEST(ConformalQuantile, MonotoneInLevel) {
  std::mt19937_64 rng(10);
  std::exponential_distribution<double> e(1.0);
  std::vector<double> scores(300);
  for (double& s : scores) s = e(rng);
  RegionRadius prev = conformal_quantile(scores, 0.9);
  for (double db = 0.85; db > 0.001; db -= 0.05) {
    const RegionRadius cur = conformal_quantile(scores, db);
    EXPECT_GE(cur, prev) << db;
    prev = cur;
  }
}

TEST(ConformalQuantile, RejectsBadScores) {
  const std::vector<double> empty;
  EXPECT_THROW(conformal_quantile(empty, 0.1), std::invalid_argument);
  const std::vector<double> negative{1.0, -0.5};
  EXPECT_THROW(conformal_quantile(negative, 0.1), std::invalid_argument);
}

TEST(RegionRadius, SentinelOrdersAboveAndCoversEverything) {
  const auto u = RegionRadius::unbounded();
  const auto b = RegionRadius::bounded(1e300);
  EXPECT_LT(b, u);
  EXPECT_GT(u, RegionRadius::bounded(0.0));
  EXPECT_EQ(u, RegionRadius::unbounded());
  EXPECT_TRUE(u.covers(1e308));
  EXPECT_TRUE(RegionRadius::bounded(1.0).covers(1.0));
  EXPECT_FALSE(RegionRadius::bounded(1.0).covers(1.0000001));
  EXPECT_THROW(u.radius(), std::logic_error);
  EXPECT_THROW(RegionRadius::bounded(-1.0), std::invalid_argument);
}

TEST(Score, JointNormAndPerAgentMax) {
  const JointState y{{Vec2{0.0, 0.0}, Vec2{1.0, 1.0}}};
  const JointState yh{{Vec2{3.0, 0.0}, Vec2{1.0, 5.0}}};
  EXPECT_DOUBLE_EQ(nonconformity_score(y, yh, ScoreMode::JointNorm), 5.0);
  EXPECT_DOUBLE_EQ(nonconformity_score(y, yh, ScoreMode::PerAgentMax), 4.0);
  const JointState short_state{{Vec2{}}};
  EXPECT_THROW(nonconformity_score(y, short_state, ScoreMode::JointNorm), std::invalid_argument);
}

TEST(Score, JointNormBoundsPerAgentMax) {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    JointState a, b;
    for (int j = 0; j < 3; ++j) {
      a.agents.push_back({n(rng), n(rng)});
      b.agents.push_back({n(rng), n(rng)});
    }
    EXPECT_GE(nonconformity_score(a, b, ScoreMode::JointNorm), nonconformity_score(a, b, ScoreMode::PerAgentMax));
  }
}

namespace {

struct Fixture {
  Dataset data = generate_dataset(ScenarioConfig{}, 0, 200, 200, 21);
  PredictorSpec cv = PredictorSpec::constant_velocity();
};

}  // namespace

TEST(Calibration, TableShapeAndQuantileIndex) {
  Fixture f;
  const CalibrationTable table = calibrate(f.data, f.cv, 0.05, 20, 5, ScoreMode::JointNorm);
  EXPECT_EQ(table.horizon(), 20);
  EXPECT_EQ(table.prediction_horizon(), 5);
  EXPECT_DOUBLE_EQ(table.delta_bar(), 0.0025);
  EXPECT_EQ(table.quantile_index(), quantile_index(200, 0.0025));
  EXPECT_EQ(table.k_val(), 200u);
  EXPECT_EQ(table.calibration_ids(), f.data.indices(Split::Val));
  EXPECT_TRUE(table.has(0, 5));
  EXPECT_FALSE(table.has(0, 6));
  EXPECT_TRUE(table.has(19, 20));
  EXPECT_FALSE(table.has(18, 21));
  EXPECT_FALSE(table.has(20, 21));
  EXPECT_THROW(table.region(3, 3), std::out_of_range);
}

TEST(Calibration, EntriesAreQuantilesOfCollectedScores) {
  Fixture f;
  const auto val = f.data.select(Split::Val);
  const ScoreTensor scores = collect_scores(val, f.cv, 20, 4, ScoreMode::PerAgentMax);
  const CalibrationTable table = calibrate_from_scores(scores, 0.1, ScoreMode::PerAgentMax);
  for (int t = 0; t < 20; ++t) {
    for (int tau = t + 1; tau <= std::min(t + 4, 20); ++tau) {
      const auto s = scores.scores(t, tau);
      const std::vector<double> v(s.begin(), s.end());
      EXPECT_EQ(as_double(table.region(t, tau)), brute_force_quantile(v, table.quantile_index()));
    }
  }
  // Spot-check one score against a direct prediction.
  const Trajectory& tr = val[7];
  const auto pred = predict(f.cv, tr.history_through(3), 3, 4, 20);
  EXPECT_EQ(scores.scores(3, 6)[7], nonconformity_score(tr.at(6), pred.at(6), ScoreMode::PerAgentMax));
}

TEST(Calibration, TooFewTrajectoriesGiveUnboundedRegions) {
  const Dataset d = generate_dataset(ScenarioConfig{}, 0, 20, 1, 3);
  const CalibrationTable table = calibrate(d, PredictorSpec::constant_velocity(), 0.05, 20, 20, ScoreMode::JointNorm);
  EXPECT_EQ(table.quantile_index(), 21u);
  EXPECT_TRUE(table.region(0, 1).is_unbounded());
}

TEST(Calibration, RejectsBadArguments) {
  Fixture f;
  EXPECT_THROW(calibrate(f.data, f.cv, 0.0, 20, 20, ScoreMode::JointNorm), ValidationError);
  EXPECT_THROW(calibrate(f.data, f.cv, 0.05, 20, 21, ScoreMode::JointNorm), ValidationError);
  EXPECT_THROW(calibrate(f.data, f.cv, 0.05, 21, 21, ScoreMode::JointNorm), ValidationError);
  EXPECT_THROW(calibrate(std::span<const Trajectory>(), f.cv, 0.05, 20, 20, ScoreMode::JointNorm), ValidationError);
}

TEST(WorstCase, PerLagMaximumIdempotentAndDominating) {
  Fixture f;
  const CalibrationTable table = calibrate(f.data, f.cv, 0.05, 20, 6, ScoreMode::JointNorm);
  const CalibrationTable wc = worst_case_over_time(table);
  EXPECT_EQ(worst_case_over_time(wc), wc);
  for (int k = 1; k <= 6; ++k) {
    RegionRadius m = RegionRadius::bounded(0.0);
    for (int t = 0; t + k <= 20; ++t) m = std::max(m, table.region(t, t + k));
    for (int t = 0; t + k <= 20; ++t) {
      EXPECT_GE(wc.region(t, t + k), table.region(t, t + k));
      EXPECT_EQ(wc.region(t, t + k), m);
    }
  }
}

TEST(WorstCase, SentinelPropagatesAlongItsLag) {
  CalibrationTable table(0.05, 4, 2, ScoreMode::JointNorm, 100);
  for (int t = 0; t < 4; ++t)
    for (int tau = t + 1; tau <= std::min(t + 2, 4); ++tau) table.set(t, tau, RegionRadius::bounded(0.1 * tau));
  table.set(2, 4, RegionRadius::unbounded());
  const CalibrationTable wc = worst_case_over_time(table);
  EXPECT_TRUE(wc.region(0, 2).is_unbounded());
  EXPECT_FALSE(wc.region(0, 1).is_unbounded());
  EXPECT_EQ(wc.region(0, 1), RegionRadius::bounded(0.4));
}

TEST(Coverage, JointRequiresFullHorizonTable) {
  Fixture f;
  const auto test = f.data.select(Split::Test);
  const CalibrationTable table = calibrate(f.data, f.cv, 0.05, 20, 5, ScoreMode::JointNorm);
  EXPECT_THROW(empirical_coverage(test, f.cv, table, CoverageKind::JointFromZero), ValidationError);
  EXPECT_NO_THROW(empirical_coverage(test, f.cv, table, CoverageKind::OneStep));
}

TEST(Coverage, ReportIsConsistent) {
  Fixture f;
  const auto test = f.data.select(Split::Test);
  const CalibrationTable table = calibrate(f.data, f.cv, 0.2, 20, 20, ScoreMode::JointNorm);
  for (CoverageKind kind : {CoverageKind::JointFromZero, CoverageKind::OneStep}) {
    const CoverageReport r = empirical_coverage(test, f.cv, table, kind);
    ASSERT_EQ(r.passes.size(), test.size());
    const auto passed = static_cast<std::size_t>(std::count(r.passes.begin(), r.passes.end(), true));
    EXPECT_EQ(passed + r.failures.size(), test.size());
    EXPECT_DOUBLE_EQ(r.rate, static_cast<double>(passed) / test.size());
    for (std::size_t i : r.failures) EXPECT_FALSE(r.passes[i]);
  }
}

TEST(Coverage, ZeroErrorOracleIsAlwaysCovered) {
  Fixture f;
  const auto oracle = PredictorSpec::noisy_oracle();
  // K = 200 needs delta_bar >= 1/201 for a bounded region.
  const CalibrationTable table = calibrate(f.data, oracle, 0.2, 20, 20, ScoreMode::JointNorm);
  EXPECT_EQ(table.region(0, 20), RegionRadius::bounded(0.0));
  const auto test = f.data.select(Split::Test);
  EXPECT_EQ(empirical_coverage(test, oracle, table, CoverageKind::JointFromZero).rate, 1.0);
}

TEST(Names, StringRoundTrips) {
  for (auto m : {ScoreMode::JointNorm, ScoreMode::PerAgentMax}) EXPECT_EQ(score_mode_from_string(to_string(m)), m);
  for (auto k : {CoverageKind::JointFromZero, CoverageKind::OneStep})
    EXPECT_EQ(coverage_kind_from_string(to_string(k)), k);
  EXPECT_THROW(score_mode_from_string("l1"), ValidationError);
  EXPECT_THROW(coverage_kind_from_string("pointwise"), ValidationError);
}
