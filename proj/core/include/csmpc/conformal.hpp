#pragma once

// Split-conformal calibration of multi-step prediction regions.
//
// For each pair (t, tau) the region radius C_{tau|t} is the p-th smallest
// nonconformity score over the K validation trajectories, with an unbounded
// (K+1)-th score appended and p = ceil((K + 1)(1 - delta / T)). A union bound
// over the T steps then gives joint coverage 1 - delta.

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "csmpc/core.hpp"
#include "csmpc/predictors.hpp"

namespace csmpc {

enum class ScoreMode { JointNorm, PerAgentMax };

std::string_view to_string(ScoreMode m);
ScoreMode score_mode_from_string(std::string_view s);

/// Radius of a prediction region, or the unbounded sentinel. There is no
/// arithmetic on this type; radius() refuses to hand out the sentinel.
class RegionRadius {
 public:
  static RegionRadius bounded(double r);
  static RegionRadius unbounded() { return RegionRadius(); }

  bool is_unbounded() const { return !radius_.has_value(); }
  /// Throws std::logic_error on the sentinel.
  double radius() const;
  /// score <= C; the sentinel covers every score.
  bool covers(double score) const { return is_unbounded() || score <= *radius_; }

  friend bool operator==(const RegionRadius&, const RegionRadius&) = default;
  /// Total order with the sentinel above every finite radius.
  friend std::partial_ordering operator<=>(const RegionRadius& a, const RegionRadius& b);

 private:
  RegionRadius() = default;
  std::optional<double> radius_;
};

double nonconformity_score(const JointState& y, const JointState& y_hat, ScoreMode mode);

/// p = ceil((K + 1)(1 - delta_bar)), 1-based, in [1, K + 1]. Products within
/// 1e-9 of an integer are snapped so that decimal inputs such as 0.05 behave
/// as their exact values.
std::size_t quantile_index(std::size_t k, double delta_bar);

/// p-th smallest of `scores` with +inf appended. `scores` is not modified.
RegionRadius conformal_quantile(std::span<const double> scores, double delta_bar);

/// Nonconformity scores R^{(i)}_{tau|t} for t in [0, T), tau in (t, min(t+H, T)].
class ScoreTensor {
 public:
  ScoreTensor(int horizon, int prediction_horizon, std::size_t samples);

  int horizon() const { return horizon_; }
  int prediction_horizon() const { return prediction_horizon_; }
  std::size_t samples() const { return samples_; }
  bool has(int t, int tau) const;
  std::span<const double> scores(int t, int tau) const;
  double& at(int t, int tau, std::size_t i);

 private:
  std::size_t offset(int t, int tau) const;

  int horizon_;
  int prediction_horizon_;
  std::size_t samples_;
  std::vector<double> data_;
};

/// Scores every (t, tau) pair on every trajectory. Trajectories must cover
/// indices -h..T.
ScoreTensor collect_scores(std::span<const Trajectory> trajs, const PredictorSpec& spec, int T,
                           int H, ScoreMode mode);

class CalibrationTable {
 public:
  CalibrationTable(double delta, int horizon, int prediction_horizon, ScoreMode mode,
                   std::size_t k_val);

  double delta() const { return delta_; }
  /// T of the union bound and the last calibrated time index.
  int horizon() const { return horizon_; }
  int prediction_horizon() const { return prediction_horizon_; }
  double delta_bar() const { return delta_ / horizon_; }
  std::size_t quantile_index() const { return p_; }
  ScoreMode mode() const { return mode_; }
  std::size_t k_val() const { return k_val_; }

  bool has(int t, int tau) const;
  /// Throws std::out_of_range for pairs outside the table.
  const RegionRadius& region(int t, int tau) const;
  void set(int t, int tau, RegionRadius c);

  /// Dataset positions of the calibration trajectories (split hygiene checks).
  const std::vector<std::size_t>& calibration_ids() const { return calibration_ids_; }
  void set_calibration_ids(std::vector<std::size_t> ids) { calibration_ids_ = std::move(ids); }

  friend bool operator==(const CalibrationTable&, const CalibrationTable&) = default;

 private:
  std::size_t offset(int t, int tau) const;

  double delta_;
  int horizon_;
  int prediction_horizon_;
  ScoreMode mode_;
  std::size_t k_val_;
  std::size_t p_;
  std::vector<RegionRadius> regions_;
  std::vector<std::size_t> calibration_ids_;
};

/// Region table from already collected scores, delta_bar = delta / T.
CalibrationTable calibrate_from_scores(const ScoreTensor& scores, double delta, ScoreMode mode);

CalibrationTable calibrate(std::span<const Trajectory> val, const PredictorSpec& spec,
                           double delta, int T, int H, ScoreMode mode);

/// Calibrates on the validation split of `data` and records its positions.
CalibrationTable calibrate(const Dataset& data, const PredictorSpec& spec, double delta, int T,
                           int H, ScoreMode mode);

/// Replaces each C_{t+k|t} by max over t' of C_{t'+k|t'} (per lag k).
CalibrationTable worst_case_over_time(const CalibrationTable& table);

enum class CoverageKind { JointFromZero, OneStep };

std::string_view to_string(CoverageKind k);
CoverageKind coverage_kind_from_string(std::string_view s);

struct CoverageReport {
  CoverageKind kind = CoverageKind::JointFromZero;
  double rate = 0.0;
  std::vector<bool> passes;
  std::vector<std::size_t> failures;  // positions into the audited trajectory list
};

CoverageReport empirical_coverage(std::span<const Trajectory> test, const PredictorSpec& spec,
                                  const CalibrationTable& table, CoverageKind kind);

}  // namespace csmpc
