#include "csmpc/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "csmpc/parallel.hpp"

namespace csmpc {

std::string_view to_string(ScoreMode m) {
  return m == ScoreMode::JointNorm ? "joint" : "agentmax";
}

ScoreMode score_mode_from_string(std::string_view s) {
  if (s == "joint" || s == "joint-norm") return ScoreMode::JointNorm;
  if (s == "agentmax" || s == "per-agent-max") return ScoreMode::PerAgentMax;
  throw ValidationError("unknown score mode '" + std::string(s) + "' (expected joint|agentmax)");
}

RegionRadius RegionRadius::bounded(double r) {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    throw std::invalid_argument("region radius must be finite and nonnegative");
  }
  RegionRadius c;
  c.radius_ = r;
  return c;
}

double RegionRadius::radius() const {
  if (!radius_) throw std::logic_error("unbounded prediction region has no radius");
  return *radius_;
}

std::partial_ordering operator<=>(const RegionRadius& a, const RegionRadius& b) {
  if (a.is_unbounded() || b.is_unbounded()) {
    return static_cast<int>(a.is_unbounded()) <=> static_cast<int>(b.is_unbounded());
  }
  return *a.radius_ <=> *b.radius_;
}

double nonconformity_score(const JointState& y, const JointState& y_hat, ScoreMode mode) {
  if (y.size() != y_hat.size()) {
    throw std::invalid_argument("nonconformity score: agent count mismatch (" +
                                std::to_string(y.size()) + " vs " + std::to_string(y_hat.size()) + ")");
  }
  if (mode == ScoreMode::JointNorm) {
    double acc = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) acc += (y[j] - y_hat[j]).squared_norm();
    return std::sqrt(acc);
  }
  double worst = 0.0;
  for (std::size_t j = 0; j < y.size(); ++j) worst = std::max(worst, distance(y[j], y_hat[j]));
  return worst;
}

std::size_t quantile_index(std::size_t k, double delta_bar) {
  if (!(delta_bar > 0.0 && delta_bar < 1.0)) {
    throw std::invalid_argument("delta_bar must lie in (0, 1)");
  }
  double x = static_cast<double>(k + 1) * (1.0 - delta_bar);
  const double nearest = std::round(x);
  if (std::abs(x - nearest) < 1e-9) x = nearest;
  const auto p = static_cast<std::size_t>(std::ceil(x));
  return std::clamp<std::size_t>(p, 1, k + 1);
}

RegionRadius conformal_quantile(std::span<const double> scores, double delta_bar) {
  if (scores.empty()) throw std::invalid_argument("conformal_quantile: empty score list");
  const std::size_t p = quantile_index(scores.size(), delta_bar);
  for (double s : scores) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("conformal_quantile: scores must be finite and nonnegative");
    }
  }
  if (p == scores.size() + 1) return RegionRadius::unbounded();
  // The p-th order statistic does not depend on how ties are ordered, so a
  // selection gives the same value as a full stable sort.
  std::vector<double> work(scores.begin(), scores.end());
  const auto nth = work.begin() + static_cast<std::ptrdiff_t>(p - 1);
  std::nth_element(work.begin(), nth, work.end());
  return RegionRadius::bounded(*nth);
}

// ---------------------------------------------------------------------------

ScoreTensor::ScoreTensor(int horizon, int prediction_horizon, std::size_t samples)
    : horizon_(horizon), prediction_horizon_(prediction_horizon), samples_(samples) {
  if (horizon < 1 || prediction_horizon < 1) throw ValidationError("score tensor needs T, H >= 1");
  data_.assign(static_cast<std::size_t>(horizon) * static_cast<std::size_t>(prediction_horizon) * samples,
               0.0);
}

bool ScoreTensor::has(int t, int tau) const {
  return t >= 0 && t < horizon_ && tau > t && tau <= std::min(t + prediction_horizon_, horizon_);
}

std::size_t ScoreTensor::offset(int t, int tau) const {
  if (!has(t, tau)) {
    throw std::out_of_range("no scores for (t=" + std::to_string(t) + ", tau=" + std::to_string(tau) + ")");
  }
  return (static_cast<std::size_t>(t) * static_cast<std::size_t>(prediction_horizon_) +
          static_cast<std::size_t>(tau - t - 1)) * samples_;
}

std::span<const double> ScoreTensor::scores(int t, int tau) const {
  return std::span<const double>(data_).subspan(offset(t, tau), samples_);
}

double& ScoreTensor::at(int t, int tau, std::size_t i) { return data_[offset(t, tau) + i]; }

ScoreTensor collect_scores(std::span<const Trajectory> trajs, const PredictorSpec& spec, int T,
                           int H, ScoreMode mode) {
  if (trajs.empty()) throw ValidationError("calibration split is empty");
  if (T < 1 || H < 1) throw ValidationError("calibration needs T >= 1 and H >= 1");
  for (const Trajectory& tr : trajs) {
    if (tr.horizon() < T) {
      throw ValidationError("calibration horizon T = " + std::to_string(T) +
                            " exceeds trajectory horizon " + std::to_string(tr.horizon()));
    }
  }
  ScoreTensor out(T, H, trajs.size());
  parallel_for(trajs.size(), [&](std::size_t i) {
    const Trajectory& tr = trajs[i];
    for (int t = 0; t < T; ++t) {
      const PredictionSet pred = predict(spec, tr.history_through(t), t, H, T, &tr);
      for (int tau = pred.first(); tau <= pred.last(); ++tau) {
        out.at(t, tau, i) = nonconformity_score(tr.at(tau), pred.at(tau), mode);
      }
    }
  });
  return out;
}

// ---------------------------------------------------------------------------

CalibrationTable::CalibrationTable(double delta, int horizon, int prediction_horizon,
                                   ScoreMode mode, std::size_t k_val)
    : delta_(delta),
      horizon_(horizon),
      prediction_horizon_(prediction_horizon),
      mode_(mode),
      k_val_(k_val),
      p_(0),
      regions_(static_cast<std::size_t>(std::max(horizon, 0)) *
                   static_cast<std::size_t>(std::max(prediction_horizon, 0)),
               RegionRadius::unbounded()) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (horizon < 1) throw ValidationError("T must be >= 1");
  if (prediction_horizon < 1 || prediction_horizon > horizon) {
    throw ValidationError("H must satisfy 1 <= H <= T");
  }
  if (k_val < 1) throw ValidationError("calibration needs at least one trajectory");
  p_ = csmpc::quantile_index(k_val, delta_bar());
}

bool CalibrationTable::has(int t, int tau) const {
  return t >= 0 && t < horizon_ && tau > t && tau <= std::min(t + prediction_horizon_, horizon_);
}

std::size_t CalibrationTable::offset(int t, int tau) const {
  if (!has(t, tau)) {
    throw std::out_of_range("calibration table has no entry for (t=" + std::to_string(t) +
                            ", tau=" + std::to_string(tau) + ")");
  }
  return static_cast<std::size_t>(t) * static_cast<std::size_t>(prediction_horizon_) +
         static_cast<std::size_t>(tau - t - 1);
}

const RegionRadius& CalibrationTable::region(int t, int tau) const { return regions_[offset(t, tau)]; }

void CalibrationTable::set(int t, int tau, RegionRadius c) { regions_[offset(t, tau)] = c; }

CalibrationTable calibrate_from_scores(const ScoreTensor& scores, double delta, ScoreMode mode) {
  CalibrationTable table(delta, scores.horizon(), scores.prediction_horizon(), mode, scores.samples());
  for (int t = 0; t < scores.horizon(); ++t) {
    for (int tau = t + 1; tau <= std::min(t + scores.prediction_horizon(), scores.horizon()); ++tau) {
      table.set(t, tau, conformal_quantile(scores.scores(t, tau), table.delta_bar()));
    }
  }
  return table;
}

CalibrationTable calibrate(std::span<const Trajectory> val, const PredictorSpec& spec,
                           double delta, int T, int H, ScoreMode mode) {
  if (!(delta > 0.0 && delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (H < 1 || H > T) throw ValidationError("H must satisfy 1 <= H <= T");
  return calibrate_from_scores(collect_scores(val, spec, T, H, mode), delta, mode);
}

CalibrationTable calibrate(const Dataset& data, const PredictorSpec& spec, double delta, int T,
                           int H, ScoreMode mode) {
  const std::vector<Trajectory> val = data.select(Split::Val);
  CalibrationTable table = calibrate(std::span<const Trajectory>(val), spec, delta, T, H, mode);
  table.set_calibration_ids(data.indices(Split::Val));
  return table;
}

CalibrationTable worst_case_over_time(const CalibrationTable& table) {
  CalibrationTable out = table;
  const int T = table.horizon();
  const int H = table.prediction_horizon();
  for (int k = 1; k <= H; ++k) {
    std::optional<RegionRadius> worst;
    for (int t = 0; t + k <= T; ++t) {
      const RegionRadius& c = table.region(t, t + k);
      if (!worst || c > *worst) worst = c;
    }
    for (int t = 0; t + k <= T; ++t) out.set(t, t + k, *worst);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(CoverageKind k) {
  return k == CoverageKind::JointFromZero ? "joint" : "onestep";
}

CoverageKind coverage_kind_from_string(std::string_view s) {
  if (s == "joint" || s == "joint-from-zero") return CoverageKind::JointFromZero;
  if (s == "onestep" || s == "one-step") return CoverageKind::OneStep;
  throw ValidationError("unknown coverage kind '" + std::string(s) + "' (expected joint|onestep)");
}

CoverageReport empirical_coverage(std::span<const Trajectory> test, const PredictorSpec& spec,
                                  const CalibrationTable& table, CoverageKind kind) {
  if (test.empty()) throw ValidationError("coverage needs at least one test trajectory");
  const int T = table.horizon();
  if (kind == CoverageKind::JointFromZero && table.prediction_horizon() != T) {
    throw ValidationError("joint-from-zero coverage needs a table with H = T");
  }
  for (const Trajectory& tr : test) {
    if (tr.horizon() < T) throw ValidationError("test trajectory shorter than table horizon");
  }
  CoverageReport report;
  report.kind = kind;
  std::vector<char> pass(test.size(), 0);
  parallel_for(test.size(), [&](std::size_t i) {
    const Trajectory& tr = test[i];
    bool ok = true;
    if (kind == CoverageKind::JointFromZero) {
      const PredictionSet pred = predict(spec, tr.history_through(0), 0, T, T, &tr);
      for (int tau = 1; tau <= T && ok; ++tau) {
        ok = table.region(0, tau).covers(nonconformity_score(tr.at(tau), pred.at(tau), table.mode()));
      }
    } else {
      for (int t = 0; t < T && ok; ++t) {
        const PredictionSet pred = predict(spec, tr.history_through(t), t, 1, T, &tr);
        ok = table.region(t, t + 1).covers(
            nonconformity_score(tr.at(t + 1), pred.at(t + 1), table.mode()));
      }
    }
    pass[i] = ok ? 1 : 0;
  });
  std::size_t passed = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    report.passes.push_back(pass[i] != 0);
    if (pass[i]) {
      ++passed;
    } else {
      report.failures.push_back(i);
    }
  }
  report.rate = static_cast<double>(passed) / static_cast<double>(test.size());
  return report;
}

}  // namespace csmpc
