#pragma once

// Multi-step trajectory predictors. Every predictor is a deterministic function
// of the observed history; multi-step forecasts feed each one-step prediction
// back in as the next input.

#include <span>
#include <vector>

#include "csmpc/core.hpp"

namespace csmpc {

enum class PredictorKind { ConstantVelocity, Autoregressive, NoisyOracle };

std::string_view to_string(PredictorKind k);
PredictorKind predictor_kind_from_string(std::string_view s);

struct PredictorSpec {
  PredictorKind kind = PredictorKind::ConstantVelocity;
  /// Number of displacement lags (autoregressive only).
  int order = 1;
  /// Autoregressive map: `order` row-major 2x2 blocks, lag 1 first, so that
  /// d_{k+1} = sum_l A_l d_{k+1-l}.
  std::vector<double> coefficients;
  /// Set when fitting fell back to the minimum-norm least-squares solution.
  bool min_norm_fallback = false;
  /// Noisy oracle: offset added to the true state k steps ahead (k = 1 first).
  /// Each entry holds one offset per agent, or a single offset applied to all
  /// agents. Steps past the end reuse the last entry; empty means zero error.
  std::vector<std::vector<Vec2>> oracle_errors;

  static PredictorSpec constant_velocity();
  static PredictorSpec noisy_oracle(std::vector<std::vector<Vec2>> errors = {});

  /// Minimum number of observed states required by predict().
  std::size_t required_history() const;

  friend bool operator==(const PredictorSpec&, const PredictorSpec&) = default;
};

/// Throws ValidationError if the spec is internally inconsistent.
void validate(const PredictorSpec& spec);

/// Predictions y_hat_{tau|t} for tau = t+1 .. min(t+H, T).
struct PredictionSet {
  int made_at = 0;
  std::vector<JointState> values;

  int first() const { return made_at + 1; }
  int last() const { return made_at + static_cast<int>(values.size()); }
  const JointState& at(int tau) const;
};

/// `history` holds y_{-h} .. y_t. `truth` is consulted only by the noisy
/// oracle, which requires it.
PredictionSet predict(const PredictorSpec& spec, std::span<const JointState> history, int t,
                      int horizon, int T, const Trajectory* truth = nullptr);

/// Pooled least squares over every agent and time index of `train`.
PredictorSpec fit_autoregressive(std::span<const Trajectory> train, int order);

}  // namespace csmpc
