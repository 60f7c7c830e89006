#include "csmpc/predictors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <string>

namespace csmpc {

std::string_view to_string(PredictorKind k) {
  switch (k) {
    case PredictorKind::ConstantVelocity: return "constant-velocity";
    case PredictorKind::Autoregressive: return "autoregressive";
    case PredictorKind::NoisyOracle: return "noisy-oracle";
  }
  return "?";
}

PredictorKind predictor_kind_from_string(std::string_view s) {
  if (s == "constant-velocity" || s == "cv") return PredictorKind::ConstantVelocity;
  if (s == "autoregressive" || s == "ar") return PredictorKind::Autoregressive;
  if (s == "noisy-oracle" || s == "oracle") return PredictorKind::NoisyOracle;
  throw ValidationError("unknown predictor kind '" + std::string(s) + "'");
}

PredictorSpec PredictorSpec::constant_velocity() { return PredictorSpec{}; }

PredictorSpec PredictorSpec::noisy_oracle(std::vector<std::vector<Vec2>> errors) {
  PredictorSpec s;
  s.kind = PredictorKind::NoisyOracle;
  s.oracle_errors = std::move(errors);
  return s;
}

std::size_t PredictorSpec::required_history() const {
  switch (kind) {
    case PredictorKind::ConstantVelocity: return 2;
    case PredictorKind::Autoregressive: return static_cast<std::size_t>(std::max(2, order + 1));
    case PredictorKind::NoisyOracle: return 1;
  }
  return 2;
}

void validate(const PredictorSpec& spec) {
  if (spec.kind == PredictorKind::Autoregressive) {
    if (spec.order < 1) throw ValidationError("predictor.order must be >= 1");
    if (spec.coefficients.size() != 4 * static_cast<std::size_t>(spec.order)) {
      throw ValidationError("predictor.coefficients must hold 4 * order values");
    }
  }
}

const JointState& PredictionSet::at(int tau) const {
  if (tau < first() || tau > last()) {
    throw std::out_of_range("no prediction for tau = " + std::to_string(tau));
  }
  return values[static_cast<std::size_t>(tau - first())];
}

namespace {

// Per-agent recursive extrapolation; `window` holds the most recent positions,
// oldest first, and is extended in place.
Vec2 next_position(const PredictorSpec& spec, const std::vector<Vec2>& window) {
  const std::size_t n = window.size();
  const Vec2 last = window[n - 1];
  if (spec.kind == PredictorKind::ConstantVelocity) {
    return last + (last - window[n - 2]);
  }
  Vec2 d{0.0, 0.0};
  for (int l = 0; l < spec.order; ++l) {
    const Vec2 lag = window[n - 1 - static_cast<std::size_t>(l)] -
                     window[n - 2 - static_cast<std::size_t>(l)];
    const double* a = &spec.coefficients[4 * static_cast<std::size_t>(l)];
    d.x += a[0] * lag.x + a[1] * lag.y;
    d.y += a[2] * lag.x + a[3] * lag.y;
  }
  return last + d;
}

Vec2 oracle_offset(const PredictorSpec& spec, int step, std::size_t agent) {
  if (spec.oracle_errors.empty()) return {};
  const auto k = std::min(static_cast<std::size_t>(step - 1), spec.oracle_errors.size() - 1);
  const auto& e = spec.oracle_errors[k];
  if (e.empty()) return {};
  if (e.size() == 1) return e[0];
  if (agent >= e.size()) throw ValidationError("oracle error vector has fewer entries than agents");
  return e[agent];
}

}  // namespace

PredictionSet predict(const PredictorSpec& spec, std::span<const JointState> history, int t,
                      int horizon, int T, const Trajectory* truth) {
  if (horizon < 1) throw ValidationError("prediction horizon must be >= 1");
  if (history.size() < spec.required_history()) {
    throw ValidationError("predictor needs at least " + std::to_string(spec.required_history()) +
                          " observed states, got " + std::to_string(history.size()));
  }
  validate(spec);
  PredictionSet out;
  out.made_at = t;
  const int steps = std::max(0, std::min(t + horizon, T) - t);
  const std::size_t n_agents = history.back().size();
  out.values.assign(static_cast<std::size_t>(steps), JointState{std::vector<AgentState>(n_agents)});
  if (steps == 0) return out;

  if (spec.kind == PredictorKind::NoisyOracle) {
    if (truth == nullptr) throw ValidationError("noisy-oracle predictor needs the ground-truth trajectory");
    for (int k = 1; k <= steps; ++k) {
      const JointState& y = truth->at(t + k);
      for (std::size_t j = 0; j < n_agents; ++j) {
        out.values[static_cast<std::size_t>(k - 1)][j] = y[j] + oracle_offset(spec, k, j);
      }
    }
    return out;
  }

  const std::size_t need = spec.required_history();
  std::vector<Vec2> window;
  window.reserve(need + static_cast<std::size_t>(steps));
  for (std::size_t j = 0; j < n_agents; ++j) {
    window.clear();
    for (std::size_t k = history.size() - need; k < history.size(); ++k) {
      if (history[k].size() != n_agents) throw ValidationError("history has inconsistent agent count");
      window.push_back(history[k][j]);
    }
    for (int k = 0; k < steps; ++k) {
      const Vec2 next = next_position(spec, window);
      out.values[static_cast<std::size_t>(k)][j] = next;
      window.push_back(next);
    }
  }
  return out;
}

PredictorSpec fit_autoregressive(std::span<const Trajectory> train, int order) {
  if (order < 1) throw ValidationError("autoregressive order must be >= 1");
  if (train.empty()) throw ValidationError("training split is empty");
  const int dim = 2 * order;
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(dim, 2);
  Eigen::VectorXd z(dim);
  std::size_t samples = 0;

  for (const Trajectory& tr : train) {
    const auto& states = tr.states();
    if (states.size() < static_cast<std::size_t>(order) + 2) {
      throw ValidationError("training trajectory too short for order " + std::to_string(order));
    }
    for (std::size_t j = 0; j < tr.agent_count(); ++j) {
      auto disp = [&](std::size_t i) { return states[i][j] - states[i - 1][j]; };
      for (std::size_t i = static_cast<std::size_t>(order) + 1; i < states.size(); ++i) {
        for (int l = 0; l < order; ++l) {
          const Vec2 d = disp(i - 1 - static_cast<std::size_t>(l));
          z(2 * l) = d.x;
          z(2 * l + 1) = d.y;
        }
        const Vec2 target = disp(i);
        gram.noalias() += z * z.transpose();
        cross.col(0) += z * target.x;
        cross.col(1) += z * target.y;
        ++samples;
      }
    }
  }

  PredictorSpec spec;
  spec.kind = PredictorKind::Autoregressive;
  spec.order = order;

  Eigen::MatrixXd weights(dim, 2);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  const double scale = std::max(1.0, gram.diagonal().cwiseAbs().maxCoeff());
  const bool well_posed = samples > 0 && ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                          ldlt.vectorD().minCoeff() > 1e-12 * scale;
  if (well_posed) {
    weights = ldlt.solve(cross);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
    cod.setThreshold(1e-12);
    weights = cod.pseudoInverse() * cross;
    spec.min_norm_fallback = true;
  }

  // d_next^T = z^T W, so block l of the map is W(2l:2l+2, :)^T.
  spec.coefficients.resize(4 * static_cast<std::size_t>(order));
  for (int l = 0; l < order; ++l) {
    double* a = &spec.coefficients[4 * static_cast<std::size_t>(l)];
    a[0] = weights(2 * l, 0);
    a[1] = weights(2 * l + 1, 0);
    a[2] = weights(2 * l, 1);
    a[3] = weights(2 * l + 1, 1);
  }
  return spec;
}

}  // namespace csmpc
