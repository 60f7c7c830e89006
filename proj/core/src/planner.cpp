#include "csmpc/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace csmpc {

std::string_view to_string(GoalMode m) { return m == GoalMode::HardTerminal ? "hard" : "soft"; }

GoalMode goal_mode_from_string(std::string_view s) {
  if (s == "hard") return GoalMode::HardTerminal;
  if (s == "soft") return GoalMode::SoftTerminal;
  throw ValidationError("unknown goal mode '" + std::string(s) + "' (expected hard|soft)");
}

std::string_view to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::Feasible: return "feasible";
    case PlanStatus::FeasibleWithSlack: return "feasible-with-slack";
    case PlanStatus::Infeasible: return "infeasible";
  }
  return "?";
}

PlanStatus plan_status_from_string(std::string_view s) {
  if (s == "feasible") return PlanStatus::Feasible;
  if (s == "feasible-with-slack") return PlanStatus::FeasibleWithSlack;
  if (s == "infeasible") return PlanStatus::Infeasible;
  throw ValidationError("unknown plan status '" + std::string(s) + "'");
}

OcpSpec make_ocp(int t, int T, const PredictionSet& predictions, const CalibrationTable& table,
                 const PlannerConfig& cfg) {
  if (t < 0 || t >= T) throw ValidationError("planning time must satisfy 0 <= t < T");
  OcpSpec spec;
  spec.t = t;
  spec.T = T;
  spec.vehicle = cfg.vehicle;
  spec.control_bounds = cfg.control_bounds;
  spec.state_bounds = cfg.state_bounds;
  spec.constraint = cfg.constraint;
  spec.weights = cfg.weights;
  spec.goal = cfg.goal;
  spec.goal_mode = cfg.goal_mode;
  spec.slack_penalty = cfg.slack_penalty;
  const int end = std::min(t + cfg.prediction_horizon, T);
  for (int tau = t + 1; tau <= end; ++tau) {
    spec.predictions.push_back(predictions.at(tau));
    spec.regions.push_back(table.region(t, tau));
  }
  return spec;
}

double task_cost(const OcpSpec& spec, std::span<const RobotState> states,
                 std::span<const ControlInput> controls) {
  double j = 0.0;
  for (const ControlInput& u : controls) {
    j += spec.weights.control_effort * (u.steering * u.steering + u.accel * u.accel);
  }
  for (std::size_t k = 1; k < states.size(); ++k) {
    j += spec.weights.speed_sq * states[k].speed * states[k].speed;
  }
  if (spec.goal_mode == GoalMode::SoftTerminal && states.size() > 1) {
    j += spec.weights.terminal_goal * distance(states.back().position(), spec.goal.center);
  }
  return j;
}

namespace {

constexpr double kNoViolation = 0.0;

// Quadratic-penalty objective over the flattened controls
// (steering_0, accel_0, steering_1, ...).
class PenaltyObjective {
 public:
  PenaltyObjective(const OcpSpec& spec, const RobotState& x_t, double backoff)
      : spec_(spec), x_t_(x_t), backoff_(backoff), n_(static_cast<std::size_t>(spec.T - spec.t)) {
    states_.resize(n_ + 1);
    cos_h_.resize(n_);
    sin_h_.resize(n_);
    tan_s_.resize(n_);
    sec2_s_.resize(n_);
    grad_state_.resize(n_ + 1);
    target_.resize(spec.regions.size());
    for (std::size_t k = 0; k < spec.regions.size(); ++k) {
      target_[k] = spec.constraint.lipschitz * spec.regions[k].radius() + backoff_;
    }
  }

  std::size_t dim() const { return 2 * n_; }

  double value(std::span<const double> z, double mu, std::span<double> grad) {
    const bool want_grad = !grad.empty();
    const double dt = spec_.vehicle.dt;
    const double lw = spec_.vehicle.wheelbase;
    states_[0] = x_t_;
    for (std::size_t k = 0; k < n_; ++k) {
      const RobotState& s = states_[k];
      const double steer = z[2 * k];
      const double accel = z[2 * k + 1];
      cos_h_[k] = std::cos(s.heading);
      sin_h_[k] = std::sin(s.heading);
      tan_s_[k] = std::tan(steer);
      RobotState& nx = states_[k + 1];
      nx.x = s.x + dt * s.speed * cos_h_[k];
      nx.y = s.y + dt * s.speed * sin_h_[k];
      nx.heading = wrap_angle(s.heading + dt * (s.speed / lw) * tan_s_[k]);
      nx.speed = s.speed + dt * accel;
      if (want_grad) {
        const double c = std::cos(steer);
        sec2_s_[k] = 1.0 / (c * c);
      }
    }

    double f = 0.0;
    for (std::size_t k = 0; k < n_; ++k) {
      const double steer = z[2 * k];
      const double accel = z[2 * k + 1];
      f += spec_.weights.control_effort * (steer * steer + accel * accel);
    }
    for (std::size_t k = 1; k <= n_; ++k) {
      std::array<double, 4>& g = grad_state_[k];
      g = {0.0, 0.0, 0.0, 0.0};
      f += stage_cost(k, mu, g);
    }
    if (!want_grad) return f;

    // Adjoint pass: lambda_k = dF/ds_k including downstream effects.
    std::array<double, 4> lambda = grad_state_[n_];
    for (std::size_t kk = n_; kk-- > 0;) {
      const RobotState& s = states_[kk];
      const double steer = z[2 * kk];
      const double accel = z[2 * kk + 1];
      // grad wrt u_k = effort gradient + B_k^T lambda_{k+1}
      grad[2 * kk] = 2.0 * spec_.weights.control_effort * steer + lambda[2] * dt * s.speed * sec2_s_[kk] / lw;
      grad[2 * kk + 1] = 2.0 * spec_.weights.control_effort * accel + lambda[3] * dt;
      if (kk == 0) break;
      // lambda_k = grad l_k + A_k^T lambda_{k+1}
      std::array<double, 4> prev = grad_state_[kk];
      prev[0] += lambda[0];
      prev[1] += lambda[1];
      prev[2] += lambda[2] + lambda[0] * (-dt * s.speed * sin_h_[kk]) + lambda[1] * (dt * s.speed * cos_h_[kk]);
      prev[3] += lambda[3] + lambda[0] * dt * cos_h_[kk] + lambda[1] * dt * sin_h_[kk] +
                 lambda[2] * dt * tan_s_[kk] / lw;
      lambda = prev;
    }
    return f;
  }

 private:
  // Cost and penalty terms attached to state k (time t + k); accumulates the
  // gradient with respect to that state into g.
  double stage_cost(std::size_t k, double mu, std::array<double, 4>& g) const {
    const RobotState& s = states_[k];
    double f = spec_.weights.speed_sq * s.speed * s.speed;
    g[3] += 2.0 * spec_.weights.speed_sq * s.speed;

    auto hinge_sq = [&](double viol, std::size_t idx, double sign) {
      if (viol > 0.0) {
        f += mu * viol * viol;
        g[idx] += sign * 2.0 * mu * viol;
      }
    };
    const Box& w = spec_.state_bounds.workspace;
    hinge_sq(w.min.x + backoff_ - s.x, 0, -1.0);
    hinge_sq(s.x - (w.max.x - backoff_), 0, 1.0);
    hinge_sq(w.min.y + backoff_ - s.y, 1, -1.0);
    hinge_sq(s.y - (w.max.y - backoff_), 1, 1.0);
    hinge_sq(backoff_ - s.speed, 3, -1.0);
    hinge_sq(s.speed - (spec_.state_bounds.speed_max - backoff_), 3, 1.0);

    if (k <= spec_.predictions.size()) {
      // One penalty term per agent: min_j c_j >= target iff every c_j does,
      // and the sum stays smooth where two agents are equally close.
      const JointState& agents = spec_.predictions[k - 1];
      const Vec2 p = s.position();
      for (std::size_t j = 0; j < agents.size(); ++j) {
        const Vec2 diff = p - agents[j];
        const double dist = diff.norm();
        const double viol = target_[k - 1] - (dist - spec_.constraint.safety_distance);
        if (viol <= 0.0) continue;
        double dpen;  // d penalty / d viol
        if (spec_.slack_enabled) {
          // Slack eliminated in closed form: min_s>=0 mu*(viol-s)^2 + rho*s.
          const double rho = spec_.slack_penalty;
          const double knee = rho / (2.0 * mu);
          if (viol <= knee) {
            f += mu * viol * viol;
            dpen = 2.0 * mu * viol;
          } else {
            f += rho * viol - rho * rho / (4.0 * mu);
            dpen = rho;
          }
        } else {
          f += mu * viol * viol;
          dpen = 2.0 * mu * viol;
        }
        // dc_j/dp is the unit vector from agent j to the robot.
        const Vec2 dir = dist > 0.0 ? (1.0 / dist) * diff : Vec2{1.0, 0.0};
        g[0] -= dpen * dir.x;
        g[1] -= dpen * dir.y;
      }
    }

    if (k == n_) {
      const Vec2 to_goal = s.position() - spec_.goal.center;
      const double dist = to_goal.norm();
      if (spec_.goal_mode == GoalMode::SoftTerminal) {
        f += spec_.weights.terminal_goal * dist;
        if (dist > 0.0) {
          g[0] += spec_.weights.terminal_goal * to_goal.x / dist;
          g[1] += spec_.weights.terminal_goal * to_goal.y / dist;
        }
      } else {
        const double viol = dist - std::max(spec_.goal.radius - backoff_, 0.0);
        if (viol > 0.0 && dist > 0.0) {
          f += mu * viol * viol;
          g[0] += 2.0 * mu * viol * to_goal.x / dist;
          g[1] += 2.0 * mu * viol * to_goal.y / dist;
        }
      }
    }
    return f;
  }

  const OcpSpec& spec_;
  RobotState x_t_;
  double backoff_;
  std::size_t n_;
  std::vector<RobotState> states_;
  std::vector<double> cos_h_, sin_h_, tan_s_, sec2_s_;
  std::vector<std::array<double, 4>> grad_state_;
  std::vector<double> target_;
};

void project(std::span<double> z, const ControlBounds& b) {
  for (std::size_t k = 0; k + 1 < z.size(); k += 2) {
    z[k] = std::clamp(z[k], -b.steering_max, b.steering_max);
    z[k + 1] = std::clamp(z[k + 1], b.accel_min, b.accel_max);
  }
}

struct Minimised {
  std::vector<double> z;
  int iterations = 0;
};

Minimised minimise(PenaltyObjective& obj, std::vector<double> z, const OcpSpec& spec,
                   const SolverConfig& cfg) {
  const std::size_t n = z.size();
  project(z, spec.control_bounds);
  std::vector<double> g(n), z_new(n), g_new(n);
  int iterations = 0;
  double alpha = 1e-2;
  double mu = cfg.penalty_initial;
  for (int stage = 0; stage < cfg.penalty_stages; ++stage, mu *= cfg.penalty_growth) {
    double f = obj.value(z, mu, g);
    if (stage > 0) alpha /= cfg.penalty_growth;
    for (int it = 0; it < cfg.iterations_per_stage; ++it) {
      ++iterations;
      double f_new = 0.0;
      double step_norm = 0.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls) {
        double decrease = 0.0;
        step_norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          z_new[i] = z[i] - alpha * g[i];
        }
        project(z_new, spec.control_bounds);
        for (std::size_t i = 0; i < n; ++i) {
          const double d = z_new[i] - z[i];
          decrease += g[i] * d;
          step_norm = std::max(step_norm, std::abs(d));
        }
        if (step_norm == 0.0) break;
        f_new = obj.value(z_new, mu, {});
        if (f_new <= f + 1e-4 * decrease) {
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) break;
      obj.value(z_new, mu, g_new);
      // Barzilai-Borwein step for the next iteration.
      double ss = 0.0;
      double sy = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double s = z_new[i] - z[i];
        const double y = g_new[i] - g[i];
        ss += s * s;
        sy += s * y;
      }
      alpha = sy > 0.0 ? std::clamp(ss / sy, 1e-10, 1e4) : std::min(alpha * 2.0, 1e4);
      z.swap(z_new);
      g.swap(g_new);
      const double rel = std::abs(f - f_new) / std::max(1.0, std::abs(f));
      f = f_new;
      if (step_norm < 1e-11 || rel < 1e-15) break;
    }
  }
  return {std::move(z), iterations};
}

struct Evaluated {
  PlanResult plan;
  double hard_violation = 0.0;  // state bounds and hard goal
  double merit = 0.0;           // ranking key among feasible candidates
};

Evaluated evaluate(const RobotState& x_t, const OcpSpec& spec, const SolverConfig& cfg,
                   std::vector<ControlInput> controls) {
  Evaluated e;
  PlanResult& p = e.plan;
  p.controls = std::move(controls);
  p.states = rollout(x_t, p.controls, spec.vehicle, false).states;
  p.cost = task_cost(spec, p.states, p.controls);
  double window_viol = kNoViolation;
  p.slacks.assign(spec.predictions.size(), 0.0);
  for (std::size_t k = 0; k < spec.predictions.size(); ++k) {
    const double c = constraint_value(p.states[k + 1].position(), spec.predictions[k], spec.constraint);
    const double v = spec.constraint.lipschitz * spec.regions[k].radius() - c;
    window_viol = std::max(window_viol, v);
    p.slacks[k] = std::max(0.0, v);
  }
  for (std::size_t k = 1; k < p.states.size(); ++k) {
    e.hard_violation = std::max(e.hard_violation, spec.state_bounds.violation(p.states[k]));
  }
  if (spec.goal_mode == GoalMode::HardTerminal) {
    e.hard_violation = std::max(
        e.hard_violation, distance(p.states.back().position(), spec.goal.center) - spec.goal.radius);
  }
  p.max_violation = std::max(window_viol, e.hard_violation);
  double slack_sum = 0.0;
  for (double s : p.slacks) slack_sum += s;
  if (e.hard_violation > cfg.constraint_tol) {
    p.status = PlanStatus::Infeasible;
  } else if (window_viol <= cfg.constraint_tol) {
    p.status = PlanStatus::Feasible;
  } else if (spec.slack_enabled) {
    p.status = PlanStatus::FeasibleWithSlack;
  } else {
    p.status = PlanStatus::Infeasible;
  }
  if (!spec.slack_enabled) {
    for (double& s : p.slacks) s = 0.0;
  }
  e.merit = p.cost + (spec.slack_enabled ? spec.slack_penalty * slack_sum : 0.0);
  return e;
}

// Lower is better: status first, then merit (feasible) or violation (infeasible).
bool better(const Evaluated& a, const Evaluated& b) {
  auto rank = [](PlanStatus s) {
    return s == PlanStatus::Feasible ? 0 : s == PlanStatus::FeasibleWithSlack ? 1 : 2;
  };
  const int ra = rank(a.plan.status);
  const int rb = rank(b.plan.status);
  if (ra != rb) {
    // Slack plans compete with fully feasible ones on merit.
    if (ra <= 1 && rb <= 1) return a.merit < b.merit;
    return ra < rb;
  }
  if (ra == 2) return a.plan.max_violation < b.plan.max_violation;
  return a.merit < b.merit;
}

std::vector<double> flatten(std::span<const ControlInput> u, std::size_t n) {
  std::vector<double> z(2 * n, 0.0);
  for (std::size_t k = 0; k < std::min(n, u.size()); ++k) {
    z[2 * k] = u[k].steering;
    z[2 * k + 1] = u[k].accel;
  }
  // Pad a short warm start with its last control.
  for (std::size_t k = u.size(); k < n && !u.empty(); ++k) {
    z[2 * k] = u.back().steering;
    z[2 * k + 1] = u.back().accel;
  }
  return z;
}

std::vector<ControlInput> unflatten(std::span<const double> z) {
  std::vector<ControlInput> u(z.size() / 2);
  for (std::size_t k = 0; k < u.size(); ++k) u[k] = {z[2 * k], z[2 * k + 1]};
  return u;
}

}  // namespace

PlanResult solve_ocp(int t, const RobotState& x_t, const OcpSpec& spec, const SolverConfig& solver,
                     std::span<const ControlInput> warm_start) {
  if (spec.t != t) throw ValidationError("solve_ocp: time index disagrees with the problem window");
  if (t < 0 || t >= spec.T) throw ValidationError("solve_ocp: need 0 <= t < T");
  if (spec.predictions.size() != spec.regions.size()) {
    throw ValidationError("solve_ocp: predictions and regions must cover the same window");
  }
  if (spec.window_end() > spec.T) throw ValidationError("solve_ocp: window extends past T");
  if (!std::isfinite(x_t.x) || !std::isfinite(x_t.y) || !std::isfinite(x_t.heading) ||
      !std::isfinite(x_t.speed)) {
    throw ValidationError("solve_ocp: initial state is not finite");
  }
  const auto n = static_cast<std::size_t>(spec.T - t);

  for (const RegionRadius& c : spec.regions) {
    if (c.is_unbounded()) {
      PlanResult p;
      p.controls.assign(n, ControlInput{});
      p.states = rollout(x_t, p.controls, spec.vehicle, false).states;
      p.cost = task_cost(spec, p.states, p.controls);
      p.status = PlanStatus::Infeasible;
      p.max_violation = std::numeric_limits<double>::infinity();
      p.slacks.assign(spec.predictions.size(), 0.0);
      p.reason = "unbounded prediction region";
      return p;
    }
  }

  std::vector<std::vector<double>> starts;
  starts.push_back(std::vector<double>(2 * n, 0.0));
  if (!warm_start.empty()) starts.push_back(flatten(warm_start, n));
  {
    // Stop as fast as possible and stay put.
    std::vector<double> z(2 * n, 0.0);
    double v = x_t.speed;
    for (std::size_t k = 0; k < n; ++k) {
      const double a = std::clamp(-v / spec.vehicle.dt, spec.control_bounds.accel_min, 0.0);
      z[2 * k + 1] = a;
      v += spec.vehicle.dt * a;
    }
    starts.push_back(std::move(z));
  }
  std::seed_seq seq{static_cast<std::uint32_t>(solver.seed), static_cast<std::uint32_t>(solver.seed >> 32),
                    static_cast<std::uint32_t>(t)};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int r = 0; r < solver.random_starts; ++r) {
    std::vector<double> z(2 * n);
    const double steer_bias = 0.5 * spec.control_bounds.steering_max * unit(rng);
    for (std::size_t k = 0; k < n; ++k) {
      z[2 * k] = steer_bias + 0.25 * spec.control_bounds.steering_max * unit(rng);
      z[2 * k + 1] = 0.25 * std::max(spec.control_bounds.accel_max, -spec.control_bounds.accel_min) * unit(rng);
    }
    starts.push_back(std::move(z));
  }

  PenaltyObjective obj(spec, x_t, solver.backoff);
  Evaluated best;
  bool have = false;
  int iterations = 0;
  for (auto& z0 : starts) {
    Minimised m = minimise(obj, std::move(z0), spec, solver);
    iterations += m.iterations;
    Evaluated e = evaluate(x_t, spec, solver, unflatten(m.z));
    if (!std::isfinite(e.plan.cost)) continue;
    if (!have || better(e, best)) {
      best = std::move(e);
      have = true;
    }
  }
  if (!have) throw std::runtime_error("solve_ocp: non-finite cost from every start");
  best.plan.iterations = iterations;
  if (best.plan.status == PlanStatus::Infeasible && best.plan.reason.empty()) {
    best.plan.reason = "constraint violation above tolerance";
  }
  return best.plan;
}

double penalty_objective(int t, const RobotState& x_t, const OcpSpec& spec,
                         std::span<const ControlInput> controls, double mu, double backoff,
                         std::span<double> grad) {
  if (spec.t != t) throw ValidationError("penalty_objective: time index disagrees with the problem window");
  const auto n = static_cast<std::size_t>(spec.T - t);
  if (controls.size() != n) throw ValidationError("penalty_objective: need one control per step to T");
  if (!grad.empty() && grad.size() != 2 * n) throw ValidationError("penalty_objective: gradient size");
  for (const RegionRadius& c : spec.regions) {
    if (c.is_unbounded()) throw ValidationError("penalty_objective: unbounded region in window");
  }
  PenaltyObjective obj(spec, x_t, backoff);
  const std::vector<double> z = flatten(controls, n);
  return obj.value(z, mu, grad);
}

PlanCheck check_plan(const RobotState& x_t, const OcpSpec& spec, const PlanResult& plan, double tol) {
  PlanCheck out;
  const auto n = static_cast<std::size_t>(spec.T - spec.t);
  if (plan.controls.size() != n || plan.states.size() != n + 1) return out;
  std::vector<RobotState> replay{x_t};
  for (const ControlInput& u : plan.controls) {
    replay.push_back(bicycle_step(replay.back(), u, spec.vehicle.dt, spec.vehicle.wheelbase));
  }
  out.states_match = replay == plan.states;
  out.controls_in_bounds = std::all_of(plan.controls.begin(), plan.controls.end(),
                                       [&](const ControlInput& u) { return spec.control_bounds.contains(u); });
  for (std::size_t k = 0; k < spec.predictions.size(); ++k) {
    const double c = constraint_value(replay[k + 1].position(), spec.predictions[k], spec.constraint);
    const double need = spec.regions[k].is_unbounded()
                            ? std::numeric_limits<double>::infinity()
                            : spec.constraint.lipschitz * spec.regions[k].radius();
    out.max_constraint_violation = std::max(out.max_constraint_violation, need - c);
  }
  for (std::size_t k = 1; k < replay.size(); ++k) {
    out.max_state_violation = std::max(out.max_state_violation, spec.state_bounds.violation(replay[k]));
  }
  if (spec.goal_mode == GoalMode::HardTerminal) {
    out.goal_violation = std::max(0.0, distance(replay.back().position(), spec.goal.center) - spec.goal.radius);
  }
  out.feasible = out.states_match && out.controls_in_bounds && out.max_constraint_violation <= tol &&
                 out.max_state_violation <= tol && out.goal_violation <= tol;
  return out;
}

PlanResult open_loop_plan(const RobotState& x0, const PredictionSet& predictions,
                          const CalibrationTable& table, const PlannerConfig& cfg,
                          const SolverConfig& solver) {
  const int T = table.horizon();
  if (table.prediction_horizon() != T) throw ValidationError("open-loop planning needs a table with H = T");
  PlannerConfig full = cfg;
  full.prediction_horizon = T;
  const CalibrationTable regions = cfg.worst_case_regions ? worst_case_over_time(table) : table;
  return solve_ocp(0, x0, make_ocp(0, T, predictions, regions, full), solver);
}

std::vector<ControlInput> shift_controls(std::span<const ControlInput> controls) {
  if (controls.size() <= 1) return {controls.begin(), controls.end()};
  std::vector<ControlInput> out(controls.begin() + 1, controls.end());
  out.push_back(controls.back());
  return out;
}

ControlInput braking_control(const RobotState& x, const PlannerConfig& cfg) {
  const double stop = -x.speed / cfg.vehicle.dt;
  return {0.0, std::min(std::max(cfg.control_bounds.accel_min, stop), 0.0)};
}

MpcStepResult mpc_step(int t, const RobotState& x_t, std::span<const JointState> history,
                       const Trajectory* truth, const PredictorSpec& predictor,
                       const CalibrationTable& table, const PlannerConfig& cfg,
                       const SolverConfig& solver, std::span<const ControlInput> warm_start) {
  const int T = table.horizon();
  if (t < 0 || t >= T) throw ValidationError("mpc_step: need 0 <= t < T");
  if (cfg.prediction_horizon > table.prediction_horizon()) {
    throw ValidationError("mpc_step: planner horizon H exceeds the calibrated horizon");
  }
  MpcStepResult out;
  out.predictions = predict(predictor, history, t, cfg.prediction_horizon, T, truth);
  const CalibrationTable regions = cfg.worst_case_regions ? worst_case_over_time(table) : table;
  OcpSpec spec = make_ocp(t, T, out.predictions, regions, cfg);
  out.regions = spec.regions;
  out.plan = solve_ocp(t, x_t, spec, solver, warm_start);
  if (out.plan.status == PlanStatus::Infeasible && !cfg.slack_retry) {
    out.braked = true;
    out.control = braking_control(x_t, cfg);
    return out;
  }
  if (out.plan.status == PlanStatus::Infeasible) {
    out.slack_retry = true;
    spec.slack_enabled = true;
    PlanResult relaxed = solve_ocp(t, x_t, spec, solver, warm_start);
    const double worst_slack =
        relaxed.slacks.empty() ? 0.0 : *std::max_element(relaxed.slacks.begin(), relaxed.slacks.end());
    out.plan = std::move(relaxed);
    if (out.plan.status == PlanStatus::Infeasible || worst_slack > cfg.slack_cap) {
      out.braked = true;
      out.control = braking_control(x_t, cfg);
      return out;
    }
  }
  out.control = out.plan.controls.front();
  return out;
}

}  // namespace csmpc
