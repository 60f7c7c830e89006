#include "csmpc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace csmpc {

bool ControlBounds::contains(const ControlInput& u, double tol) const {
  return std::abs(u.steering) <= steering_max + tol && u.accel >= accel_min - tol &&
         u.accel <= accel_max + tol;
}

ControlInput ControlBounds::clamp(const ControlInput& u) const {
  return {std::clamp(u.steering, -steering_max, steering_max), std::clamp(u.accel, accel_min, accel_max)};
}

double StateBounds::violation(const RobotState& s) const {
  const double v = std::max({workspace.min.x - s.x, s.x - workspace.max.x, workspace.min.y - s.y,
                             s.y - workspace.max.y, -s.speed, s.speed - speed_max});
  return std::max(v, 0.0);
}

double wrap_angle(double a) {
  constexpr double pi = std::numbers::pi;
  if (a > -pi && a <= pi) return a;
  double r = std::remainder(a, 2.0 * pi);  // in [-pi, pi]
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

RobotState bicycle_step(const RobotState& s, const ControlInput& u, double dt, double wheelbase) {
  RobotState n;
  n.x = s.x + dt * s.speed * std::cos(s.heading);
  n.y = s.y + dt * s.speed * std::sin(s.heading);
  n.heading = wrap_angle(s.heading + dt * (s.speed / wheelbase) * std::tan(u.steering));
  n.speed = s.speed + dt * u.accel;
  return n;
}

StepJacobian bicycle_jacobian(const RobotState& s, const ControlInput& u, double dt, double wheelbase) {
  const double c = std::cos(s.heading);
  const double sn = std::sin(s.heading);
  const double tn = std::tan(u.steering);
  const double sec = 1.0 / std::cos(u.steering);
  StepJacobian j;
  // clang-format off
  j.a = {1.0, 0.0, -dt * s.speed * sn, dt * c,
         0.0, 1.0,  dt * s.speed * c,  dt * sn,
         0.0, 0.0,  1.0,               dt * tn / wheelbase,
         0.0, 0.0,  0.0,               1.0};
  j.b = {0.0, 0.0,
         0.0, 0.0,
         dt * s.speed * sec * sec / wheelbase, 0.0,
         0.0, dt};
  // clang-format on
  return j;
}

std::array<double, 4> Rollout::position_sensitivity(std::size_t k, std::size_t j) const {
  const auto& s = state_sensitivity(k, j);
  return {s[0], s[1], s[2], s[3]};
}

Rollout rollout(const RobotState& s0, std::span<const ControlInput> controls, const VehicleParams& vp,
                bool with_sensitivities) {
  Rollout r;
  const std::size_t n = controls.size();
  r.controls = n;
  r.states.reserve(n + 1);
  r.states.push_back(s0);
  if (with_sensitivities) r.sensitivity.assign((n + 1) * n, std::array<double, 8>{});
  for (std::size_t k = 0; k < n; ++k) {
    const RobotState& s = r.states.back();
    if (with_sensitivities) {
      const StepJacobian jac = bicycle_jacobian(s, controls[k], vp.dt, vp.wheelbase);
      // d s_{k+1}/d u_j = A_k d s_k/d u_j for j < k, and B_k for j = k.
      for (std::size_t j = 0; j < k; ++j) {
        const auto& prev = r.sensitivity[k * n + j];
        auto& next = r.sensitivity[(k + 1) * n + j];
        for (int row = 0; row < 4; ++row) {
          for (int col = 0; col < 2; ++col) {
            double acc = 0.0;
            for (int m = 0; m < 4; ++m) acc += jac.a[row * 4 + m] * prev[m * 2 + col];
            next[row * 2 + col] = acc;
          }
        }
      }
      r.sensitivity[(k + 1) * n + k] = jac.b;
    }
    r.states.push_back(bicycle_step(s, controls[k], vp.dt, vp.wheelbase));
  }
  return r;
}

NearestAgent nearest_agent(Vec2 p, const JointState& agents) {
  if (agents.size() == 0) throw std::invalid_argument("constraint needs at least one agent");
  NearestAgent best{distance(p, agents[0]), 0};
  for (std::size_t j = 1; j < agents.size(); ++j) {
    const double d = distance(p, agents[j]);
    if (d < best.distance) best = {d, j};
  }
  return best;
}

double constraint_value(Vec2 p, const JointState& agents, const ConstraintSpec& cs) {
  return nearest_agent(p, agents).distance - cs.safety_distance;
}

}  // namespace csmpc
