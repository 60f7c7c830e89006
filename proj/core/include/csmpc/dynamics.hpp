#pragma once

// Kinematic bicycle robot model and the min-distance collision constraint.

#include <array>
#include <span>
#include <vector>

#include "csmpc/core.hpp"

namespace csmpc {

struct RobotState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;  // radians, kept in (-pi, pi]
  double speed = 0.0;    // m/s

  Vec2 position() const { return {x, y}; }
  friend bool operator==(const RobotState&, const RobotState&) = default;
};

struct ControlInput {
  double steering = 0.0;  // radians
  double accel = 0.0;     // m/s^2
  friend bool operator==(const ControlInput&, const ControlInput&) = default;
};

struct ControlBounds {
  double steering_max = 0.6;
  double accel_min = -3.0;
  double accel_max = 3.0;

  bool contains(const ControlInput& u, double tol = 0.0) const;
  ControlInput clamp(const ControlInput& u) const;
  friend bool operator==(const ControlBounds&, const ControlBounds&) = default;
};

/// The admissible robot states: a workspace box on position plus a speed range.
struct StateBounds {
  Box workspace{{-1.0, -4.0}, {7.0, 4.0}};
  double speed_max = 4.0;

  /// Largest violation of any bound, 0 when inside.
  double violation(const RobotState& s) const;
  friend bool operator==(const StateBounds&, const StateBounds&) = default;
};

struct VehicleParams {
  double dt = 0.125;
  double wheelbase = 1.0;
  friend bool operator==(const VehicleParams&, const VehicleParams&) = default;
};

struct ConstraintSpec {
  double safety_distance = 0.25;  // epsilon
  double lipschitz = 1.0;         // L
  friend bool operator==(const ConstraintSpec&, const ConstraintSpec&) = default;
};

/// Maps an angle into (-pi, pi].
double wrap_angle(double a);

RobotState bicycle_step(const RobotState& s, const ControlInput& u, double dt, double wheelbase);

/// Jacobians of bicycle_step, row-major: A is 4x4 w.r.t. (x, y, heading, speed),
/// B is 4x2 w.r.t. (steering, accel).
struct StepJacobian {
  std::array<double, 16> a{};
  std::array<double, 8> b{};
};
StepJacobian bicycle_jacobian(const RobotState& s, const ControlInput& u, double dt, double wheelbase);

struct Rollout {
  std::vector<RobotState> states;  // s_0 .. s_n
  /// d s_k / d u_j as a 4x2 row-major block, stored for every k in [0, n] and
  /// j in [0, n); zero for j >= k. Empty when sensitivities were not requested.
  std::vector<std::array<double, 8>> sensitivity;
  std::size_t controls = 0;

  const std::array<double, 8>& state_sensitivity(std::size_t k, std::size_t j) const {
    return sensitivity[k * controls + j];
  }
  /// d(x_k, y_k) / d(steering_j, accel_j), row-major 2x2.
  std::array<double, 4> position_sensitivity(std::size_t k, std::size_t j) const;
};

Rollout rollout(const RobotState& s0, std::span<const ControlInput> controls, const VehicleParams& vp,
                bool with_sensitivities = true);

struct NearestAgent {
  double distance = 0.0;
  std::size_t index = 0;
};

/// Closest agent; ties go to the lowest index.
NearestAgent nearest_agent(Vec2 p, const JointState& agents);

/// c(p, Y) = min_j ||p - Y_j|| - epsilon.
double constraint_value(Vec2 p, const JointState& agents, const ConstraintSpec& cs);

}  // namespace csmpc
