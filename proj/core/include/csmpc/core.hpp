#pragma once

// Domain data model shared by every csmpc module: agent states, trajectories,
// datasets with train/val/test splits, and the scenario configuration.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace csmpc {

/// Raised for malformed inputs (bad configuration, inconsistent data).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;

  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Position of a single dynamic agent, in meters.
using AgentState = Vec2;

/// Joint state of all N agents at one time instant.
struct JointState {
  std::vector<AgentState> agents;

  std::size_t size() const { return agents.size(); }
  const AgentState& operator[](std::size_t j) const { return agents[j]; }
  AgentState& operator[](std::size_t j) { return agents[j]; }
  friend bool operator==(const JointState&, const JointState&) = default;
};

/// Agent trajectory sampled at indices -h..T. Index 0 is the planning start;
/// the h samples before it are the observation warmup.
class Trajectory {
 public:
  Trajectory() = default;
  Trajectory(std::vector<JointState> states, int history_len);

  int history_len() const { return history_len_; }
  /// Task horizon T (last valid time index).
  int horizon() const { return static_cast<int>(states_.size()) - history_len_ - 1; }
  std::size_t agent_count() const { return states_.empty() ? 0 : states_.front().size(); }

  /// State at time index t in [-h, T].
  const JointState& at(int t) const;
  /// Observations y_{-h}, ..., y_t.
  std::span<const JointState> history_through(int t) const;
  const std::vector<JointState>& states() const { return states_; }

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::vector<JointState> states_;
  int history_len_ = 0;
};

enum class Split { Train, Val, Test };

std::string_view to_string(Split s);
Split split_from_string(std::string_view s);

struct Box {
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  friend bool operator==(const Box&, const Box&) = default;
};

struct ScenarioConfig {
  int agent_count = 3;
  int horizon = 20;        // T
  int history_len = 20;    // h
  double dt = 0.125;       // sampling period, seconds
  Box workspace{{-1.0, -4.0}, {7.0, 4.0}};
  double spawn_margin = 0.5;  // agents start/goal this far inside the workspace
  /// Crossing layout: each agent starts within band_depth of the top or bottom
  /// edge of the spawn box and heads for the opposite band. Otherwise start
  /// and goal are uniform over the whole spawn box.
  bool crossing = true;
  double band_depth = 0.5;
  double speed_min = 0.5;
  double speed_max = 1.2;
  double noise_scale = 0.02;  // per-step displacement noise std, meters
  /// Trajectories with an agent closer than this to the robot start at t = 0
  /// are redrawn. Zero disables the rejection.
  double robot_clearance = 1.0;

  // Robot task.
  Vec2 robot_start{0.0, 0.0};
  double robot_start_heading = 0.0;
  double robot_start_speed = 1.0;
  Vec2 goal_center{6.0, 0.0};
  double goal_radius = 0.25;
  double safety_distance = 0.25;  // epsilon

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Throws ValidationError naming the first offending field.
void validate(const ScenarioConfig& cfg);

struct Dataset {
  std::uint64_t seed = 0;
  ScenarioConfig scenario;
  std::vector<Trajectory> trajectories;
  std::vector<Split> splits;

  std::size_t count(Split s) const;
  /// Dataset positions of the trajectories in split s, ascending.
  std::vector<std::size_t> indices(Split s) const;
  std::vector<Trajectory> select(Split s) const;

  friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Human-readable invariant violations; empty iff the dataset is well formed.
/// An empty training split is allowed (predictors that need no fitting).
std::vector<std::string> validate_dataset(const Dataset& d);

}  // namespace csmpc
