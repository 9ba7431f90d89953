#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "oil/geometry.hpp"
#include "oil/vehicle.hpp"

namespace oil {

// Look-ahead centerline points in the vehicle frame, interleaved as
// (along the viewing axis, left of the viewing axis) per point.
struct WaypointVector {
  std::vector<double> v;

  std::size_t count() const { return v.size() / 2; }
  double along(std::size_t i) const { return v[2 * i]; }
  double lateral(std::size_t i) const { return v[2 * i + 1]; }
};

struct Pose {
  Vec2 position;
  double heading = 0.0;
};

WaypointVector encode_waypoints(const Track& track, const Pose& pose, int k, double spacing);

// Adds i.i.d. N(0, sigma^2) to every component, then re-sorts the points by
// their along-axis offset. sigma == 0 returns the input unchanged.
WaypointVector add_waypoint_noise(const WaypointVector& wp, double sigma, std::uint64_t seed);

struct StepOutcome {
  VehicleState next_state;
  double e = 0.0;          // signed lateral error, left positive
  double s = 0.0;          // arc position in [0, L)
  double v_forward = 0.0;  // velocity along the centerline tangent
  bool terminal = false;   // |e| > half_width
};

// Replaces the vehicle model; used by tests to drive along the centerline exactly.
using DynamicsFn =
    std::function<VehicleState(const Track&, const VehicleState&, const ControlVector&, double dt)>;

struct SimConfig {
  VehicleKind kind = VehicleKind::car;
  double dt = 0.05;
  CarParams car;
  UavParams uav;
  int waypoint_count = 5;
  double waypoint_spacing = 5.0;
  double waypoint_noise = 0.0;
  // Feature scaling for the learner input.
  double feature_distance_scale = 25.0;
  double feature_speed_scale = 20.0;
  DynamicsFn dynamics;  // empty: use the built-in model for `kind`
};

// What a policy sees at one state.
struct Observation {
  WaypointVector waypoints;
  VehicleState state;
  double heading_error = 0.0;  // vehicle heading minus centerline tangent angle
  double speed = 0.0;          // car: speed; uav: body-forward velocity
};

// Stateless view of one track under one simulator configuration. Safe to share
// between threads.
class Simulator {
 public:
  Simulator(const Track& track, SimConfig cfg);

  const Track& track() const { return *track_; }
  const SimConfig& config() const { return cfg_; }
  VehicleKind kind() const { return cfg_.kind; }
  double dt() const { return cfg_.dt; }

  StepOutcome step(const VehicleState& s, const ControlVector& u) const;
  StepOutcome measure(const VehicleState& s) const;
  // noise_seed is only consulted when waypoint_noise > 0.
  Observation observe(const VehicleState& s, std::uint64_t noise_seed = 0) const;

 private:
  const Track* track_;
  SimConfig cfg_;
};

// Learner input: scaled waypoints, then [speed, sin(heading_error), cos(heading_error)].
std::vector<double> state_features(const Observation& obs, const SimConfig& cfg);
std::size_t feature_dim(const SimConfig& cfg);

}  // namespace oil
