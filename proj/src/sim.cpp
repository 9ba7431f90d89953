#include "oil/sim.hpp"

#include <algorithm>
#include <random>

#include "oil/errors.hpp"

namespace oil {

namespace {

WaypointVector encode_from(const Track& track, const Pose& pose, double s0, int k, double spacing) {
  if (k < 1) throw ContractError("waypoint count must be >= 1");
  if (!(spacing > 0.0)) throw ContractError("waypoint spacing must be positive");
  const Vec2 fwd = heading_vector(pose.heading);
  const Vec2 left = left_normal(fwd);

  WaypointVector out;
  out.v.reserve(2 * static_cast<std::size_t>(k));
  for (int i = 1; i <= k; ++i) {
    const Vec2 d = track.point_at(s0 + i * spacing) - pose.position;
    out.v.push_back(dot(d, fwd));
    out.v.push_back(dot(d, left));
  }
  return out;
}

}  // namespace

WaypointVector encode_waypoints(const Track& track, const Pose& pose, int k, double spacing) {
  return encode_from(track, pose, project_to_centerline(track, pose.position).s, k, spacing);
}

WaypointVector add_waypoint_noise(const WaypointVector& wp, double sigma, std::uint64_t seed) {
  if (sigma == 0.0) return wp;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  WaypointVector out = wp;
  for (double& x : out.v) x += noise(rng);

  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < out.count(); ++i) pts.emplace_back(out.along(i), out.lateral(i));
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    out.v[2 * i] = pts[i].first;
    out.v[2 * i + 1] = pts[i].second;
  }
  return out;
}

Simulator::Simulator(const Track& track, SimConfig cfg) : track_(&track), cfg_(std::move(cfg)) {
  if (!(cfg_.dt > 0.0 && cfg_.dt <= 0.1)) throw ContractError("dt must be in (0, 0.1]");
}

StepOutcome Simulator::measure(const VehicleState& s) const {
  const Projection pr = project_to_centerline(*track_, s.position);
  StepOutcome out;
  out.next_state = s;
  out.e = pr.e;
  out.s = pr.s;
  const Vec2 vel = cfg_.kind == VehicleKind::car ? heading_vector(s.heading) * s.speed : s.velocity;
  out.v_forward = dot(vel, pr.tangent);
  out.terminal = std::abs(pr.e) > track_->half_width;
  return out;
}

StepOutcome Simulator::step(const VehicleState& s, const ControlVector& u) const {
  VehicleState next;
  if (cfg_.dynamics)
    next = cfg_.dynamics(*track_, s, u, cfg_.dt);
  else if (cfg_.kind == VehicleKind::car)
    next = step_car(s, u, cfg_.dt, cfg_.car);
  else
    next = step_uav(s, u, cfg_.dt, cfg_.uav);
  return measure(next);
}

Observation Simulator::observe(const VehicleState& s, std::uint64_t noise_seed) const {
  Observation obs;
  obs.state = s;
  const Projection pr = project_to_centerline(*track_, s.position);
  obs.waypoints = encode_from(*track_, {s.position, s.heading}, pr.s, cfg_.waypoint_count, cfg_.waypoint_spacing);
  if (cfg_.waypoint_noise > 0.0) obs.waypoints = add_waypoint_noise(obs.waypoints, cfg_.waypoint_noise, noise_seed);
  obs.heading_error = wrap_angle(s.heading - std::atan2(pr.tangent.y, pr.tangent.x));
  obs.speed = cfg_.kind == VehicleKind::car ? s.speed : dot(s.velocity, heading_vector(s.heading));
  return obs;
}

std::size_t feature_dim(const SimConfig& cfg) { return 2 * static_cast<std::size_t>(cfg.waypoint_count) + 3; }

std::vector<double> state_features(const Observation& obs, const SimConfig& cfg) {
  std::vector<double> f;
  f.reserve(feature_dim(cfg));
  for (double x : obs.waypoints.v) f.push_back(x / cfg.feature_distance_scale);
  f.push_back(obs.speed / cfg.feature_speed_scale);
  f.push_back(std::sin(obs.heading_error));
  f.push_back(std::cos(obs.heading_error));
  return f;
}

}  // namespace oil
