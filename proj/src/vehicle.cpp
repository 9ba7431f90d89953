#include "oil/vehicle.hpp"

#include <algorithm>
#include <string>

#include "oil/errors.hpp"

namespace oil {

std::string_view to_string(VehicleKind kind) { return kind == VehicleKind::car ? "car" : "uav"; }

VehicleKind parse_vehicle_kind(std::string_view name) {
  if (name == "car") return VehicleKind::car;
  if (name == "uav") return VehicleKind::uav;
  throw ConfigError("unknown vehicle kind '" + std::string(name) + "' (expected car or uav)");
}

ControlVector clamp_controls(ControlVector u, VehicleKind kind) {
  const std::size_t n = action_dim(kind);
  for (std::size_t i = 0; i < u.ch.size(); ++i) u.ch[i] = i < n ? std::clamp(u.ch[i], -1.0, 1.0) : 0.0;
  return u;
}

VehicleState step_car(const VehicleState& s, const ControlVector& raw, double dt, const CarParams& p) {
  const ControlVector u = clamp_controls(raw, VehicleKind::car);
  const double gas = u.ch[0];
  const double steer_cmd = u.ch[1] * p.max_steer;

  double yaw_rate = s.speed / p.wheelbase * std::tan(s.steer);
  if (s.speed > 0.0) {
    const double cap = p.lat_accel_limit / s.speed;
    yaw_rate = std::clamp(yaw_rate, -cap, cap);
  }

  VehicleState n = s;
  n.position.x += s.speed * std::cos(s.heading) * dt;
  n.position.y += s.speed * std::sin(s.heading) * dt;
  n.heading = wrap_angle(s.heading + yaw_rate * dt);
  n.speed = std::max(0.0, s.speed + (gas * p.max_accel - p.drag * s.speed) * dt);
  const double max_delta = p.steer_rate * dt;
  n.steer = s.steer + std::clamp(steer_cmd - s.steer, -max_delta, max_delta);
  return n;
}

VehicleState step_uav(const VehicleState& s, const ControlVector& raw, double dt, const UavParams& p) {
  const ControlVector u = clamp_controls(raw, VehicleKind::uav);
  const Vec2 fwd = heading_vector(s.heading);
  const Vec2 lat = left_normal(fwd);
  const Vec2 accel = fwd * (u.ch[0] * p.max_accel) + lat * (u.ch[1] * p.max_accel) - s.velocity * p.drag;

  VehicleState n = s;
  n.position = s.position + s.velocity * dt;
  n.velocity = s.velocity + accel * dt;
  n.heading = wrap_angle(s.heading + u.ch[2] * p.max_yaw_rate * dt);
  n.speed = norm(n.velocity);
  return n;
}

double vehicle_speed(const VehicleState& s, VehicleKind kind) {
  return kind == VehicleKind::car ? s.speed : norm(s.velocity);
}

VehicleState state_on_centerline(const Track& track, double s) {
  VehicleState v;
  v.position = track.point_at(s);
  const Vec2 t = track.tangent_at(s);
  v.heading = wrap_angle(std::atan2(t.y, t.x));
  return v;
}

}  // namespace oil
