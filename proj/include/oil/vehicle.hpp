#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "oil/geometry.hpp"

namespace oil {

enum class VehicleKind { car, uav };

std::string_view to_string(VehicleKind kind);
VehicleKind parse_vehicle_kind(std::string_view name);

// Both models share one state record. The car uses `speed` and `steer`; the
// planar UAV uses the world-frame `velocity`.
struct VehicleState {
  Vec2 position;
  double heading = 0.0;  // (-pi, pi]
  double speed = 0.0;    // car, >= 0
  Vec2 velocity;         // uav
  double steer = 0.0;    // car steering angle, rad

  bool operator==(const VehicleState&) const = default;
};

// car: ch[0] gas/brake G, ch[1] steering S.
// uav: ch[0] forward thrust, ch[1] lateral thrust, ch[2] yaw rate.
struct ControlVector {
  std::array<double, 3> ch{};

  bool operator==(const ControlVector&) const = default;
};

constexpr std::size_t action_dim(VehicleKind kind) { return kind == VehicleKind::car ? 2 : 3; }

// Clamps every channel to [-1, 1]; channels past action_dim are zeroed.
ControlVector clamp_controls(ControlVector u, VehicleKind kind);

struct CarParams {
  double wheelbase = 2.7;
  double max_steer = 0.5;
  double max_accel = 4.0;
  double drag = 0.12;
  double steer_rate = 1.2;
  // Yaw rate is capped at lat_accel_limit / v, so corners taken too fast run
  // wide. Set to infinity for a pure kinematic bicycle.
  double lat_accel_limit = 8.0;
};

struct UavParams {
  double max_accel = 6.0;
  double max_yaw_rate = 2.0;
  double drag = 0.4;
};

// Kinematic bicycle, explicit Euler. Pure.
VehicleState step_car(const VehicleState& s, const ControlVector& u, double dt, const CarParams& p);

// Planar point mass with body-frame thrust and yaw, explicit Euler. Pure.
VehicleState step_uav(const VehicleState& s, const ControlVector& u, double dt, const UavParams& p);

// Scalar speed of either model.
double vehicle_speed(const VehicleState& s, VehicleKind kind);

// Vehicle placed on the centerline at arc length s, aligned with the tangent, at rest.
VehicleState state_on_centerline(const Track& track, double s);

}  // namespace oil
