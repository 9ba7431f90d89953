#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace oil {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr bool operator==(const Vec2&) const = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
// z-component of the 3D cross product; positive when b is left of a.
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
// Counter-clockwise quarter turn.
constexpr Vec2 left_normal(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 heading_vector(double heading) { return {std::cos(heading), std::sin(heading)}; }

// Maps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

// Closed course with a piecewise-linear centerline. `centerline.back()` repeats
// `centerline.front()`; `arc[i]` is the cumulative length up to point i.
struct Track {
  std::vector<Vec2> centerline;
  std::vector<double> arc;
  double half_width = 4.0;
  double checkpoint_spacing = 50.0;
  std::vector<double> checkpoints;
  std::uint64_t seed = 0;

  // Validates the polyline and derives arc lengths and checkpoints.
  // Throws ContractError on an invalid centerline.
  static Track from_centerline(std::vector<Vec2> points, double half_width,
                               double checkpoint_spacing, std::uint64_t seed = 0);

  double total_length() const { return arc.back(); }
  std::size_t segment_count() const { return centerline.size() - 1; }

  // Modulo total_length into [0, L).
  double wrap_s(double s) const;
  // Signed shortest arc distance from a to b, in (-L/2, L/2].
  double arc_delta(double from, double to) const;

  Vec2 point_at(double s) const;
  Vec2 tangent_at(double s) const;
};

struct Projection {
  double s = 0.0;  // arc length of the nearest centerline point
  double e = 0.0;  // signed distance, positive left of the tangent
  Vec2 tangent;
};

// Nearest point on the centerline polyline. Ties go to the smaller s.
Projection project_to_centerline(const Track& track, Vec2 position);

}  // namespace oil
