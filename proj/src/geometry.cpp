#include "oil/geometry.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "oil/errors.hpp"

namespace oil {

Track Track::from_centerline(std::vector<Vec2> points, double half_width,
                             double checkpoint_spacing, std::uint64_t seed) {
  if (points.size() < 32)
    throw ContractError("track centerline needs at least 32 points, got " +
                        std::to_string(points.size()));
  if (norm(points.back() - points.front()) > 1e-6)
    throw ContractError("track centerline is not closed");
  if (!(half_width > 0.0)) throw ContractError("track half_width must be positive");
  if (!(checkpoint_spacing > 0.0)) throw ContractError("checkpoint spacing must be positive");

  Track t;
  t.centerline = std::move(points);
  t.centerline.back() = t.centerline.front();
  t.half_width = half_width;
  t.checkpoint_spacing = checkpoint_spacing;
  t.seed = seed;

  t.arc.resize(t.centerline.size());
  t.arc[0] = 0.0;
  for (std::size_t i = 1; i < t.centerline.size(); ++i) {
    const double len = norm(t.centerline[i] - t.centerline[i - 1]);
    if (!(len > 0.0)) throw ContractError("track centerline has a repeated point at index " + std::to_string(i));
    t.arc[i] = t.arc[i - 1] + len;
  }

  const double L = t.total_length();
  const auto n_cp = std::max<long>(1, std::lround(L / checkpoint_spacing));
  t.checkpoints.reserve(static_cast<std::size_t>(n_cp));
  for (long k = 0; k < n_cp; ++k) t.checkpoints.push_back(static_cast<double>(k) * checkpoint_spacing);
  return t;
}

double Track::wrap_s(double s) const {
  const double L = total_length();
  s = std::fmod(s, L);
  if (s < 0.0) s += L;
  if (s >= L) s = 0.0;
  return s;
}

double Track::arc_delta(double from, double to) const {
  const double L = total_length();
  double d = std::fmod(to - from, L);
  if (d > 0.5 * L) d -= L;
  if (d <= -0.5 * L) d += L;
  return d;
}

namespace {

std::size_t segment_for(const Track& t, double s) {
  // arc is strictly increasing; find i with arc[i] <= s < arc[i+1].
  auto it = std::upper_bound(t.arc.begin(), t.arc.end(), s);
  auto i = static_cast<std::size_t>(std::distance(t.arc.begin(), it));
  i = i == 0 ? 0 : i - 1;
  return std::min(i, t.segment_count() - 1);
}

}  // namespace

Vec2 Track::point_at(double s) const {
  s = wrap_s(s);
  const std::size_t i = segment_for(*this, s);
  const double len = arc[i + 1] - arc[i];
  const double u = (s - arc[i]) / len;
  return centerline[i] + (centerline[i + 1] - centerline[i]) * u;
}

Vec2 Track::tangent_at(double s) const {
  s = wrap_s(s);
  const std::size_t i = segment_for(*this, s);
  const Vec2 d = centerline[i + 1] - centerline[i];
  return d * (1.0 / norm(d));
}

Projection project_to_centerline(const Track& track, Vec2 q) {
  double best_d2 = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  double best_u = 0.0;
  for (std::size_t i = 0; i < track.segment_count(); ++i) {
    const Vec2 a = track.centerline[i];
    const Vec2 ab = track.centerline[i + 1] - a;
    const double len2 = dot(ab, ab);
    const double u = std::clamp(dot(q - a, ab) / len2, 0.0, 1.0);
    const Vec2 p = a + ab * u;
    const Vec2 d = q - p;
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best_i = i;
      best_u = u;
    }
  }
  const Vec2 a = track.centerline[best_i];
  const Vec2 ab = track.centerline[best_i + 1] - a;
  const double len = norm(ab);
  const Vec2 tangent = ab * (1.0 / len);
  const Vec2 p = a + ab * best_u;

  Projection out;
  out.s = track.wrap_s(track.arc[best_i] + best_u * len);
  out.e = cross(tangent, q - p);
  out.tangent = tangent;
  return out;
}

}  // namespace oil
