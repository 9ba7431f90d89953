#pragma once

// Shared fixtures and independent oracles for the unit and acceptance tests.

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oil/eval.hpp"
#include "oil/geometry.hpp"
#include "oil/mlp.hpp"
#include "oil/sim.hpp"
#include "oil/track_gen.hpp"

namespace oil::test {

// Closed loop: straight from the origin along +x for `straight` metres, a
// left semicircle of radius r, the straight back, and another semicircle.
inline Track stadium(double straight = 100.0, double r = 30.0, double step = 0.5, double half_width = 4.0) {
  std::vector<Vec2> pts;
  const int ns = static_cast<int>(std::round(straight / step));
  const int nc = static_cast<int>(std::round(std::numbers::pi * r / step));
  for (int i = 0; i < ns; ++i) pts.push_back({straight * i / ns, 0.0});
  for (int i = 0; i < nc; ++i) {
    const double a = -std::numbers::pi / 2 + std::numbers::pi * i / nc;
    pts.push_back({straight + r * std::cos(a), r + r * std::sin(a)});
  }
  for (int i = 0; i < ns; ++i) pts.push_back({straight - straight * i / ns, 2 * r});
  for (int i = 0; i < nc; ++i) {
    const double a = std::numbers::pi / 2 + std::numbers::pi * i / nc;
    pts.push_back({r * std::cos(a), r + r * std::sin(a)});
  }
  pts.push_back(pts.front());
  return Track::from_centerline(pts, half_width, 50.0);
}

inline Track circle(double r, int n = 720, double half_width = 4.0) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    pts.push_back({r * std::cos(a), r * std::sin(a)});
  }
  pts.push_back(pts.front());
  return Track::from_centerline(pts, half_width, 50.0);
}

inline Track transformed(const Track& t, double angle, Vec2 shift) {
  const double c = std::cos(angle), s = std::sin(angle);
  std::vector<Vec2> pts;
  for (const auto& p : t.centerline) pts.push_back({c * p.x - s * p.y + shift.x, s * p.x + c * p.y + shift.y});
  pts.back() = pts.front();
  return Track::from_centerline(pts, t.half_width, t.checkpoint_spacing, t.seed);
}

inline double tangent_angle(const Track& t, double s) {
  const Vec2 tg = t.tangent_at(s);
  return std::atan2(tg.y, tg.x);
}

// Dynamics that glide along the centerline at a fixed speed, ignoring the
// controls. A perfect follower.
inline DynamicsFn rail(double speed) {
  return [speed](const Track& track, const VehicleState& s, const ControlVector&, double dt) {
    const double arc = track.wrap_s(project_to_centerline(track, s.position).s + speed * dt);
    VehicleState n;
    n.position = track.point_at(arc);
    n.heading = tangent_angle(track, arc);
    n.speed = speed;
    n.velocity = heading_vector(n.heading) * speed;
    return n;
  };
}

// Rail that stalls (speed zero) while the arc position lies in any of the
// given [from, to) windows.
inline DynamicsFn rail_with_stalls(double speed, std::vector<std::pair<double, double>> stalls) {
  return [speed, stalls](const Track& track, const VehicleState& s, const ControlVector& u, double dt) {
    const double arc = project_to_centerline(track, s.position).s;
    for (const auto& [a, b] : stalls)
      if (arc >= a && arc < b) {
        VehicleState n = s;
        n.speed = 0.0;
        n.velocity = {};
        return n;
      }
    return rail(speed)(track, s, u, dt);
  };
}

// Dense sampling of the polyline at `resolution` metres: nearest sample.
struct DenseHit {
  double s = 0.0;
  double dist = std::numeric_limits<double>::infinity();
};

inline std::vector<std::pair<double, Vec2>> dense_samples(const Track& t, double resolution) {
  std::vector<std::pair<double, Vec2>> out;
  for (std::size_t i = 0; i + 1 < t.centerline.size(); ++i) {
    const Vec2 a = t.centerline[i], b = t.centerline[i + 1];
    const double len = t.arc[i + 1] - t.arc[i];
    const int n = std::max(1, static_cast<int>(std::ceil(len / resolution)));
    for (int k = 0; k < n; ++k) {
      const double f = static_cast<double>(k) / n;
      out.push_back({t.arc[i] + f * len, a + (b - a) * f});
    }
  }
  return out;
}

inline DenseHit dense_nearest(const std::vector<std::pair<double, Vec2>>& samples, Vec2 q) {
  DenseHit best;
  for (const auto& [s, p] : samples) {
    const double d = norm(p - q);
    if (d < best.dist) best = {s, d};
  }
  return best;
}

// Waypoints via an explicit 2x2 rotation matrix R(-heading) applied to the
// world offsets.
inline std::vector<double> rotation_oracle(const Track& t, Vec2 pos, double heading, int k, double spacing) {
  const double s0 = project_to_centerline(t, pos).s;
  const double r00 = std::cos(-heading), r01 = -std::sin(-heading);
  const double r10 = std::sin(-heading), r11 = std::cos(-heading);
  std::vector<double> out;
  for (int i = 1; i <= k; ++i) {
    const Vec2 d = t.point_at(t.wrap_s(s0 + i * spacing)) - pos;
    out.push_back(r00 * d.x + r01 * d.y);
    out.push_back(r10 * d.x + r11 * d.y);
  }
  return out;
}

// Independent affine+tanh chain over the documented parameter layout.
inline std::vector<double> reference_forward(const Mlp& net, std::vector<double> x) {
  const auto p = net.params();
  const auto& dims = net.dims();
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::vector<double> y(dims[l + 1]);
    for (std::size_t o = 0; o < dims[l + 1]; ++o) {
      double z = p[net.bias_offset(l) + o];
      for (std::size_t i = 0; i < dims[l]; ++i) z += p[net.weight_offset(l) + o * dims[l] + i] * x[i];
      y[o] = l + 2 < dims.size() ? std::tanh(z) : z;
    }
    x = std::move(y);
  }
  return x;
}

// Max relative error between an analytic gradient and central differences of
// `loss` w.r.t. every entry of `params`.
inline double max_fd_rel_error(std::span<double> params, const std::vector<double>& analytic,
                               const std::function<double()>& loss, double h = 1e-5) {
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = loss();
    params[i] = keep - h;
    const double down = loss();
    params[i] = keep;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), 1e-8});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  return worst;
}

inline std::vector<NamedTrack> named(const std::vector<Track>& tracks, const std::string& prefix) {
  std::vector<NamedTrack> out;
  for (std::size_t i = 0; i < tracks.size(); ++i) out.push_back({prefix + std::to_string(i), tracks[i]});
  return out;
}

// The suites `oil gen-tracks` writes with its default settings.
inline std::vector<NamedTrack> default_train_suite() { return named(generate_suite(1, 0, 6, {}), "train"); }
inline std::vector<NamedTrack> default_test_suite() { return named(generate_suite(1, 1, 4, {}), "test"); }

}  // namespace oil::test
