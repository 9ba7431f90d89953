#include "oil/track_gen.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "oil/errors.hpp"
#include "oil/seed.hpp"

namespace oil {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PolarSpline {
  // Control angles/radii extended by one knot on each side for periodicity.
  std::vector<double> phi;
  std::vector<double> r;
  std::vector<double> slope;

  PolarSpline(const std::vector<double>& angles, const std::vector<double>& radii) {
    const std::size_t n = angles.size();
    phi.reserve(n + 3);
    r.reserve(n + 3);
    phi.push_back(angles[n - 1] - kTwoPi);
    r.push_back(radii[n - 1]);
    for (std::size_t i = 0; i < n; ++i) {
      phi.push_back(angles[i]);
      r.push_back(radii[i]);
    }
    phi.push_back(angles[0] + kTwoPi);
    r.push_back(radii[0]);
    phi.push_back(angles[1] + kTwoPi);
    r.push_back(radii[1]);

    // Catmull-Rom style slopes; knot 0 and the last knot reuse the periodic neighbours.
    slope.assign(phi.size(), 0.0);
    for (std::size_t i = 1; i + 1 < phi.size(); ++i)
      slope[i] = (r[i + 1] - r[i - 1]) / (phi[i + 1] - phi[i - 1]);
    slope.front() = slope[n];
    slope.back() = slope[2];
  }

  double operator()(double a) const {
    auto it = std::upper_bound(phi.begin(), phi.end(), a);
    std::size_t i = static_cast<std::size_t>(std::distance(phi.begin(), it));
    i = std::clamp<std::size_t>(i == 0 ? 0 : i - 1, 0, phi.size() - 2);
    const double h = phi[i + 1] - phi[i];
    const double t = (a - phi[i]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1;
    const double h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2;
    const double h11 = t3 - t2;
    return h00 * r[i] + h10 * h * slope[i] + h01 * r[i + 1] + h11 * h * slope[i + 1];
  }
};

std::vector<Vec2> resample_closed(const std::vector<Vec2>& dense, int samples) {
  std::vector<double> cum(dense.size() + 1, 0.0);
  for (std::size_t i = 0; i < dense.size(); ++i)
    cum[i + 1] = cum[i] + norm(dense[(i + 1) % dense.size()] - dense[i]);
  const double L = cum.back();

  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(samples) + 1);
  std::size_t seg = 0;
  for (int k = 0; k < samples; ++k) {
    const double s = L * k / samples;
    while (seg + 1 < cum.size() - 1 && cum[seg + 1] <= s) ++seg;
    const Vec2 a = dense[seg];
    const Vec2 b = dense[(seg + 1) % dense.size()];
    const double u = (s - cum[seg]) / (cum[seg + 1] - cum[seg]);
    out.push_back(a + (b - a) * u);
  }
  out.push_back(out.front());
  return out;
}

bool has_clearance(const Track& t) {
  const std::size_t n = t.segment_count();
  const double L = t.total_length();
  const double min_sep = 3.0 * t.half_width;
  const double arc_gap = 8.0 * t.half_width;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double gap = t.arc[j] - t.arc[i];
      gap = std::min(gap, L - gap);
      if (gap <= arc_gap) continue;
      if (norm(t.centerline[i] - t.centerline[j]) < min_sep) return false;
    }
  }
  return true;
}

}  // namespace

double min_turn_radius(const Track& track) {
  const std::size_t n = track.segment_count();
  const std::size_t w = std::max<std::size_t>(1, n / 200);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 a = track.centerline[(i + n - w) % n];
    const Vec2 b = track.centerline[i];
    const Vec2 c = track.centerline[(i + w) % n];
    const double area2 = std::abs(cross(b - a, c - a));
    if (area2 < 1e-12) continue;
    const double R = norm(b - a) * norm(c - b) * norm(c - a) / (2.0 * area2);
    best = std::min(best, R);
  }
  return best;
}

Track generate_track(std::uint64_t seed, const TrackGenParams& p) {
  if (p.control_points < 4) throw ContractError("control_points must be >= 4");
  if (!(p.radius_min > 0.0) || p.radius_max < p.radius_min)
    throw ContractError("radius range must be positive and ordered");
  if (p.samples < 32) throw ContractError("samples must be >= 32");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto n = static_cast<std::size_t>(p.control_points);
  const double step = kTwoPi / static_cast<double>(n);
  const std::size_t dense_n = static_cast<std::size_t>(p.samples) * 16;

  for (int attempt = 0; attempt < 100; ++attempt) {
    std::vector<double> angles(n), radii(n);
    for (std::size_t i = 0; i < n; ++i) {
      angles[i] = step * static_cast<double>(i) + p.angle_jitter * step * (unit(rng) - 0.5);
      radii[i] = p.radius_min + (p.radius_max - p.radius_min) * unit(rng);
    }
    const PolarSpline spline(angles, radii);

    std::vector<Vec2> dense;
    dense.reserve(dense_n);
    bool positive = true;
    for (std::size_t j = 0; j < dense_n; ++j) {
      const double a = kTwoPi * static_cast<double>(j) / static_cast<double>(dense_n);
      const double r = spline(a);
      if (!(r > 0.0)) {
        positive = false;
        break;
      }
      dense.push_back({r * std::cos(a), r * std::sin(a)});
    }
    if (!positive) continue;

    Track t = Track::from_centerline(resample_closed(dense, p.samples), p.half_width,
                                     p.checkpoint_spacing, seed);
    if (min_turn_radius(t) < p.min_turn_radius) continue;
    if (!has_clearance(t)) continue;
    return t;
  }
  throw GenerationError("track generation failed after 100 attempts (seed " + std::to_string(seed) +
                        ")");
}

std::vector<Track> generate_suite(std::uint64_t seed, int split, int count, const TrackGenParams& params) {
  if (count < 0) throw ConfigError("track count must be >= 0");
  std::vector<Track> out;
  for (int i = 0; i < count; ++i)
    out.push_back(generate_track(mix_seed(seed, static_cast<std::uint64_t>(1000 * split + i)), params));
  return out;
}

}  // namespace oil
