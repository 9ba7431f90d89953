#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oil/errors.hpp"
#include "oil/geometry.hpp"
#include "oil/track_gen.hpp"
#include "support.hpp"

using namespace oil;

namespace {

Track square(double side = 10.0, int per_side = 10) {
  std::vector<Vec2> pts;
  const Vec2 corners[] = {{0, 0}, {side, 0}, {side, side}, {0, side}};
  for (int c = 0; c < 4; ++c) {
    const Vec2 a = corners[c], b = corners[(c + 1) % 4];
    for (int i = 0; i < per_side; ++i) pts.push_back(a + (b - a) * (static_cast<double>(i) / per_side));
  }
  pts.push_back(pts.front());
  return Track::from_centerline(pts, 1.0, 5.0);
}

}  // namespace

TEST_CASE("projection onto an axis-aligned segment") {
  const Track t = square();
  const Projection p = project_to_centerline(t, {3.0, 2.0});
  CHECK(p.s == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(p.e == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(p.tangent.x == doctest::Approx(1.0));
  CHECK(p.tangent.y == doctest::Approx(0.0));
}

TEST_CASE("projection of a centerline point has zero error") {
  const Track t = square();
  CHECK(project_to_centerline(t, {4.5, 0.0}).e == 0.0);
  CHECK(std::abs(project_to_centerline(t, {10.0, 7.25}).e) < 1e-12);
}

TEST_CASE("projection ties go to the smaller arc length") {
  // (5, 5) is equidistant from all four sides of the square.
  const Track t = square();
  CHECK(project_to_centerline(t, {5.0, 5.0}).s == doctest::Approx(5.0));
}

TEST_CASE("projection matches a 1 mm dense-sampling oracle") {
  const Track t = generate_track(11, {});
  const auto samples = test::dense_samples(t, 0.001);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> arc(0.0, t.total_length());
  std::uniform_real_distribution<double> off(-t.half_width, t.half_width);
  double worst_s = 0.0, worst_d = 0.0;
  for (int q = 0; q < 200; ++q) {
    const double s = arc(rng);
    const Vec2 query = t.point_at(s) + left_normal(t.tangent_at(s)) * off(rng);
    const Projection p = project_to_centerline(t, query);
    const test::DenseHit hit = test::dense_nearest(samples, query);
    worst_s = std::max(worst_s, std::abs(t.arc_delta(hit.s, p.s)));
    worst_d = std::max(worst_d, std::abs(std::abs(p.e) - hit.dist));
  }
  CHECK(worst_s < 0.002);
  CHECK(worst_d < 0.002);
}

TEST_CASE("point_at followed by projection recovers s") {
  const Track t = generate_track(3, {});
  const double spacing = t.total_length() / static_cast<double>(t.segment_count());
  for (double s = 0.0; s < t.total_length(); s += 7.3) {
    const Projection p = project_to_centerline(t, t.point_at(s));
    CHECK(std::abs(t.arc_delta(s, p.s)) <= spacing);
    CHECK(std::abs(p.e) < 1e-9);
  }
}

TEST_CASE("wrap_s and arc_delta are modulo the loop length") {
  const Track t = test::circle(50.0);
  const double L = t.total_length();
  CHECK(t.wrap_s(L + 1.0) == doctest::Approx(1.0));
  CHECK(t.wrap_s(-1.0) == doctest::Approx(L - 1.0));
  CHECK(t.arc_delta(L - 1.0, 1.0) == doctest::Approx(2.0));
  CHECK(t.arc_delta(1.0, L - 1.0) == doctest::Approx(-2.0));
}

TEST_CASE("a lap of arc progress sums to the track length") {
  const Track t = generate_track(4, {});
  double sum = 0.0;
  double prev = 0.0;
  for (double s = 1.0; s <= t.total_length() + 1e-9; s += 1.0) {
    const double now = project_to_centerline(t, t.point_at(t.wrap_s(s))).s;
    sum += t.arc_delta(prev, now);
    prev = now;
  }
  sum += t.arc_delta(prev, 0.0);
  const double spacing = t.total_length() / static_cast<double>(t.segment_count());
  CHECK(std::abs(sum - t.total_length()) <= spacing);
}

TEST_CASE("generated tracks satisfy the track invariants") {
  for (std::uint64_t seed : {1u, 2u, 3u, 99u}) {
    const Track t = generate_track(seed, {});
    CHECK(t.centerline.size() >= 32);
    CHECK(norm(t.centerline.front() - t.centerline.back()) <= 1e-6);
    for (std::size_t i = 1; i < t.arc.size(); ++i) CHECK(t.arc[i] > t.arc[i - 1]);
    CHECK(t.arc.back() == t.total_length());
    CHECK(t.half_width > 0.0);
    const double step = t.total_length() / static_cast<double>(t.segment_count());
    CHECK(t.checkpoints.front() == 0.0);
    for (std::size_t i = 1; i < t.checkpoints.size(); ++i)
      CHECK(std::abs(t.checkpoints[i] - t.checkpoints[i - 1] - t.checkpoint_spacing) <= step);
    CHECK(min_turn_radius(t) >= TrackGenParams{}.min_turn_radius);
  }
}

TEST_CASE("track generation is deterministic per seed") {
  const Track a = generate_track(7, {});
  const Track b = generate_track(7, {});
  CHECK(a.centerline == b.centerline);
  CHECK(a.arc == b.arc);
  CHECK(a.checkpoints == b.checkpoints);
  CHECK(generate_track(8, {}).centerline != a.centerline);
}

TEST_CASE("zero perturbation gives a circle") {
  TrackGenParams p;
  p.control_points = 4;
  p.radius_min = p.radius_max = 60.0;
  p.angle_jitter = 0.0;
  const Track t = generate_track(1, p);
  CHECK(std::abs(t.total_length() - 2.0 * std::numbers::pi * 60.0) <= 0.005 * 2.0 * std::numbers::pi * 60.0);
}

TEST_CASE("a 400 m loop with 50 m spacing has 8 checkpoints") {
  TrackGenParams p;
  p.control_points = 4;
  p.radius_min = p.radius_max = 400.0 / (2.0 * std::numbers::pi);
  p.angle_jitter = 0.0;
  const Track t = generate_track(1, p);
  CHECK(t.total_length() == doctest::Approx(400.0).epsilon(0.005));
  CHECK(t.checkpoints.size() == 8);
}

TEST_CASE("impossible constraints raise a generation failure") {
  TrackGenParams p;
  p.min_turn_radius = 1000.0;
  CHECK_THROWS_AS(generate_track(1, p), GenerationError);
}

TEST_CASE("invalid generation parameters are rejected") {
  TrackGenParams p;
  p.control_points = 3;
  CHECK_THROWS_AS(generate_track(1, p), ContractError);
  p = {};
  p.samples = 16;
  CHECK_THROWS_AS(generate_track(1, p), ContractError);
  p = {};
  p.radius_min = -1.0;
  CHECK_THROWS_AS(generate_track(1, p), ContractError);
}

TEST_CASE("from_centerline validates the polyline") {
  std::vector<Vec2> few{{0, 0}, {1, 0}, {1, 1}, {0, 0}};
  CHECK_THROWS_AS(Track::from_centerline(few, 1.0, 5.0), ContractError);
  auto open = test::circle(20.0).centerline;
  open.back() = {0.0, 0.0};
  CHECK_THROWS_AS(Track::from_centerline(open, 1.0, 5.0), ContractError);
  CHECK_THROWS_AS(Track::from_centerline(test::circle(20.0).centerline, 0.0, 5.0), ContractError);
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(std::numbers::pi));
  CHECK(wrap_angle(3.0 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
  CHECK(wrap_angle(0.25) == 0.25);
}

TEST_CASE("generate_suite uses split-specific seeds") {
  const auto train = generate_suite(1, 0, 2, {});
  const auto test_suite = generate_suite(1, 1, 2, {});
  CHECK(train.size() == 2);
  CHECK(train[0].centerline != test_suite[0].centerline);
  CHECK(generate_suite(1, 0, 0, {}).empty());
}
