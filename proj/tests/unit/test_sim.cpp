#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "oil/errors.hpp"
#include "oil/sim.hpp"
#include "oil/vehicle.hpp"
#include "support.hpp"

using namespace oil;

namespace {

ControlVector car_u(double gas, double steer) { return {{gas, steer, 0.0}}; }

// Circumradius of three points.
double circumradius(Vec2 a, Vec2 b, Vec2 c) {
  const double ab = norm(b - a), bc = norm(c - b), ca = norm(a - c);
  return ab * bc * ca / (2.0 * std::abs(cross(b - a, c - a)));
}

}  // namespace

TEST_CASE("car: straight throttle from rest keeps heading") {
  VehicleState s;
  s.heading = 0.7;
  CarParams p;
  for (int i = 0; i < 20; ++i) s = step_car(s, car_u(1.0, 0.0), 0.05, p);
  CHECK(s.heading == 0.7);
  CHECK(s.speed > 0.0);
  const Vec2 dir = heading_vector(0.7);
  CHECK(std::abs(cross(dir, s.position)) < 1e-12);
  CHECK(dot(dir, s.position) > 0.0);
}

TEST_CASE("car: zero gas slows down every step") {
  VehicleState s;
  s.speed = 10.0;
  CarParams p;
  for (int i = 0; i < 50; ++i) {
    const VehicleState n = step_car(s, car_u(0.0, 0.0), 0.05, p);
    CHECK(n.speed < s.speed);
    s = n;
  }
}

TEST_CASE("car: speed never goes negative") {
  VehicleState s;
  s.speed = 0.1;
  const VehicleState n = step_car(s, car_u(-1.0, 0.0), 0.05, {});
  CHECK(n.speed == 0.0);
}

TEST_CASE("car: constant steer and speed trace a circle of radius L / tan(delta)") {
  CarParams p;
  const double delta = 0.2;
  const double v = 5.0;
  const double expected = p.wheelbase / std::tan(delta);
  auto trace = [&](double dt, double duration) {
    VehicleState s;
    s.speed = v;
    s.steer = delta;
    // gas that exactly balances drag keeps v constant
    const ControlVector u = car_u(p.drag * v / p.max_accel, delta / p.max_steer);
    std::vector<Vec2> pts;
    const int n = static_cast<int>(std::lround(duration / dt));
    for (int i = 0; i <= n; ++i) {
      pts.push_back(s.position);
      s = step_car(s, u, dt, p);
    }
    CHECK(s.speed == doctest::Approx(v).epsilon(1e-9));
    return pts;
  };
  const double quarter = (std::numbers::pi / 2) * expected / v;
  const auto coarse = trace(0.05, 4 * quarter);
  const auto fine = trace(0.0005, 4 * quarter);
  const double r_coarse = circumradius(coarse.front(), coarse[coarse.size() / 4], coarse[coarse.size() / 2]);
  const double r_fine = circumradius(fine.front(), fine[fine.size() / 4], fine[fine.size() / 2]);
  CHECK(std::abs(r_fine - expected) / expected < 0.01);
  CHECK(std::abs(r_coarse - r_fine) / r_fine < 0.01);
}

TEST_CASE("car: yaw rate is capped by the lateral acceleration limit") {
  CarParams p;
  VehicleState s;
  s.speed = 20.0;
  s.steer = p.max_steer;
  const VehicleState n = step_car(s, car_u(0.0, 1.0), 0.05, p);
  const double yaw_rate = wrap_angle(n.heading - s.heading) / 0.05;
  CHECK(yaw_rate == doctest::Approx(p.lat_accel_limit / 20.0));
}

TEST_CASE("car: steering slews at steer_rate") {
  CarParams p;
  VehicleState s;
  const VehicleState n = step_car(s, car_u(0.0, 1.0), 0.05, p);
  CHECK(n.steer == doctest::Approx(p.steer_rate * 0.05));
}

TEST_CASE("dynamics are pure") {
  VehicleState s;
  s.speed = 3.0;
  s.heading = 1.0;
  s.velocity = {1.0, 2.0};
  const ControlVector u{{0.3, -0.4, 0.2}};
  CHECK(step_car(s, u, 0.05, {}) == step_car(s, u, 0.05, {}));
  CHECK(step_uav(s, u, 0.05, {}) == step_uav(s, u, 0.05, {}));
}

TEST_CASE("uav: zero action at rest is a fixed point") {
  VehicleState s;
  s.position = {3.0, -2.0};
  s.heading = 0.4;
  CHECK(step_uav(s, {}, 0.05, {}) == s);
}

TEST_CASE("uav: pure yaw turns in place") {
  UavParams p;
  VehicleState s;
  const VehicleState n = step_uav(s, {{0.0, 0.0, 0.5}}, 0.05, p);
  CHECK(n.position == s.position);
  CHECK(n.heading == doctest::Approx(0.5 * p.max_yaw_rate * 0.05));
}

TEST_CASE("uav: constant forward thrust reaches max_accel / drag") {
  UavParams p;
  VehicleState s;
  const double dt = 0.05;
  const int n = static_cast<int>(std::lround(10.0 / p.drag / dt));
  for (int i = 0; i < n; ++i) s = step_uav(s, {{1.0, 0.0, 0.0}}, dt, p);
  CHECK(std::abs(norm(s.velocity) - p.max_accel / p.drag) <= 0.01 * p.max_accel / p.drag);
}

TEST_CASE("controls are clamped and unused channels zeroed") {
  const ControlVector c = clamp_controls({{2.0, -3.0, 0.5}}, VehicleKind::car);
  CHECK(c.ch[0] == 1.0);
  CHECK(c.ch[1] == -1.0);
  CHECK(c.ch[2] == 0.0);
  const ControlVector u = clamp_controls({{0.2, -0.3, 7.0}}, VehicleKind::uav);
  CHECK(u.ch[2] == 1.0);
}

TEST_CASE("heading stays normalised") {
  VehicleState s;
  s.speed = 5.0;
  s.steer = 0.5;
  for (int i = 0; i < 2000; ++i) {
    s = step_car(s, car_u(0.2, 1.0), 0.05, {});
    REQUIRE(s.heading > -std::numbers::pi);
    REQUIRE(s.heading <= std::numbers::pi);
  }
}

TEST_CASE("waypoints in the identity frame") {
  const Track t = test::stadium();
  const WaypointVector wp = encode_waypoints(t, {{0.0, 0.0}, 0.0}, 5, 2.0);
  REQUIRE(wp.count() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(wp.along(i) == doctest::Approx(2.0 * (i + 1)).epsilon(1e-12));
    CHECK(std::abs(wp.lateral(i)) < 1e-12);
  }
}

TEST_CASE("waypoints for a vehicle heading +y") {
  const Track t = test::transformed(test::stadium(), std::numbers::pi / 2, {0.0, 0.0});
  const WaypointVector wp = encode_waypoints(t, {{0.0, 0.0}, std::numbers::pi / 2}, 1, 3.0);
  CHECK(wp.along(0) == doctest::Approx(3.0));
  CHECK(std::abs(wp.lateral(0)) < 1e-9);
}

TEST_CASE("waypoints match the rotation-matrix oracle") {
  const Track t = generate_track(21, {});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> arc(0.0, t.total_length()), off(-3.0, 3.0), ang(-3.1, 3.1);
  for (int i = 0; i < 200; ++i) {
    const double s = arc(rng);
    const Vec2 pos = t.point_at(s) + Vec2{off(rng), off(rng)};
    const double heading = ang(rng);
    const WaypointVector wp = encode_waypoints(t, {pos, heading}, 5, 5.0);
    const auto oracle = test::rotation_oracle(t, pos, heading, 5, 5.0);
    for (std::size_t j = 0; j < oracle.size(); ++j) CHECK(std::abs(wp.v[j] - oracle[j]) < 1e-9);
  }
}

TEST_CASE("waypoints are invariant under rigid motion") {
  const Track t = generate_track(22, {});
  const double angle = 0.9;
  const Vec2 shift{123.0, -45.0};
  const Track moved = test::transformed(t, angle, shift);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> arc(0.0, t.total_length()), off(-2.0, 2.0), ang(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Vec2 pos = t.point_at(arc(rng)) + Vec2{off(rng), off(rng)};
    const double heading = ang(rng);
    const Vec2 mpos{std::cos(angle) * pos.x - std::sin(angle) * pos.y + shift.x,
                    std::sin(angle) * pos.x + std::cos(angle) * pos.y + shift.y};
    const auto a = encode_waypoints(t, {pos, heading}, 5, 5.0);
    const auto b = encode_waypoints(moved, {mpos, wrap_angle(heading + angle)}, 5, 5.0);
    for (std::size_t j = 0; j < a.v.size(); ++j) CHECK(std::abs(a.v[j] - b.v[j]) < 1e-9);
  }
}

TEST_CASE("waypoint noise") {
  WaypointVector wp;
  for (int i = 1; i <= 5; ++i) {
    wp.v.push_back(5.0 * i);
    wp.v.push_back(0.3 * i);
  }
  SUBCASE("sigma 0 is the identity") { CHECK(add_waypoint_noise(wp, 0.0, 9).v == wp.v); }
  SUBCASE("same seed, same output") { CHECK(add_waypoint_noise(wp, 0.5, 9).v == add_waypoint_noise(wp, 0.5, 9).v); }
  SUBCASE("along offsets stay sorted") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      const auto n = add_waypoint_noise(wp, 4.0, seed);
      for (std::size_t i = 1; i < n.count(); ++i) CHECK(n.along(i) >= n.along(i - 1));
    }
  }
  SUBCASE("noise is unbiased") {
    const double sigma = 0.1;
    double sum = 0.0;
    long count = 0;
    for (std::uint64_t seed = 0; seed < 10000; ++seed) {
      const auto n = add_waypoint_noise(wp, sigma, seed);
      for (std::size_t j = 0; j < wp.v.size(); ++j) {
        sum += n.v[j] - wp.v[j];
        ++count;
      }
    }
    REQUIRE(count == 100000);
    CHECK(std::abs(sum / count) < 3.0 * sigma / std::sqrt(100000.0));
  }
}

TEST_CASE("terminal iff |e| > half_width") {
  const Track t = test::stadium();
  SimConfig cfg;
  const Simulator sim(t, cfg);
  const double hw = t.half_width;
  auto at = [&](double e) {
    VehicleState s;
    s.position = {50.0, e};
    return sim.measure(s);
  };
  CHECK_FALSE(at(hw).terminal);
  CHECK_FALSE(at(-hw).terminal);
  CHECK(at(std::nextafter(hw, 10.0)).terminal);
  CHECK(at(-std::nextafter(hw, 10.0)).terminal);
  CHECK(at(1.5).e == doctest::Approx(1.5));
}

TEST_CASE("step outcome fields") {
  const Track t = test::stadium();
  SimConfig cfg;
  const Simulator sim(t, cfg);
  VehicleState s = state_on_centerline(t, 10.0);
  s.speed = 8.0;
  const StepOutcome o = sim.step(s, car_u(0.0, 0.0));
  CHECK(o.s >= 0.0);
  CHECK(o.s < t.total_length());
  CHECK(o.v_forward == doctest::Approx(o.next_state.speed));
  CHECK(o.s == doctest::Approx(10.0 + 8.0 * 0.05));
}

TEST_CASE("simulator rejects dt outside (0, 0.1]") {
  const Track t = test::stadium();
  SimConfig cfg;
  cfg.dt = 0.2;
  CHECK_THROWS_AS(Simulator(t, cfg), ContractError);
  cfg.dt = 0.0;
  CHECK_THROWS_AS(Simulator(t, cfg), ContractError);
}

TEST_CASE("state features") {
  const Track t = test::stadium();
  SimConfig cfg;
  const Simulator sim(t, cfg);
  VehicleState s = state_on_centerline(t, 0.0);
  s.speed = 10.0;
  s.heading = 0.3;
  const Observation obs = sim.observe(s);
  const auto f = state_features(obs, cfg);
  REQUIRE(f.size() == feature_dim(cfg));
  CHECK(f.size() == 13);
  CHECK(f[0] == doctest::Approx(obs.waypoints.along(0) / cfg.feature_distance_scale));
  CHECK(f[10] == doctest::Approx(10.0 / cfg.feature_speed_scale));
  CHECK(f[11] == doctest::Approx(std::sin(0.3)));
  CHECK(f[12] == doctest::Approx(std::cos(0.3)));
}

TEST_CASE("state_on_centerline sits on the line at rest") {
  const Track t = generate_track(5, {});
  const VehicleState s = state_on_centerline(t, 123.4);
  CHECK(s.speed == 0.0);
  CHECK(norm(s.velocity) == 0.0);
  CHECK(std::abs(project_to_centerline(t, s.position).e) < 1e-9);
  CHECK(s.heading == doctest::Approx(test::tangent_angle(t, 123.4)));
}
