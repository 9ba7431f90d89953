#include "oil/teachers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oil/errors.hpp"

namespace oil {

PidOutput pid_step(const PidState& state, double error, double dt, const PidGains& g) {
  PidOutput out;
  out.state.integral = std::clamp(state.integral + error * dt, -g.integral_limit, g.integral_limit);
  out.state.prev_error = error;
  out.output = g.kp * error + g.ki * out.state.integral + g.kd * (error - state.prev_error) / dt;
  return out;
}

void validate(const TeacherSpec& spec) {
  if (!(spec.target_speed > 0.0)) throw ContractError("teacher '" + spec.label + "': target_speed must be > 0");
  if (spec.lookahead_index < 1) throw ContractError("teacher '" + spec.label + "': lookahead_index must be >= 1");
}

TeacherPolicy::TeacherPolicy(TeacherSpec spec) : spec_(std::move(spec)) { validate(spec_); }

ControlVector TeacherPolicy::act(const Observation& obs, const SimConfig& cfg) {
  const auto idx = static_cast<std::size_t>(spec_.lookahead_index - 1);
  if (idx >= obs.waypoints.count())
    throw ContractError("teacher '" + spec_.label + "' needs waypoint " + std::to_string(idx + 1));

  const double bearing = std::atan2(obs.waypoints.lateral(idx), obs.waypoints.along(idx));
  const auto steer = pid_step(steer_, bearing, cfg.dt, spec_.steer_pid);
  const auto speed = pid_step(speed_, spec_.target_speed - obs.speed, cfg.dt, spec_.speed_pid);
  steer_ = steer.state;
  speed_ = speed.state;

  ControlVector u;
  if (cfg.kind == VehicleKind::car) {
    u.ch = {speed.output, steer.output, 0.0};
  } else {
    const auto lateral = pid_step(lateral_, obs.waypoints.lateral(0), cfg.dt, spec_.lateral_pid);
    lateral_ = lateral.state;
    u.ch = {speed.output, lateral.output, steer.output};
  }
  return clamp_controls(u, cfg.kind);
}

namespace {

TeacherSpec car_teacher(std::string label, double target_speed, int lookahead, double kp, double kd) {
  TeacherSpec t;
  t.label = std::move(label);
  t.target_speed = target_speed;
  t.lookahead_index = lookahead;
  t.steer_pid = {kp, 0.0, kd, 1.0};
  t.speed_pid = {0.5, 0.05, 0.0, 5.0};
  return t;
}

TeacherSpec uav_teacher(std::string label, double target_speed, int lookahead, double yaw_kp, double lat_kp) {
  TeacherSpec t;
  t.label = std::move(label);
  t.target_speed = target_speed;
  t.lookahead_index = lookahead;
  t.steer_pid = {yaw_kp, 0.0, 0.0, 1.0};
  t.speed_pid = {0.4, 0.05, 0.0, 5.0};
  t.lateral_pid = {lat_kp, 0.0, 0.05, 1.0};
  return t;
}

}  // namespace

std::vector<TeacherSpec> make_default_ensemble(VehicleKind kind) {
  if (kind == VehicleKind::car) {
    return {
        car_teacher("teacher1-cautious", 8.0, 2, 1.6, 0.05),
        car_teacher("teacher2-fast-loose", 17.0, 4, 1.0, 0.0),
        car_teacher("teacher3-balanced", 11.0, 2, 1.4, 0.05),
        car_teacher("teacher4-quick", 13.0, 3, 1.2, 0.02),
        car_teacher("teacher5-twitchy", 15.0, 1, 3.0, 0.0),
    };
  }
  return {
      uav_teacher("teacher1-cautious", 6.0, 2, 1.8, 0.3),
      uav_teacher("teacher2-fast-loose", 14.0, 4, 1.0, 0.1),
      uav_teacher("teacher3-balanced", 9.0, 2, 1.5, 0.25),
      uav_teacher("teacher4-quick", 11.0, 3, 1.2, 0.2),
      uav_teacher("teacher5-twitchy", 12.0, 1, 3.0, 0.5),
  };
}

std::vector<std::size_t> parse_teacher_subset(const std::string& text, std::size_t count) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t pos = 0;
    long v = 0;
    try {
      v = std::stol(tok, &pos);
    } catch (const std::exception&) {
      throw ConfigError("bad teacher index '" + tok + "'");
    }
    if (pos != tok.size() || v < 1 || static_cast<std::size_t>(v) > count)
      throw ConfigError("teacher index '" + tok + "' out of range 1.." + std::to_string(count));
    const auto idx = static_cast<std::size_t>(v - 1);
    if (std::find(out.begin(), out.end(), idx) != out.end())
      throw ConfigError("teacher index " + tok + " listed twice");
    out.push_back(idx);
  }
  if (out.empty()) throw ConfigError("empty teacher subset");
  return out;
}

std::vector<std::unique_ptr<Policy>> make_teacher_policies(const std::vector<TeacherSpec>& specs) {
  std::vector<std::unique_ptr<Policy>> out;
  out.reserve(specs.size());
  for (const auto& s : specs) out.push_back(std::make_unique<TeacherPolicy>(s));
  return out;
}

}  // namespace oil
