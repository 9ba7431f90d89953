#pragma once

#include <string>
#include <vector>

#include "oil/policy.hpp"

namespace oil {

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integral_limit = 1.0;
};

struct PidState {
  double integral = 0.0;
  double prev_error = 0.0;
};

struct PidOutput {
  double output = 0.0;
  PidState state;
};

// output = kp*e + ki*I + kd*(e - e_prev)/dt, where I = clamp(I + e*dt, +-integral_limit).
PidOutput pid_step(const PidState& state, double error, double dt, const PidGains& gains);

struct TeacherSpec {
  std::string label;
  PidGains steer_pid;    // on the bearing of the look-ahead waypoint
  PidGains speed_pid;    // on target_speed - speed
  PidGains lateral_pid;  // uav only, on the lateral offset of the first waypoint
  double target_speed = 10.0;
  int lookahead_index = 2;  // 1-based
};

// Throws ContractError when target_speed <= 0 or lookahead_index < 1.
void validate(const TeacherSpec& spec);

class TeacherPolicy final : public Policy {
 public:
  explicit TeacherPolicy(TeacherSpec spec);

  void reset() override { steer_ = speed_ = lateral_ = {}; }
  ControlVector act(const Observation& obs, const SimConfig& cfg) override;
  std::unique_ptr<Policy> clone() const override { return std::make_unique<TeacherPolicy>(*this); }
  std::string name() const override { return spec_.label; }

  const TeacherSpec& spec() const { return spec_; }

 private:
  TeacherSpec spec_;
  PidState steer_;
  PidState speed_;
  PidState lateral_;
};

// Five hand-tuned teachers spanning slow/precise to fast/crash-prone.
std::vector<TeacherSpec> make_default_ensemble(VehicleKind kind);

// Parses "1,3,4" (1-based) into zero-based indices; validates against `count`.
std::vector<std::size_t> parse_teacher_subset(const std::string& text, std::size_t count);

std::vector<std::unique_ptr<Policy>> make_teacher_policies(const std::vector<TeacherSpec>& specs);

}  // namespace oil
