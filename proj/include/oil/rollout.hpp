#pragma once

#include <cstdint>
#include <vector>

#include "oil/policy.hpp"
#include "oil/seed.hpp"
#include "oil/sim.hpp"

namespace oil {

struct TrajectoryStep {
  VehicleState state;  // state the action was taken in
  ControlVector action;
  StepOutcome outcome;
};

struct Trajectory {
  VehicleState start;
  double start_s = 0.0;
  std::vector<TrajectoryStep> steps;
  bool terminal = false;

  // Arc-length progress along the centerline, wraparound-aware.
  double progress(const Track& track) const;
  double abs_error_sum() const;
};

enum class RewardMode { driving, uav };

struct RewardConfig {
  RewardMode mode = RewardMode::driving;
  double alpha = 0.5;
  double r_penalty = -15000.0;
  // Only the per-step sum of the uav reward is discounted; the driving score is
  // a ratio over the whole trajectory.
  double gamma = 1.0;
};

void validate(const RewardConfig& cfg);

// zeta / (alpha * sum|e| + 1), plus r_penalty if the trajectory ended terminal.
double reward_driving(double zeta, double abs_error_sum, bool terminal, const RewardConfig& cfg);
double reward_driving(const Trajectory& traj, const Track& track, const RewardConfig& cfg);

// sum of forward speeds, plus r_penalty if terminal.
double reward_uav(const std::vector<double>& forward_speeds, bool terminal, const RewardConfig& cfg);
double reward_uav(const Trajectory& traj, const RewardConfig& cfg);

double trajectory_reward(const Trajectory& traj, const Track& track, const RewardConfig& cfg);

// Steps the policy from `start` for up to `horizon` steps, stopping at the
// first terminal state. The policy is reset first. Actions are clamped.
Trajectory rollout(Policy& policy, const Simulator& sim, const VehicleState& start, int horizon,
                   std::uint64_t seed);

}  // namespace oil
