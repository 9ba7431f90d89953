#include "oil/rollout.hpp"

#include <cmath>

#include "oil/errors.hpp"

namespace oil {

double Trajectory::progress(const Track& track) const {
  double zeta = 0.0;
  double prev = start_s;
  for (const auto& st : steps) {
    zeta += track.arc_delta(prev, st.outcome.s);
    prev = st.outcome.s;
  }
  return zeta;
}

double Trajectory::abs_error_sum() const {
  double sum = 0.0;
  for (const auto& st : steps) sum += std::abs(st.outcome.e);
  return sum;
}

void validate(const RewardConfig& cfg) {
  if (!(cfg.r_penalty < 0.0)) throw ConfigError("r_penalty must be negative");
  if (!(cfg.alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(cfg.gamma >= 0.0 && cfg.gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
}

double reward_driving(double zeta, double abs_error_sum, bool terminal, const RewardConfig& cfg) {
  const double r = zeta / (cfg.alpha * abs_error_sum + 1.0);
  return terminal ? r + cfg.r_penalty : r;
}

double reward_driving(const Trajectory& traj, const Track& track, const RewardConfig& cfg) {
  return reward_driving(traj.progress(track), traj.abs_error_sum(), traj.terminal, cfg);
}

double reward_uav(const std::vector<double>& forward_speeds, bool terminal, const RewardConfig& cfg) {
  double sum = 0.0;
  double w = 1.0;
  for (double v : forward_speeds) {
    sum += w * v;
    w *= cfg.gamma;
  }
  return terminal ? sum + cfg.r_penalty : sum;
}

double reward_uav(const Trajectory& traj, const RewardConfig& cfg) {
  std::vector<double> v;
  v.reserve(traj.steps.size());
  for (const auto& st : traj.steps) v.push_back(st.outcome.v_forward);
  return reward_uav(v, traj.terminal, cfg);
}

double trajectory_reward(const Trajectory& traj, const Track& track, const RewardConfig& cfg) {
  return cfg.mode == RewardMode::driving ? reward_driving(traj, track, cfg) : reward_uav(traj, cfg);
}

Trajectory rollout(Policy& policy, const Simulator& sim, const VehicleState& start, int horizon,
                   std::uint64_t seed) {
  if (horizon < 1) throw ContractError("rollout horizon must be >= 1");
  Trajectory traj;
  traj.start = start;
  traj.start_s = project_to_centerline(sim.track(), start.position).s;
  traj.steps.reserve(static_cast<std::size_t>(horizon));

  policy.reset();
  VehicleState s = start;
  for (int n = 0; n < horizon; ++n) {
    const Observation obs = sim.observe(s, mix_seed(seed, static_cast<std::uint64_t>(n)));
    const ControlVector u = clamp_controls(policy.act(obs, sim.config()), sim.kind());
    StepOutcome out = sim.step(s, u);
    traj.steps.push_back({s, u, out});
    s = out.next_state;
    if (out.terminal) {
      traj.terminal = true;
      break;
    }
  }
  return traj;
}

}  // namespace oil
