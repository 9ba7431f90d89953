#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "oil/eval.hpp"
#include "oil/mlp.hpp"
#include "oil/mlp_policy.hpp"
#include "oil/rollout.hpp"

namespace oil {

enum class EpsilonMode { single, multi };

std::string_view to_string(EpsilonMode mode);
EpsilonMode parse_epsilon_mode(std::string_view name);

struct OilParams {
  int rounds = 400;        // M observation rounds
  int horizon = 300;       // N rollout steps (200 for the uav)
  int max_episodes = 50;   // I rehearse episodes
  int act_steps = 60;      // J
  EpsilonMode epsilon_mode = EpsilonMode::multi;
  int mc_rollouts = 1;
  std::size_t batch_size = 64;
  double dropout = 0.5;
  double learning_rate = 1e-4;
  std::size_t dataset_capacity = 0;  // 0 = keep everything
  long step_budget = 0;              // simulator steps; 0 = unlimited

  static OilParams defaults_for(VehicleKind kind);
};

void validate(const OilParams& p);

struct ValueEstimate {
  int policy_id = 0;
  double value = 0.0;
  Trajectory trajectory;  // the first rollout
};

// Mean trajectory reward over mc_rollouts rollouts of up to `horizon` steps.
ValueEstimate estimate_value(Policy& policy, int policy_id, const Simulator& sim, const VehicleState& s1,
                             const OilParams& params, const RewardConfig& reward, std::uint64_t seed);

// Observe phase for a set of policies. Each entry is cloned, so prototypes are
// untouched. Runs the rollouts in parallel (OpenMP) when available.
std::vector<ValueEstimate> estimate_values(std::span<const Policy* const> policies, const Simulator& sim,
                                           const VehicleState& s1, const OilParams& params,
                                           const RewardConfig& reward, std::uint64_t seed);
// Sequential reference; must agree with estimate_values exactly.
std::vector<ValueEstimate> estimate_values_serial(std::span<const Policy* const> policies, const Simulator& sim,
                                                  const VehicleState& s1, const OilParams& params,
                                                  const RewardConfig& reward, std::uint64_t seed);

// argmax, ties to the lowest index. Throws ContractError on an empty list.
std::size_t select_critical_teacher(std::span<const double> values);
std::size_t select_critical_teacher(std::span<const ValueEstimate> values);

double advantage(double v_learner, double v_critical);
// multi: -0.1 * V_critical, single: 0.
double epsilon_threshold(EpsilonMode mode, double v_critical);

struct Learner {
  Mlp net;
  AdamState adam;

  static Learner create(const SimConfig& sim, std::uint64_t seed, double learning_rate);
};

struct RehearseResult {
  int episodes_used = 0;
  double final_advantage = 0.0;
  double final_learner_value = 0.0;
  std::size_t labels_added = 0;
  long sim_steps = 0;
};

struct RehearseContext {
  const Simulator& sim;
  const VehicleState& s1;
  double v_critic = 0.0;
  double epsilon = 0.0;
  int critic_id = 0;
  int round = 0;
  std::uint64_t value_seed = 0;  // seed of the observe-phase rollouts
};

// Rolls the learner out from s1, labels each visited state with the critic,
// and takes one minibatch step per simulator step. An episode is exactly
// `horizon` labelled steps; on a terminal state the vehicle respawns at s1.
// Stops once the re-estimated advantage exceeds epsilon or after
// max_episodes.
RehearseResult rehearse(Learner& learner, Policy& critic, const RehearseContext& ctx, const OilParams& params,
                        const RewardConfig& reward, Dataset& dataset, std::mt19937_64& rng);

struct ActResult {
  VehicleState state;
  double progress = 0.0;  // signed arc length from s1 to the returned state
  int steps = 0;
  bool terminated = false;
};

// Runs the learner for `steps` steps. On a terminal state the returned state
// is the respawn point at the nearest checkpoint behind it.
ActResult act(const Mlp& net, const Simulator& sim, const VehicleState& s1, int steps, std::uint64_t seed = 0);

struct RoundLog {
  int round = 0;
  int track = 0;
  double s1_arc = 0.0;
  double s1_speed = 0.0;
  double v_learner = 0.0;
  std::vector<double> teacher_values;
  int critic = 0;
  double advantage = 0.0;
  double epsilon = 0.0;
  bool rehearsed = false;
  int episodes_used = 0;
  double final_advantage = 0.0;
  std::size_t dataset_size = 0;
  std::size_t labels_added = 0;
  std::vector<int> label_sources;  // distinct label provenance of this round's additions
  long sim_steps = 0;              // cumulative
};

struct OilRun {
  Learner learner;
  Dataset dataset;
  std::vector<RoundLog> log;
  long sim_steps = 0;
};

using RoundCallback = std::function<void(const RoundLog&)>;

// Algorithm loop: observe -> rehearse (when the learner is behind) -> act,
// rotating across `tracks` one lap at a time. Throws Error if every teacher
// is terminal after its first step in the first round. `initial` replaces the
// freshly initialised learner (warm start).
OilRun train_oil(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg,
                 const std::vector<std::unique_ptr<Policy>>& teachers, const OilParams& params,
                 const RewardConfig& reward, std::uint64_t seed, const RoundCallback& on_round = {},
                 const Learner* initial = nullptr);

}  // namespace oil
