#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "oil/eval.hpp"
#include "oil/mlp.hpp"
#include "oil/oil.hpp"

namespace oil {

// Start states for trainer episodes: index j cycles through the tracks first,
// then through each track's checkpoints, always at rest on the centerline.
struct StartPoint {
  std::size_t track = 0;
  double s = 0.0;
};
StartPoint start_point(const std::vector<NamedTrack>& tracks, std::size_t index);

// ---- imitation (behaviour cloning, dagger) ----

struct ImitationParams {
  int episodes = 30;  // per iteration
  int horizon = 300;  // steps per episode; terminal states respawn at the episode start
  int train_steps = 30000;  // minibatch steps per iteration
  int iterations = 5;       // dagger only
  std::size_t batch_size = 64;
  double dropout = 0.5;
  double learning_rate = 1e-4;
  long step_budget = 0;  // caps simulator steps per iteration's collection; 0 = unlimited

  static ImitationParams defaults_for(VehicleKind kind);
};

void validate(const ImitationParams& p);

struct ImitationLog {
  int iteration = 0;
  std::size_t dataset_size = 0;
  long sim_steps = 0;  // cumulative
  int crashes = 0;     // terminal states during this iteration's collection
  double final_loss = 0.0;
};

struct ImitationRun {
  Learner learner;
  Dataset dataset;
  std::vector<ImitationLog> log;
  long sim_steps = 0;
};

using ImitationCallback = std::function<void(const ImitationLog&)>;

// Rolls out the teachers (episode e uses teacher e mod K), records
// (features, teacher action) pairs and fits them with minibatch Adam. Several
// teachers are pooled without any weighting.
ImitationRun train_bc(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg,
                      const std::vector<std::unique_ptr<Policy>>& teachers, const ImitationParams& params,
                      std::uint64_t seed, const ImitationCallback& on_iteration = {});

// Iteration 1 is train_bc. Later iterations roll out the learner, label the
// visited states with an expert (round-robin over teachers per episode),
// aggregate and keep training the same network.
ImitationRun train_dagger(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg,
                          const std::vector<std::unique_ptr<Policy>>& teachers, const ImitationParams& params,
                          std::uint64_t seed, const ImitationCallback& on_iteration = {});

// ---- ddpg ----

struct DdpgConfig {
  double e_norm = 15.0;
  double v_norm = 800.0;
  double beta = 0.0;
  double r_penalty = -0.2;
  std::optional<double> fixed_throttle = 0.5;  // car only
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double tau = 0.005;
  double gamma = 0.99;
  std::size_t buffer_capacity = 100000;
  std::size_t batch_size = 64;
  double noise_sigma = 0.1;  // decays linearly to noise_sigma_final over the run
  double noise_sigma_final = 0.01;
  long warmup_steps = 1000;  // no updates before the buffer holds this many
  int horizon = 300;         // max episode length

  static DdpgConfig defaults_for(VehicleKind kind);
};

void validate(const DdpgConfig& cfg, VehicleKind kind);

// Dense per-step reward. Pass unsigned lateral errors.
double ddpg_dense_reward(double e_n, double e_next, double v_f, bool terminal, const DdpgConfig& cfg);

struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  double reward = 0.0;
  std::vector<double> next_state;
  bool terminal = false;
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  // Overwrites the oldest transition once full.
  void add(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  // Uniform with replacement. Throws ContractError when empty.
  std::vector<std::size_t> sample(std::size_t n, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

// target <- tau * online + (1 - tau) * target
void soft_update(Mlp& target, const Mlp& online, double tau);

struct DdpgNets {
  Mlp actor;
  Mlp critic;
  Mlp target_actor;
  Mlp target_critic;
};

// Mean squared TD error of the critic against the target networks, and its
// gradient w.r.t. the critic parameters.
double critic_loss_and_gradient(const DdpgNets& nets, const ReplayBuffer& buffer,
                                std::span<const std::size_t> batch, double gamma, std::vector<double>& grad);

// -mean Q(s, actor(s)) plus a quadratic penalty on actor outputs beyond
// [-1, 1], and its gradient w.r.t. the actor parameters.
double actor_loss_and_gradient(const DdpgNets& nets, const ReplayBuffer& buffer,
                               std::span<const std::size_t> batch, std::vector<double>& grad);

struct DdpgEpisodeLog {
  int episode = 0;
  int track = 0;
  int steps = 0;
  double episode_return = 0.0;
  bool terminal = false;
  double noise_sigma = 0.0;
  double critic_loss = 0.0;  // last update in the episode, 0 before warmup
  long sim_steps = 0;        // cumulative
};

struct DdpgRun {
  DdpgNets nets;
  AdamState actor_adam;
  AdamState critic_adam;
  std::vector<DdpgEpisodeLog> log;
  long sim_steps = 0;
};

using DdpgCallback = std::function<void(const DdpgEpisodeLog&)>;

// Standard DDPG on the dense reward for `steps` simulator steps. Throws
// DivergenceError on a non-finite loss or parameter.
DdpgRun train_ddpg(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg, const DdpgConfig& cfg,
                   long steps, std::uint64_t seed, const DdpgCallback& on_episode = {});

}  // namespace oil
