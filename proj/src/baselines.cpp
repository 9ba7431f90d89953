#include "oil/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "oil/errors.hpp"

namespace oil {

StartPoint start_point(const std::vector<NamedTrack>& tracks, std::size_t index) {
  if (tracks.empty()) throw ContractError("no tracks to start from");
  StartPoint p;
  p.track = index % tracks.size();
  const auto& cps = tracks[p.track].track.checkpoints;
  p.s = cps[(index / tracks.size()) % cps.size()];
  return p;
}

// ---- imitation ----

ImitationParams ImitationParams::defaults_for(VehicleKind kind) {
  ImitationParams p;
  p.horizon = kind == VehicleKind::car ? 300 : 200;
  return p;
}

void validate(const ImitationParams& p) {
  if (p.episodes < 1 || p.horizon < 1 || p.iterations < 1)
    throw ConfigError("episodes, horizon and iterations must be >= 1");
  if (p.train_steps < 0) throw ConfigError("train_steps must be >= 0");
  if (p.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (p.dropout < 0.0 || p.dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
  if (!(p.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

namespace {

struct CollectStats {
  long steps = 0;
  int crashes = 0;
};

// Labels every visited state with the episode's expert. `driver` null means
// the expert drives itself.
CollectStats collect(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg,
                     const std::vector<std::unique_ptr<Policy>>& teachers, const ImitationParams& params,
                     std::size_t first_episode, int episodes, std::uint64_t seed, int iteration, const Mlp* driver,
                     Dataset& dataset) {
  const auto adim = action_dim(sim_cfg.kind);
  CollectStats st;
  for (int e = 0; e < episodes; ++e) {
    const std::size_t global = first_episode + static_cast<std::size_t>(e);
    const StartPoint sp = start_point(tracks, global);
    const Track& track = tracks[sp.track].track;
    const Simulator sim(track, sim_cfg);
    const std::size_t k = global % teachers.size();
    auto expert = teachers[k]->clone();
    expert->reset();
    const VehicleState start = state_on_centerline(track, sp.s);
    VehicleState state = start;
    const std::uint64_t ep_seed = mix_seed(seed, global);
    for (int n = 0; n < params.horizon; ++n) {
      const Observation obs = sim.observe(state, mix_seed(ep_seed, static_cast<std::uint64_t>(n)));
      const ControlVector label = clamp_controls(expert->act(obs, sim_cfg), sim_cfg.kind);
      const auto features = state_features(obs, sim_cfg);
      dataset.add(features, std::span<const double>(label.ch.data(), adim), static_cast<int>(k), iteration);
      ControlVector u = label;
      if (driver) u = clamp_controls(controls_from_output(driver->forward(features), sim_cfg.kind), sim_cfg.kind);
      const StepOutcome out = sim.step(state, u);
      ++st.steps;
      if (out.terminal) {
        ++st.crashes;
        state = start;
        expert->reset();
      } else {
        state = out.next_state;
      }
    }
  }
  return st;
}

double fit(Learner& learner, const Dataset& data, const ImitationParams& params, std::mt19937_64& rng) {
  double loss = 0.0;
  for (int i = 0; i < params.train_steps; ++i)
    loss = train_minibatch(learner.net, learner.adam, data.sample(params.batch_size, rng), params.dropout, rng);
  return loss;
}

ImitationRun run_imitation(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg,
                           const std::vector<std::unique_ptr<Policy>>& teachers, const ImitationParams& params,
                           std::uint64_t seed, int iterations, const ImitationCallback& on_iteration) {
  validate(params);
  if (tracks.empty()) throw ConfigError("imitation needs at least one training track");
  if (teachers.empty()) throw ConfigError("imitation needs at least one teacher");

  int episodes = params.episodes;
  if (params.step_budget > 0)
    episodes = static_cast<int>(std::clamp<long>(params.step_budget / params.horizon, 1, params.episodes));

  ImitationRun run;
  run.learner = Learner::create(sim_cfg, seed, params.learning_rate);
  run.dataset = Dataset(feature_dim(sim_cfg), action_dim(sim_cfg.kind));
  std::mt19937_64 rng(mix_seed(seed, 0xBC));

  for (int it = 1; it <= iterations; ++it) {
    const Mlp* driver = it == 1 ? nullptr : &run.learner.net;
    const std::size_t first = static_cast<std::size_t>(it - 1) * static_cast<std::size_t>(episodes);
    const CollectStats st = collect(tracks, sim_cfg, teachers, params, first, episodes, seed, it, driver, run.dataset);
    run.sim_steps += st.steps;

    ImitationLog log;
    log.iteration = it;
    log.crashes = st.crashes;
    log.final_loss = fit(run.learner, run.dataset, params, rng);
    log.dataset_size = run.dataset.size();
    log.sim_steps = run.sim_steps;
    if (on_iteration) on_iteration(log);
    run.log.push_back(log);
  }
  return run;
}

}  // namespace

ImitationRun train_bc(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg,
                      const std::vector<std::unique_ptr<Policy>>& teachers, const ImitationParams& params,
                      std::uint64_t seed, const ImitationCallback& on_iteration) {
  return run_imitation(tracks, sim_cfg, teachers, params, seed, 1, on_iteration);
}

ImitationRun train_dagger(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg,
                          const std::vector<std::unique_ptr<Policy>>& teachers, const ImitationParams& params,
                          std::uint64_t seed, const ImitationCallback& on_iteration) {
  return run_imitation(tracks, sim_cfg, teachers, params, seed, params.iterations, on_iteration);
}

// ---- ddpg ----

DdpgConfig DdpgConfig::defaults_for(VehicleKind kind) {
  DdpgConfig c;
  if (kind == VehicleKind::uav) {
    c.fixed_throttle.reset();
    c.beta = 1.0;
    c.horizon = 200;
  }
  return c;
}

void validate(const DdpgConfig& c, VehicleKind kind) {
  if (!(c.e_norm > 0.0) || !(c.v_norm > 0.0)) throw ConfigError("e_norm and v_norm must be positive");
  if (!(c.actor_lr > 0.0) || !(c.critic_lr > 0.0)) throw ConfigError("ddpg learning rates must be positive");
  if (!(c.tau > 0.0 && c.tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (c.buffer_capacity < 1 || c.batch_size < 1) throw ConfigError("buffer capacity and batch size must be >= 1");
  if (c.noise_sigma < 0.0 || c.noise_sigma_final < 0.0) throw ConfigError("noise scales must be >= 0");
  if (c.horizon < 1) throw ConfigError("ddpg horizon must be >= 1");
  if (c.fixed_throttle && kind != VehicleKind::car) throw ConfigError("a fixed throttle only applies to the car");
  if (c.fixed_throttle && std::abs(*c.fixed_throttle) > 1.0) throw ConfigError("fixed throttle must lie in [-1, 1]");
}

double ddpg_dense_reward(double e_n, double e_next, double v_f, bool terminal, const DdpgConfig& cfg) {
  if (terminal) return cfg.r_penalty;
  return (e_n - e_next) / cfg.e_norm + 1.0 / (e_next + 1.0) + cfg.beta * v_f / cfg.v_norm;
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ContractError("replay buffer capacity must be positive");
}

void ReplayBuffer::add(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  if (items_.empty()) throw ContractError("cannot sample an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<std::size_t> idx(n);
  for (auto& i : idx) i = pick(rng);
  return idx;
}

void soft_update(Mlp& target, const Mlp& online, double tau) {
  if (target.dims() != online.dims()) throw ContractError("soft update between nets of different shapes");
  auto t = target.params();
  const auto o = online.params();
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = tau * o[i] + (1.0 - tau) * t[i];
}

namespace {

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end());
  x.insert(x.end(), b.begin(), b.end());
  return x;
}

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

double critic_loss_and_gradient(const DdpgNets& nets, const ReplayBuffer& buffer,
                                std::span<const std::size_t> batch, double gamma, std::vector<double>& grad) {
  if (batch.empty()) throw ContractError("empty ddpg batch");
  grad.assign(nets.critic.param_count(), 0.0);
  const double inv = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (std::size_t idx : batch) {
    const Transition& t = buffer[idx];
    double y = t.reward;
    if (!t.terminal) {
      auto a_next = nets.target_actor.forward(t.next_state);
      for (auto& v : a_next) v = clamp_unit(v);
      y += gamma * nets.target_critic.forward(concat(t.next_state, a_next))[0];
    }
    const Tape tape = forward_tape(nets.critic, concat(t.state, t.action), 0.0, nullptr);
    const double d = tape.act.back()[0] - y;
    loss += d * d * inv;
    const double dout = 2.0 * d * inv;
    backward(nets.critic, tape, std::span<const double>(&dout, 1), grad);
  }
  return loss;
}

double actor_loss_and_gradient(const DdpgNets& nets, const ReplayBuffer& buffer,
                               std::span<const std::size_t> batch, std::vector<double>& grad) {
  if (batch.empty()) throw ContractError("empty ddpg batch");
  grad.assign(nets.actor.param_count(), 0.0);
  std::vector<double> critic_scratch(nets.critic.param_count());
  std::vector<double> dinput(nets.critic.input_dim());
  const double inv = 1.0 / static_cast<double>(batch.size());
  const double dq = -inv;
  double loss = 0.0;
  for (std::size_t idx : batch) {
    const auto& s = buffer[idx].state;
    const Tape ta = forward_tape(nets.actor, s, 0.0, nullptr);
    const auto& a = ta.act.back();
    const Tape tc = forward_tape(nets.critic, concat(s, a), 0.0, nullptr);
    loss -= tc.act.back()[0] * inv;
    backward(nets.critic, tc, std::span<const double>(&dq, 1), critic_scratch, dinput);
    std::vector<double> da(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double over = a[j] - clamp_unit(a[j]);
      loss += over * over * inv;
      da[j] = dinput[s.size() + j] + 2.0 * over * inv;
    }
    backward(nets.actor, ta, da, grad);
  }
  return loss;
}

DdpgRun train_ddpg(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg, const DdpgConfig& cfg,
                   long steps, std::uint64_t seed, const DdpgCallback& on_episode) {
  validate(cfg, sim_cfg.kind);
  if (tracks.empty()) throw ConfigError("ddpg needs at least one training track");
  if (steps < 1) throw ConfigError("ddpg needs a positive step budget");

  const std::size_t fdim = feature_dim(sim_cfg);
  const std::size_t adim = cfg.fixed_throttle ? 1 : action_dim(sim_cfg.kind);

  DdpgRun run;
  run.nets.actor = init_weights(control_net_dims(fdim, adim), seed);
  run.nets.critic = init_weights(control_net_dims(fdim + adim, 1), mix_seed(seed, 1));
  run.nets.target_actor = run.nets.actor;
  run.nets.target_critic = run.nets.critic;
  run.actor_adam = AdamState::for_net(run.nets.actor, cfg.actor_lr);
  run.critic_adam = AdamState::for_net(run.nets.critic, cfg.critic_lr);

  ReplayBuffer buffer(cfg.buffer_capacity);
  std::mt19937_64 rng(mix_seed(seed, 0xDD));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> critic_grad;
  std::vector<double> actor_grad;
  const long warmup = std::max<long>(cfg.warmup_steps, static_cast<long>(cfg.batch_size));

  for (int episode = 0; run.sim_steps < steps; ++episode) {
    const StartPoint sp = start_point(tracks, static_cast<std::size_t>(episode));
    const Track& track = tracks[sp.track].track;
    const Simulator sim(track, sim_cfg);
    VehicleState state = state_on_centerline(track, sp.s);
    Observation obs = sim.observe(state, rng());
    std::vector<double> features = state_features(obs, sim_cfg);
    double abs_e = std::abs(sim.measure(state).e);

    DdpgEpisodeLog log;
    log.episode = episode;
    log.track = static_cast<int>(sp.track);
    for (int n = 0; n < cfg.horizon && run.sim_steps < steps; ++n) {
      const double frac = static_cast<double>(run.sim_steps) / static_cast<double>(steps);
      const double sigma = cfg.noise_sigma + (cfg.noise_sigma_final - cfg.noise_sigma) * frac;
      log.noise_sigma = sigma;

      std::vector<double> a = run.nets.actor.forward(features);
      for (auto& v : a) v = clamp_unit(v + sigma * gauss(rng));
      const ControlVector u =
          clamp_controls(controls_from_output(a, sim_cfg.kind, cfg.fixed_throttle), sim_cfg.kind);
      const StepOutcome out = sim.step(state, u);
      ++run.sim_steps;
      ++log.steps;

      const double abs_next = std::abs(out.e);
      const double r = ddpg_dense_reward(abs_e, abs_next, out.v_forward, out.terminal, cfg);
      log.episode_return += r;
      state = out.next_state;
      obs = sim.observe(state, rng());
      std::vector<double> next_features = state_features(obs, sim_cfg);
      buffer.add(Transition{features, a, r, next_features, out.terminal});
      features = std::move(next_features);
      abs_e = abs_next;

      if (static_cast<long>(buffer.size()) >= warmup) {
        const auto batch = buffer.sample(cfg.batch_size, rng);
        const double closs = critic_loss_and_gradient(run.nets, buffer, batch, cfg.gamma, critic_grad);
        if (!std::isfinite(closs))
          throw DivergenceError("ddpg critic loss became non-finite at step " + std::to_string(run.sim_steps));
        adam_update(run.nets.critic.params(), run.critic_adam, critic_grad);
        const double aloss = actor_loss_and_gradient(run.nets, buffer, batch, actor_grad);
        if (!std::isfinite(aloss))
          throw DivergenceError("ddpg actor loss became non-finite at step " + std::to_string(run.sim_steps));
        adam_update(run.nets.actor.params(), run.actor_adam, actor_grad);
        if (!run.nets.actor.all_finite() || !run.nets.critic.all_finite())
          throw DivergenceError("ddpg parameters became non-finite at step " + std::to_string(run.sim_steps));
        soft_update(run.nets.target_critic, run.nets.critic, cfg.tau);
        soft_update(run.nets.target_actor, run.nets.actor, cfg.tau);
        log.critic_loss = closs;
      }
      if (out.terminal) {
        log.terminal = true;
        break;
      }
    }
    log.sim_steps = run.sim_steps;
    if (on_episode) on_episode(log);
    run.log.push_back(log);
  }
  return run;
}

}  // namespace oil
