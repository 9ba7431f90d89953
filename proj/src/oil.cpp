#include "oil/oil.hpp"

#include <algorithm>
#include <exception>
#include <set>

#include "oil/errors.hpp"

namespace oil {

std::string_view to_string(EpsilonMode mode) { return mode == EpsilonMode::single ? "single" : "multi"; }

EpsilonMode parse_epsilon_mode(std::string_view name) {
  if (name == "single") return EpsilonMode::single;
  if (name == "multi") return EpsilonMode::multi;
  throw ConfigError("unknown epsilon mode '" + std::string(name) + "' (expected single or multi)");
}

OilParams OilParams::defaults_for(VehicleKind kind) {
  OilParams p;
  p.horizon = kind == VehicleKind::car ? 300 : 200;
  return p;
}

void validate(const OilParams& p) {
  if (p.rounds < 1 || p.horizon < 1 || p.max_episodes < 1 || p.act_steps < 1)
    throw ConfigError("rounds, horizon, max_episodes and act_steps must all be >= 1");
  if (p.mc_rollouts < 1) throw ConfigError("mc_rollouts must be >= 1");
  if (p.batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (p.dropout < 0.0 || p.dropout >= 1.0) throw ConfigError("dropout must lie in [0, 1)");
  if (!(p.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
}

ValueEstimate estimate_value(Policy& policy, int policy_id, const Simulator& sim, const VehicleState& s1,
                             const OilParams& params, const RewardConfig& reward, std::uint64_t seed) {
  ValueEstimate est;
  est.policy_id = policy_id;
  double sum = 0.0;
  for (int r = 0; r < params.mc_rollouts; ++r) {
    Trajectory traj = rollout(policy, sim, s1, params.horizon, mix_seed(seed, static_cast<std::uint64_t>(r)));
    sum += trajectory_reward(traj, sim.track(), reward);
    if (r == 0) est.trajectory = std::move(traj);
  }
  est.value = sum / params.mc_rollouts;
  return est;
}

std::vector<ValueEstimate> estimate_values_serial(std::span<const Policy* const> policies, const Simulator& sim,
                                                  const VehicleState& s1, const OilParams& params,
                                                  const RewardConfig& reward, std::uint64_t seed) {
  std::vector<ValueEstimate> out;
  out.reserve(policies.size());
  for (std::size_t i = 0; i < policies.size(); ++i) {
    auto p = policies[i]->clone();
    out.push_back(estimate_value(*p, static_cast<int>(i), sim, s1, params, reward, seed));
  }
  return out;
}

std::vector<ValueEstimate> estimate_values(std::span<const Policy* const> policies, const Simulator& sim,
                                           const VehicleState& s1, const OilParams& params,
                                           const RewardConfig& reward, std::uint64_t seed) {
  std::vector<ValueEstimate> out(policies.size());
  std::vector<std::exception_ptr> errors(policies.size());
  const auto n = static_cast<long>(policies.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      auto p = policies[k]->clone();
      out[k] = estimate_value(*p, static_cast<int>(k), sim, s1, params, reward, seed);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::size_t select_critical_teacher(std::span<const double> values) {
  if (values.empty()) throw ContractError("no teacher values to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

std::size_t select_critical_teacher(std::span<const ValueEstimate> values) {
  std::vector<double> v;
  v.reserve(values.size());
  for (const auto& e : values) v.push_back(e.value);
  return select_critical_teacher(v);
}

double advantage(double v_learner, double v_critical) { return v_learner - v_critical; }

double epsilon_threshold(EpsilonMode mode, double v_critical) {
  return mode == EpsilonMode::multi ? -0.1 * v_critical : 0.0;
}

Learner Learner::create(const SimConfig& sim, std::uint64_t seed, double learning_rate) {
  Learner l;
  l.net = init_weights(control_net_dims(feature_dim(sim), action_dim(sim.kind)), seed);
  l.adam = AdamState::for_net(l.net, learning_rate);
  return l;
}

RehearseResult rehearse(Learner& learner, Policy& critic, const RehearseContext& ctx, const OilParams& params,
                        const RewardConfig& reward, Dataset& dataset, std::mt19937_64& rng) {
  const Simulator& sim = ctx.sim;
  const auto adim = action_dim(sim.kind());
  RehearseResult res;
  double adv = 0.0;
  do {
    critic.reset();
    VehicleState state = ctx.s1;
    for (int n = 0; n < params.horizon; ++n) {
      const Observation obs = sim.observe(state, rng());
      const ControlVector label = clamp_controls(critic.act(obs, sim.config()), sim.kind());
      const auto features = state_features(obs, sim.config());
      const auto out = learner.net.forward(features);
      const ControlVector u = clamp_controls(controls_from_output(out, sim.kind()), sim.kind());

      dataset.add(features, std::span<const double>(label.ch.data(), adim), ctx.critic_id, ctx.round);
      ++res.labels_added;
      const Batch batch = dataset.sample(params.batch_size, rng);
      train_minibatch(learner.net, learner.adam, batch, params.dropout, rng);

      const StepOutcome step = sim.step(state, u);
      ++res.sim_steps;
      state = step.next_state;
      if (step.terminal) {
        state = ctx.s1;
        critic.reset();
      }
    }
    ++res.episodes_used;

    MlpPolicy current(learner.net, "learner");
    const ValueEstimate v = estimate_value(current, -1, sim, ctx.s1, params, reward, ctx.value_seed);
    res.sim_steps += static_cast<long>(v.trajectory.steps.size()) * params.mc_rollouts;
    res.final_learner_value = v.value;
    adv = advantage(v.value, ctx.v_critic);
  } while (!(adv > ctx.epsilon) && res.episodes_used < params.max_episodes);
  res.final_advantage = adv;
  return res;
}

namespace {

double checkpoint_behind(const Track& track, double s) {
  double best = track.checkpoints.front();
  for (double c : track.checkpoints)
    if (c <= s) best = c;
  return best;
}

}  // namespace

ActResult act(const Mlp& net, const Simulator& sim, const VehicleState& s1, int steps, std::uint64_t seed) {
  if (steps < 1) throw ContractError("act needs at least one step");
  const Track& track = sim.track();
  MlpPolicy policy(net, "learner");
  ActResult res;
  VehicleState state = s1;
  double prev_s = project_to_centerline(track, s1.position).s;
  for (int n = 0; n < steps; ++n) {
    const Observation obs = sim.observe(state, mix_seed(seed, static_cast<std::uint64_t>(n)));
    const ControlVector u = clamp_controls(policy.act(obs, sim.config()), sim.kind());
    const StepOutcome out = sim.step(state, u);
    ++res.steps;
    res.progress += track.arc_delta(prev_s, out.s);
    prev_s = out.s;
    state = out.next_state;
    if (out.terminal) {
      const double cp = checkpoint_behind(track, out.s);
      res.progress += track.arc_delta(out.s, cp);
      state = state_on_centerline(track, cp);
      res.terminated = true;
      break;
    }
  }
  res.state = state;
  return res;
}

OilRun train_oil(const std::vector<NamedTrack>& tracks, const SimConfig& sim_cfg,
                 const std::vector<std::unique_ptr<Policy>>& teachers, const OilParams& params,
                 const RewardConfig& reward, std::uint64_t seed, const RoundCallback& on_round,
                 const Learner* initial) {
  validate(params);
  validate(reward);
  if (tracks.empty()) throw ConfigError("OIL needs at least one training track");
  if (teachers.empty()) throw ConfigError("OIL needs at least one teacher");

  OilRun run;
  run.learner = initial ? *initial : Learner::create(sim_cfg, seed, params.learning_rate);
  if (run.learner.net.input_dim() != feature_dim(sim_cfg) || run.learner.net.output_dim() != action_dim(sim_cfg.kind))
    throw ContractError("warm-start learner does not match the simulator's feature and action sizes");
  run.dataset = Dataset(feature_dim(sim_cfg), action_dim(sim_cfg.kind), params.dataset_capacity);
  std::mt19937_64 rng(mix_seed(seed, 0xD1CE));

  std::size_t track_idx = 0;
  VehicleState s1 = state_on_centerline(tracks[0].track, 0.0);
  double lap_progress = 0.0;

  for (int m = 1; m <= params.rounds; ++m) {
    const Track& track = tracks[track_idx].track;
    const Simulator sim(track, sim_cfg);
    const std::uint64_t round_seed = mix_seed(seed, static_cast<std::uint64_t>(m));

    MlpPolicy learner_policy(run.learner.net, "learner");
    std::vector<const Policy*> observed;
    observed.push_back(&learner_policy);
    for (const auto& t : teachers) observed.push_back(t.get());
    const auto values = estimate_values(observed, sim, s1, params, reward, round_seed);
    for (const auto& v : values) run.sim_steps += static_cast<long>(v.trajectory.steps.size()) * params.mc_rollouts;

    if (m == 1) {
      const bool degenerate = std::all_of(values.begin() + 1, values.end(), [](const ValueEstimate& v) {
        return v.trajectory.terminal && v.trajectory.steps.size() == 1;
      });
      if (degenerate) throw Error("degenerate teacher ensemble: every teacher is terminal after one step");
    }

    RoundLog log;
    log.round = m;
    log.track = static_cast<int>(track_idx);
    log.s1_arc = project_to_centerline(track, s1.position).s;
    log.s1_speed = vehicle_speed(s1, sim_cfg.kind);
    log.v_learner = values[0].value;
    for (std::size_t i = 1; i < values.size(); ++i) log.teacher_values.push_back(values[i].value);
    log.critic = static_cast<int>(select_critical_teacher(log.teacher_values));
    const double v_critic = log.teacher_values[static_cast<std::size_t>(log.critic)];
    log.advantage = advantage(log.v_learner, v_critic);
    log.epsilon = epsilon_threshold(params.epsilon_mode, v_critic);
    log.final_advantage = log.advantage;

    if (log.advantage < 0.0) {
      auto critic = teachers[static_cast<std::size_t>(log.critic)]->clone();
      const RehearseContext ctx{sim, s1, v_critic, log.epsilon, log.critic, m, round_seed};
      const RehearseResult r = rehearse(run.learner, *critic, ctx, params, reward, run.dataset, rng);
      log.rehearsed = true;
      log.episodes_used = r.episodes_used;
      log.final_advantage = r.final_advantage;
      log.labels_added = r.labels_added;
      run.sim_steps += r.sim_steps;
      std::set<int> sources;
      const std::size_t n = run.dataset.size();
      for (std::size_t i = n - std::min(n, r.labels_added); i < n; ++i) sources.insert(run.dataset.source(i));
      log.label_sources.assign(sources.begin(), sources.end());
    }

    const ActResult a = act(run.learner.net, sim, s1, params.act_steps, round_seed);
    run.sim_steps += a.steps;
    s1 = a.state;
    lap_progress += a.progress;
    if (lap_progress >= track.total_length()) {
      track_idx = (track_idx + 1) % tracks.size();
      s1 = state_on_centerline(tracks[track_idx].track, 0.0);
      lap_progress = 0.0;
    }

    log.dataset_size = run.dataset.size();
    log.sim_steps = run.sim_steps;
    if (on_round) on_round(log);
    run.log.push_back(std::move(log));
    if (params.step_budget > 0 && run.sim_steps >= params.step_budget) break;
  }
  return run;
}

}  // namespace oil
