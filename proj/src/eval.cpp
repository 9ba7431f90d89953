#include "oil/eval.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "oil/errors.hpp"

namespace oil {

EvalConfig EvalConfig::defaults_for(VehicleKind kind) {
  EvalConfig c;
  c.kind = kind;
  if (kind == VehicleKind::car) {
    c.laps = 1;
    c.checkpoint_timeout = 15.0;
    c.score_horizon = 300;
    c.reward.mode = RewardMode::driving;
  } else {
    c.laps = 2;
    c.checkpoint_timeout = 10.0;
    c.score_horizon = 200;
    c.reward.mode = RewardMode::uav;
  }
  return c;
}

void validate(const EvalConfig& cfg) {
  if (cfg.laps < 1) throw ConfigError("laps must be >= 1");
  if (!(cfg.checkpoint_timeout > 0.0)) throw ConfigError("checkpoint timeout must be positive");
  if (cfg.score_horizon < 1) throw ConfigError("score horizon must be >= 1");
  validate(cfg.reward);
}

namespace {

struct Target {
  double unwrapped;  // lap * L + checkpoint position (finish = (lap + 1) * L)
  double s;
};

std::vector<Target> lap_targets(const Track& track, int laps) {
  const double L = track.total_length();
  std::vector<Target> out;
  for (int lap = 0; lap < laps; ++lap) {
    for (std::size_t c = 1; c < track.checkpoints.size(); ++c)
      out.push_back({lap * L + track.checkpoints[c], track.checkpoints[c]});
    out.push_back({(lap + 1) * L, 0.0});
  }
  return out;
}

bool all_finite(const ControlVector& u) {
  for (double x : u.ch)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

TrackResult evaluate_track(const Policy& prototype, const NamedTrack& named, const SimConfig& sim_cfg,
                           const EvalConfig& cfg, std::vector<TraceRow>* trace) {
  validate(cfg);
  const Track& track = named.track;
  const Simulator sim(track, sim_cfg);
  auto policy = prototype.clone();
  policy->reset();

  const auto targets = lap_targets(track, cfg.laps);
  const long timeout_steps = std::lround(cfg.checkpoint_timeout / sim.dt());

  TrackResult r;
  r.track = named.name;
  r.checkpoints_total = static_cast<int>(targets.size());

  VehicleState state = state_on_centerline(track, 0.0);
  double prev_s = 0.0;
  double unwrapped = 0.0;
  double last_e = 0.0;
  bool crashed = false;
  std::size_t next = 0;
  long since = 0;
  long step = 0;
  double err_sum = 0.0;

  while (next < targets.size()) {
    if (!crashed) {
      const Observation obs = sim.observe(state, mix_seed(track.seed, static_cast<std::uint64_t>(step)));
      const ControlVector raw = policy->act(obs, sim_cfg);
      if (!all_finite(raw))
        throw EvalAbortError("policy '" + prototype.name() + "' emitted a non-finite action at step " +
                             std::to_string(step) + " on track " + named.name);
      const StepOutcome out = sim.step(state, clamp_controls(raw, sim.kind()));
      state = out.next_state;
      unwrapped += track.arc_delta(prev_s, out.s);
      prev_s = out.s;
      last_e = out.e;
      if (out.terminal) {
        crashed = true;
        ++r.crashes;
        state.speed = 0.0;
        state.velocity = {};
      }
    }
    ++step;
    ++since;
    err_sum += std::abs(last_e);
    if (trace)
      trace->push_back({static_cast<double>(step) * sim.dt(), state.position.x, state.position.y, state.heading,
                        vehicle_speed(state, sim.kind()), last_e, prev_s});

    while (next < targets.size() && unwrapped >= targets[next].unwrapped) {
      ++r.checkpoints_passed;
      ++next;
      since = 0;
    }
    if (next < targets.size() && since >= timeout_steps) {
      const Target& t = targets[next];
      state = state_on_centerline(track, t.s);
      unwrapped = t.unwrapped;
      prev_s = t.s;
      last_e = 0.0;
      crashed = false;
      policy->reset();
      ++r.resets;
      ++next;
      since = 0;
    }
  }

  r.steps = step;
  r.completion_time = static_cast<double>(step) * sim.dt();
  r.mean_abs_error = err_sum / static_cast<double>(step);
  r.passed_pct = 100.0 * r.checkpoints_passed / r.checkpoints_total;
  r.mean_reward = checkpoint_score(prototype, track, sim_cfg, cfg);
  return r;
}

double checkpoint_score(const Policy& prototype, const Track& track, const SimConfig& sim_cfg,
                        const EvalConfig& cfg) {
  const Simulator sim(track, sim_cfg);
  auto policy = prototype.clone();
  double sum = 0.0;
  for (std::size_t c = 0; c < track.checkpoints.size(); ++c) {
    const auto traj = rollout(*policy, sim, state_on_centerline(track, track.checkpoints[c]), cfg.score_horizon,
                              mix_seed(track.seed, 1000 + c));
    sum += trajectory_reward(traj, track, cfg.reward);
  }
  return sum / static_cast<double>(track.checkpoints.size());
}

void aggregate(EvalResult& res) {
  const double n = static_cast<double>(res.tracks.size());
  res.mean_abs_error = res.completion_time = res.passed_pct = res.mean_reward = 0.0;
  res.resets = res.crashes = 0;
  if (res.tracks.empty()) return;
  for (const auto& t : res.tracks) {
    res.mean_abs_error += t.mean_abs_error;
    res.completion_time += t.completion_time;
    res.passed_pct += t.passed_pct;
    res.mean_reward += t.mean_reward;
    res.resets += t.resets;
    res.crashes += t.crashes;
  }
  res.mean_abs_error /= n;
  res.completion_time /= n;
  res.passed_pct /= n;
  res.mean_reward /= n;
}

EvalResult run_evaluation_serial(const Policy& prototype, const std::vector<NamedTrack>& tracks,
                                 const SimConfig& sim, const EvalConfig& cfg) {
  EvalResult res;
  res.policy = prototype.name();
  for (const auto& t : tracks) res.tracks.push_back(evaluate_track(prototype, t, sim, cfg));
  aggregate(res);
  return res;
}

EvalResult run_evaluation(const Policy& prototype, const std::vector<NamedTrack>& tracks, const SimConfig& sim,
                          const EvalConfig& cfg) {
  EvalResult res;
  res.policy = prototype.name();
  res.tracks.resize(tracks.size());
  std::vector<std::exception_ptr> errors(tracks.size());
  const auto n = static_cast<long>(tracks.size());

#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      res.tracks[static_cast<std::size_t>(i)] = evaluate_track(prototype, tracks[static_cast<std::size_t>(i)], sim, cfg);
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  aggregate(res);
  return res;
}

ComparisonTable compare(const std::vector<EvalResult>& results, VehicleKind kind) {
  ComparisonTable table;
  table.kind = kind;
  for (const auto& r : results)
    table.rows.push_back({r.policy, r.mean_abs_error, r.completion_time, r.passed_pct, r.mean_reward, r.resets,
                          r.crashes});
  return table;
}

std::string ComparisonTable::to_text() const {
  std::ostringstream os;
  const bool car = kind == VehicleKind::car;
  os << std::left << std::setw(28) << "policy" << std::right << std::setw(12) << (car ? "error[m]" : "gates[%]")
     << std::setw(10) << "time[s]" << std::setw(14) << "reward" << std::setw(8) << "resets" << std::setw(9)
     << "crashes" << '\n';
  os << std::fixed;
  for (const auto& r : rows) {
    os << std::left << std::setw(28) << r.name << std::right << std::setprecision(car ? 3 : 1) << std::setw(12)
       << (car ? r.mean_abs_error : r.passed_pct) << std::setprecision(1) << std::setw(10) << r.completion_time
       << std::setprecision(3) << std::setw(14) << r.mean_reward << std::setw(8) << r.resets << std::setw(9)
       << r.crashes << '\n';
  }
  return os.str();
}

std::string ComparisonTable::to_csv() const {
  std::ostringstream os;
  os << "policy,mean_abs_error,completion_time,passed_pct,mean_reward,resets,crashes\n";
  os << std::setprecision(17);
  for (const auto& r : rows)
    os << r.name << ',' << r.mean_abs_error << ',' << r.completion_time << ',' << r.passed_pct << ','
       << r.mean_reward << ',' << r.resets << ',' << r.crashes << '\n';
  return os.str();
}

std::vector<TraceRow> trace_of(const Trajectory& traj, double dt) {
  std::vector<TraceRow> rows;
  rows.reserve(traj.steps.size());
  for (std::size_t i = 0; i < traj.steps.size(); ++i) {
    const auto& o = traj.steps[i].outcome;
    const auto& s = o.next_state;
    rows.push_back({static_cast<double>(i + 1) * dt, s.position.x, s.position.y, s.heading,
                    std::max(s.speed, norm(s.velocity)), o.e, o.s});
  }
  return rows;
}

void export_trajectory(const std::vector<TraceRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trajectory file " + path.string());
  out << "t,x,y,heading,speed,e,arc_s\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.t, r.x, r.y, r.heading, r.speed,
                  r.e, r.arc_s);
    out << buf;
  }
}

void export_trajectory(const Trajectory& traj, double dt, const std::filesystem::path& path) {
  export_trajectory(trace_of(traj, dt), path);
}

std::vector<TraceRow> read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot read trajectory file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "t,x,y,heading,speed,e,arc_s")
    throw LoadError("trajectory file " + path.string() + " has an unexpected header");
  std::vector<TraceRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRow r;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.t, &r.x, &r.y, &r.heading, &r.speed, &r.e,
                    &r.arc_s) != 7)
      throw LoadError("malformed trajectory row: " + line);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace oil
