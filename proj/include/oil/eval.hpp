#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oil/policy.hpp"
#include "oil/rollout.hpp"

namespace oil {

struct EvalConfig {
  VehicleKind kind = VehicleKind::car;
  int laps = 1;
  double checkpoint_timeout = 15.0;  // simulated seconds
  // Horizon and reward used for the per-checkpoint trajectory score.
  int score_horizon = 300;
  RewardConfig reward;

  static EvalConfig defaults_for(VehicleKind kind);
};

void validate(const EvalConfig& cfg);

struct TrackResult {
  std::string track;
  double mean_abs_error = 0.0;   // m, over every simulated step
  double completion_time = 0.0;  // s, at the final checkpoint of the last lap
  int checkpoints_passed = 0;    // reached under the policy's own control
  int checkpoints_total = 0;
  double passed_pct = 0.0;
  int resets = 0;   // timeout teleports
  int crashes = 0;  // terminal states hit during the laps
  long steps = 0;
  // Mean trajectory reward of score_horizon-step rollouts started at rest from
  // every checkpoint.
  double mean_reward = 0.0;
};

struct EvalResult {
  std::string policy;
  std::vector<TrackResult> tracks;
  // Arithmetic means over tracks; crashes and resets are totals.
  double mean_abs_error = 0.0;
  double completion_time = 0.0;
  double passed_pct = 0.0;
  double mean_reward = 0.0;
  int resets = 0;
  int crashes = 0;
};

// One row per simulated step of an evaluation run or trajectory.
struct TraceRow {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double e = 0.0;
  double arc_s = 0.0;
};

struct NamedTrack {
  std::string name;
  Track track;
};

// Lap protocol on one track. The policy is cloned; the prototype is never touched.
// Throws EvalAbortError if the policy emits a non-finite action.
TrackResult evaluate_track(const Policy& prototype, const NamedTrack& track, const SimConfig& sim,
                           const EvalConfig& cfg, std::vector<TraceRow>* trace = nullptr);

// Mean score_horizon-step reward from every checkpoint at rest.
double checkpoint_score(const Policy& prototype, const Track& track, const SimConfig& sim,
                        const EvalConfig& cfg);

// Tracks are evaluated in parallel (OpenMP) when available.
EvalResult run_evaluation(const Policy& prototype, const std::vector<NamedTrack>& tracks,
                          const SimConfig& sim, const EvalConfig& cfg);
// Single-threaded reference of run_evaluation; results must match bit for bit.
EvalResult run_evaluation_serial(const Policy& prototype, const std::vector<NamedTrack>& tracks,
                                 const SimConfig& sim, const EvalConfig& cfg);

void aggregate(EvalResult& result);

struct ComparisonRow {
  std::string name;
  double mean_abs_error = 0.0;
  double completion_time = 0.0;
  double passed_pct = 0.0;
  double mean_reward = 0.0;
  int resets = 0;
  int crashes = 0;
};

struct ComparisonTable {
  VehicleKind kind = VehicleKind::car;
  std::vector<ComparisonRow> rows;

  std::string to_text() const;
  std::string to_csv() const;
};

// Rows keep the given order.
ComparisonTable compare(const std::vector<EvalResult>& results, VehicleKind kind);

std::vector<TraceRow> trace_of(const Trajectory& traj, double dt);
void export_trajectory(const std::vector<TraceRow>& rows, const std::filesystem::path& path);
void export_trajectory(const Trajectory& traj, double dt, const std::filesystem::path& path);
std::vector<TraceRow> read_trajectory(const std::filesystem::path& path);

}  // namespace oil
