// OpenMP kernels against their serial twins.
#include <benchmark/benchmark.h>

#include "oil/eval.hpp"
#include "oil/oil.hpp"
#include "oil/teachers.hpp"
#include "oil/track_gen.hpp"

using namespace oil;

namespace {

struct Fixture {
  std::vector<NamedTrack> tracks;
  SimConfig sim;
  std::vector<std::unique_ptr<Policy>> teachers = make_teacher_policies(make_default_ensemble(VehicleKind::car));
  Mlp learner = init_weights(control_net_dims(feature_dim(SimConfig{}), 2), 1);

  Fixture() {
    const auto suite = generate_suite(1, 1, 4, {});
    for (std::size_t i = 0; i < suite.size(); ++i) tracks.push_back({"t" + std::to_string(i), suite[i]});
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

template <bool Parallel>
void BM_EstimateValues(benchmark::State& state) {
  const Fixture& f = fixture();
  const Simulator sim(f.tracks[0].track, f.sim);
  const VehicleState s1 = state_on_centerline(f.tracks[0].track, 0.0);
  OilParams params;
  params.mc_rollouts = static_cast<int>(state.range(0));
  const MlpPolicy learner(f.learner, "learner");
  std::vector<const Policy*> policies{&learner};
  for (const auto& t : f.teachers) policies.push_back(t.get());
  const RewardConfig reward;
  for (auto _ : state) {
    auto v = Parallel ? estimate_values(policies, sim, s1, params, reward, 7)
                      : estimate_values_serial(policies, sim, s1, params, reward, 7);
    benchmark::DoNotOptimize(v);
  }
}

template <bool Parallel>
void BM_Evaluation(benchmark::State& state) {
  const Fixture& f = fixture();
  const EvalConfig cfg = EvalConfig::defaults_for(VehicleKind::car);
  for (auto _ : state) {
    auto r = Parallel ? run_evaluation(*f.teachers[2], f.tracks, f.sim, cfg)
                      : run_evaluation_serial(*f.teachers[2], f.tracks, f.sim, cfg);
    benchmark::DoNotOptimize(r);
  }
}

}  // namespace

BENCHMARK(BM_EstimateValues<false>)->Name("estimate_values/serial")->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateValues<true>)->Name("estimate_values/omp")->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluation<false>)->Name("run_evaluation/serial")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Evaluation<true>)->Name("run_evaluation/omp")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
