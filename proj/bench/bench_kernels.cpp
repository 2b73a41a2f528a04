// Serial vs OpenMP kernels: mass-matrix partials, closed-form matrices and
// independent scenario runs in a sweep.

#include <benchmark/benchmark.h>

#include <random>

#include "orbitgrasp/dynamics.hpp"
#include "orbitgrasp/scenario.hpp"
#include "orbitgrasp/sweep.hpp"

using namespace orbitgrasp;

namespace {

const ScenarioConfig& close_config() {
  static const ScenarioConfig cfg =
      scenario_from_config(ConfigDocument::load(ORBITGRASP_SCENARIO_DIR "/close.cfg"));
  return cfg;
}

const Tree& rigid_tree() {
  static const Tree tree = make_tree(controller_model(close_config()));
  return tree;
}

void BM_PartialsSerial(benchmark::State& state) {
  const Vec7 q = close_config().initial.q;
  for (auto _ : state) benchmark::DoNotOptimize(mass_matrix_partials_serial(rigid_tree(), q));
}

void BM_PartialsParallel(benchmark::State& state) {
  const Vec7 q = close_config().initial.q;
  for (auto _ : state) benchmark::DoNotOptimize(mass_matrix_partials_parallel(rigid_tree(), q));
}

void BM_ClosedForm(benchmark::State& state) {
  const auto policy = state.range(0) ? KernelPolicy::kParallel : KernelPolicy::kSerial;
  std::mt19937 rng(5);
  Vec13 v = Vec13::NullaryExpr([&] { return std::uniform_real_distribution<>(-1, 1)(rng); });
  const Vec7 q = close_config().initial.q;
  for (auto _ : state) benchmark::DoNotOptimize(closed_form(rigid_tree(), q, v, policy));
}

void BM_Sweep(benchmark::State& state) {
  ConfigDocument doc = ConfigDocument::load(ORBITGRASP_SCENARIO_DIR "/close.cfg");
  apply_overrides(doc, {"timeline.t_start=0.2", "timeline.t_point=1.0", "timeline.t_grasp=1.5",
                        "sim.hold=0"});
  const std::vector<SweepAxis> axes = {parse_sweep_axis("baseline.gain_scale=1,2,3,4")};
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(doc, axes, state.range(0) != 0));
}

}  // namespace

BENCHMARK(BM_PartialsSerial);
BENCHMARK(BM_PartialsParallel);
BENCHMARK(BM_ClosedForm)->Arg(0)->Arg(1);
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
