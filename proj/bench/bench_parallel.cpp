// Serial vs OpenMP replica loops on the kernels that dominate the experiments.
// Run: ./build/bench/bench_parallel [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include "hypwalk/chain.hpp"
#include "hypwalk/environment.hpp"
#include "hypwalk/experiments.hpp"
#include "hypwalk/hypergeom.hpp"

using namespace hypwalk;

namespace {

ExecutionMode mode_of(const benchmark::State& s) {
  return s.range(0) == 0 ? ExecutionMode::serial : ExecutionMode::parallel;
}

const char* label_of(const benchmark::State& s) { return s.range(0) == 0 ? "serial" : "parallel"; }

// Sample an environment and solve for its stationary law, per replica.
void BM_StationaryReplicas(benchmark::State& state) {
  const auto g = LatticeGraph::torus({3, static_cast<int>(state.range(1)), 0});
  const auto ws = lattice_weight_system(g, LatticeWeights::symmetric(3, 1.0));
  const EnvironmentSampler sampler(g.model(), ws);
  const std::size_t reps = 64;
  std::vector<double> out(reps);
  for (auto _ : state) {
    for_each_replica(reps, mode_of(state), [&](std::size_t r) {
      const auto env = sampler.sample(derive_seed(1, r));
      out[r] = stationary(g.model(), env).pi[static_cast<std::size_t>(g.root_edge())];
    });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * reps));
  state.SetLabel(label_of(state));
}
BENCHMARK(BM_StationaryReplicas)->ArgsProduct({{0, 1}, {3, 4}})->Unit(benchmark::kMillisecond);

// Environment draws with non-Dirichlet Z (rejection sampler).
void BM_SampleReplicas(benchmark::State& state) {
  const auto g = LatticeGraph::torus({3, 4, 0});
  WeightSpec w;
  w.z = "random";
  const auto ws = lattice_weight_system(g, w.lattice(3));
  const EnvironmentSampler sampler(g.model(), ws);
  const std::size_t reps = 64;
  std::vector<double> out(reps);
  for (auto _ : state) {
    for_each_replica(reps, mode_of(state), [&](std::size_t r) { out[r] = sampler.sample(derive_seed(2, r)).omega[0]; });
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * reps));
  state.SetLabel(label_of(state));
}
BENCHMARK(BM_SampleReplicas)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

// Duality residuals by Gauss-Jacobi quadrature over random cases.
void BM_DualitySweep(benchmark::State& state) {
  ExperimentConfig c;
  c.mode = mode_of(state);
  c.n_cases = 100;
  for (auto _ : state) benchmark::DoNotOptimize(run_duality_sweep(c));
  state.SetLabel(label_of(state));
}
BENCHMARK(BM_DualitySweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
