#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "spillover/clustering.hpp"
#include "spillover/experiment.hpp"
#include "spillover/graph.hpp"
#include "spillover/inference.hpp"

using namespace spillover;

namespace {

void BM_WattsStrogatz(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(watts_strogatz(n, 10, 0.1, 1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_WattsStrogatz)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Louvain(benchmark::State& state) {
  const WeightedGraph g = watts_strogatz(static_cast<std::size_t>(state.range(0)), 10, 0.1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(louvain(g, 1.0, 1));
}
BENCHMARK(BM_Louvain)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_BalancedLouvain(benchmark::State& state) {
  const WeightedGraph g = watts_strogatz(static_cast<std::size_t>(state.range(0)), 10, 0.1, 1);
  LouvainConfig cfg;
  cfg.alpha = 0.3;
  cfg.n_max = 200;
  for (auto _ : state) benchmark::DoNotOptimize(balanced_louvain(g, cfg));
}
BENCHMARK(BM_BalancedLouvain)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Wgsr(benchmark::State& state) {
  const WeightedGraph g = watts_strogatz(static_cast<std::size_t>(state.range(0)), 10, 0.1, 1);
  const Assignment a = assign(louvain(g, 1.0, 1), AssignmentSpec{});
  const ShareEventLog events = graph_events(g);
  for (auto _ : state) benchmark::DoNotOptimize(wgsr(events, a, Arm::treatment, Arm::control));
}
BENCHMARK(BM_Wgsr)->Arg(100000)->Unit(benchmark::kMillisecond);

BucketTable synthetic_table(std::size_t per_arm, std::size_t covariates) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::vector<BucketRow> rows;
  for (std::size_t b = 0; b < 2 * per_arm; ++b) {
    BucketRow r;
    r.bucket_id = b;
    r.arm = b < per_arm ? Arm::treatment : Arm::control;
    double latent = 0.0;
    for (std::size_t j = 0; j < covariates; ++j) {
      r.x.push_back(normal(rng));
      latent += r.x.back();
    }
    r.n = 1000.0;
    r.y = r.n * (5.0 + 0.3 * latent + normal(rng));
    rows.push_back(std::move(r));
  }
  return BucketTable(std::move(rows));
}

void BM_Cupac(benchmark::State& state) {
  const BucketTable t = synthetic_table(static_cast<std::size_t>(state.range(0)), 10);
  for (auto _ : state) benchmark::DoNotOptimize(cupac(t, CupacOptions{}));
}
BENCHMARK(BM_Cupac)->Arg(50)->Arg(1000)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
