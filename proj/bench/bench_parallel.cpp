// Serial against parallel execution of the two OpenMP hot spots.

#include <benchmark/benchmark.h>

#include <memory>
#include <numeric>

#include "explore/simulator.hpp"
#include "explore/synthetic.hpp"

using namespace explore;

namespace {

const SyntheticDataset& fixture() {
  static const SyntheticDataset data = [] {
    ClusteredParams p;
    p.n_users = 100;
    p.seed = 3;
    return make_clustered(p);
  }();
  return data;
}

void BM_DistanceCache(benchmark::State& state) {
  const auto policy = state.range(0) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
  for (auto _ : state) {
    DistanceModel d(fixture().catalog, Basis::Users);
    d.precompute_cache(fixture().catalog.n_items(), policy);
    benchmark::DoNotOptimize(d.cached_pairs());
  }
}

void BM_Experiment(benchmark::State& state) {
  const auto& data = fixture();
  const auto rel = data.relevance_model();
  DistanceModel dist(data.catalog, Basis::Categories);
  dist.precompute_cache(data.catalog.n_items());
  ExperimentConfig ec;
  ec.catalog = &data.catalog;
  ec.relevance = &rel;
  ec.dist = &dist;
  ec.strategies = {{"explore_d", std::make_shared<ExploreStrategy>(ExploreOptions{DiversityKind::Distance})},
                   {"dpp", std::make_shared<DppStrategy>()}};
  ec.params.gamma = 2.0;
  ec.params.lambda = solve_lambda(10.0, 2.0).lambda;
  ec.params.scale = data.catalog.scale();
  ec.trials = 4;
  ec.users.resize(data.catalog.n_users());
  std::iota(ec.users.begin(), ec.users.end(), 0);
  ec.policy = state.range(0) ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial;
  for (auto _ : state) benchmark::DoNotOptimize(run_experiment(ec).strategies.size());
}

}  // namespace

BENCHMARK(BM_DistanceCache)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Experiment)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
