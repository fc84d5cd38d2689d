#include <random>

#include <benchmark/benchmark.h>

#include <hisparse/threshold.hpp>

using namespace hisparse;

namespace {

RealVector random_vector(Index d) {
  std::mt19937_64 rng(d);
  std::normal_distribution<double> normal;
  RealVector z(static_cast<Eigen::Index>(d));
  for (auto& v : z) v = normal(rng);
  return z;
}

// Blocks of 100 entries, 4% of blocks and 20% of each block active.
void BM_ThresholdFlat(benchmark::State& state) {
  const auto d = static_cast<Index>(state.range(0));
  const FlatSparsity fp{d / 100, 100, std::max<Index>(1, d / 2500), 20};
  const RealVector z = random_vector(d);
  for (auto _ : state) benchmark::DoNotOptimize(threshold_flat_indices(z, fp));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ThresholdFlat)->RangeMultiplier(10)->Range(1'000, 1'000'000)->Complexity(benchmark::oN);

void BM_ThresholdTree(benchmark::State& state) {
  const auto d = static_cast<Index>(state.range(0));
  const std::vector<Level> levels{{d / 1000, std::max<Index>(1, d / 20000)}, {10, 3}, {100, 10}};
  auto tree = std::make_shared<const SparsityTree>(SparsityTree::uniform(levels));
  const RealVector z = random_vector(d);
  for (auto _ : state) benchmark::DoNotOptimize(threshold_tree(z, tree));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ThresholdTree)->RangeMultiplier(10)->Range(1'000, 1'000'000)->Complexity(benchmark::oN);

void BM_TopK(benchmark::State& state) {
  const auto d = static_cast<Index>(state.range(0));
  const RealVector z = random_vector(d);
  for (auto _ : state) benchmark::DoNotOptimize(select_top_k(z, d / 50));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TopK)->RangeMultiplier(10)->Range(1'000, 1'000'000)->Complexity(benchmark::oN);

}  // namespace

BENCHMARK_MAIN();
