#include <benchmark/benchmark.h>

#include <hisparse/bench.hpp>
#include <hisparse/solve.hpp>

using namespace hisparse;

namespace {

struct Instance {
  DenseOperator<double> op;
  RealVector y;
};

Instance large_instance(Index m) {
  const FlatSparsity fp{30, 100, 4, 20};
  const auto seeds = instance_seeds(1, m, 0);
  auto op = normalize_columns(gaussian_operator<double>(m, fp.dimension(), seeds.op)).first;
  const RealVector x = gen_signal<double>(fp, seeds.signal).first;
  RealVector y = op.apply(x);
  return {std::move(op), std::move(y)};
}

void BM_Hihtp(benchmark::State& state) {
  const auto inst = large_instance(static_cast<Index>(state.range(0)));
  const FlatSparsity fp{30, 100, 4, 20};
  for (auto _ : state) benchmark::DoNotOptimize(hihtp(inst.op, inst.y, fp));
}
BENCHMARK(BM_Hihtp)->Arg(200)->Arg(300)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Htp(benchmark::State& state) {
  const auto inst = large_instance(static_cast<Index>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(htp(inst.op, inst.y, 80));
}
BENCHMARK(BM_Htp)->Arg(200)->Arg(300)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_FourierHihtp(benchmark::State& state) {
  const FlatSparsity fp{20, 50, 3, 10};
  const auto op = subsampled_dft(fp.dimension(), static_cast<Index>(state.range(0)),
                                 RowSelection::uniform_random, 3);
  const ComplexVector x = gen_signal<Complex>(fp, 4).first;
  const ComplexVector y = op.apply(x);
  for (auto _ : state) benchmark::DoNotOptimize(hihtp(op, y, fp));
}
BENCHMARK(BM_FourierHihtp)->Arg(150)->Arg(300)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
