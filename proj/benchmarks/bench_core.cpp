#include <benchmark/benchmark.h>

#include <vector>

#include "subpop/conformal.hpp"
#include "subpop/identify.hpp"
#include "subpop/refit.hpp"
#include "subpop/regions.hpp"
#include "subpop/rng.hpp"

namespace {

using namespace subpop;

std::vector<double> normals(std::size_t n, std::uint64_t seed) {
  CounterStream s(seed, 3);
  std::vector<double> out(n);
  for (auto& v : out) v = s.next_normal();
  return out;
}

// Every window of [0, n): n (n + 1) / 2 regions.
void BM_ScanIntervals(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> z = normals(n, 1);
  const RegionFamily f = interval_family(n, 1, n);
  for (auto _ : state) benchmark::DoNotOptimize(scan(z, f, {}).objective);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_ScanIntervals)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_BallFamily(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> xs = normals(2 * n, 2);
  std::vector<std::vector<double>> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = {xs[2 * i], xs[2 * i + 1]};
  for (auto _ : state) benchmark::DoNotOptimize(ball_family(pts, 50).size());
}
BENCHMARK(BM_BallFamily)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_StackWeights(benchmark::State& state) {
  const auto s = static_cast<Eigen::Index>(state.range(0));
  const std::size_t n = 500;
  const std::vector<double> cells = normals(n * static_cast<std::size_t>(s) + n, 4);
  Eigen::MatrixXd U(static_cast<Eigen::Index>(n), s);
  for (Eigen::Index i = 0; i < U.rows(); ++i)
    for (Eigen::Index j = 0; j < s; ++j) U(i, j) = cells[static_cast<std::size_t>(i * s + j)];
  const std::vector<double> y(cells.end() - static_cast<std::ptrdiff_t>(n), cells.end());
  for (auto _ : state) benchmark::DoNotOptimize(stack_weights(U, y).objective);
}
BENCHMARK(BM_StackWeights)->Arg(5)->Arg(50);

void BM_PValueTable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const std::vector<double> calib = normals(n, 5);
  const std::vector<double> test = normals(n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(compute_pvalue_table(calib, test, 7).rows.size());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_PValueTable)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
