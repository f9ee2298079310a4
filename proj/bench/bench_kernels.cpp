// Serial reference vs OpenMP kernels on the hot paths: pairwise constants,
// batch evaluation of the general extension, and the Hölder grid probe.

#include <benchmark/benchmark.h>

#include <random>

#include "jetext/batch.hpp"
#include "jetext/field.hpp"
#include "jetext/holder_probe.hpp"
#include "jetext/whitney_extension.hpp"

namespace {

using namespace jetext;

TaylorField1 random_field(std::size_t dim, std::size_t m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<Site> sites;
  for (std::size_t i = 0; i < m; ++i) {
    Site s{Point(dim), u(rng), Point(dim)};
    for (double& x : s.s) x = u(rng);
    for (double& x : s.v) x = u(rng);
    sites.push_back(std::move(s));
  }
  return TaylorField1(dim, std::move(sites));
}

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::kParallel : Exec::kSerial; }

void BM_Constants(benchmark::State& state) {
  const auto field = random_field(3, static_cast<std::size_t>(state.range(1)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(compute_constants(field, exec_of(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_Constants)->ArgsProduct({{0, 1}, {200, 1000}})->Unit(benchmark::kMillisecond);

void BM_BatchEval(benchmark::State& state) {
  const auto ext = WhitneyExtension::build(random_field(2, static_cast<std::size_t>(state.range(1)), 2));
  const auto pts = lattice({-2.5, -2.5}, {2.5, 2.5}, 40);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_batch(ext, pts, exec_of(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_BatchEval)->ArgsProduct({{0, 1}, {20, 80}})->Unit(benchmark::kMillisecond);

void BM_HolderGrid(benchmark::State& state) {
  HolderProbeConfig cfg;
  cfg.grid_points = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(grid_sup_inf_conv(cfg, exec_of(state)));
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}
BENCHMARK(BM_HolderGrid)->ArgsProduct({{0, 1}, {4000, 10000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
