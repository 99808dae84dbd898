// Microbenchmarks for the evolution kernels: the OpenMP tendency against its
// serial twin, background table construction, and one implicit step.
#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "esflow/flow.hpp"

using namespace esflow;

namespace {

const flow::Mode& bench_mode() {
  static const flow::Mode m = flow::Mode::build(1024);
  return m;
}

std::vector<double> bench_state(const flow::Background& bg) {
  std::vector<double> y(3 * (bg.m + 1), 0.0);
  for (int j = 0; j <= bg.m; ++j) {
    const double z = (bg.s[j] - 20.0) / 5.0;
    const double v = 1e-3 * std::exp(-z * z);
    y[3 * j + 0] = v;
    y[3 * j + 1] = v;
    y[3 * j + 2] = -0.5 * v;
  }
  y[1] = y[0];
  for (int c = 0; c < 3; ++c) y[3 * bg.m + c] = 0.0;
  return y;
}

void bm_rhs(benchmark::State& state, bool parallel) {
  const int m = static_cast<int>(state.range(0));
  const flow::Background bg(m, 50.0, bench_mode(), 0.0);
  const auto y = bench_state(bg);
  std::vector<double> out(3 * (m + 1), 0.0);
  for (auto _ : state) {
    flow::rhs_direct(bg, y, out, parallel);
    benchmark::DoNotOptimize(out.data());
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations() * (m - 1));
}

}  // namespace

static void BM_TendencySerial(benchmark::State& state) { bm_rhs(state, false); }
static void BM_TendencyParallel(benchmark::State& state) { bm_rhs(state, true); }
BENCHMARK(BM_TendencySerial)->Arg(1024)->Arg(4096)->UseRealTime();
BENCHMARK(BM_TendencyParallel)->Arg(1024)->Arg(4096)->UseRealTime();

static void BM_BackgroundBuild(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) {
    const flow::Background bg(m, 50.0, bench_mode(), 1e-3);
    benchmark::DoNotOptimize(bg.K01.data());
  }
}
BENCHMARK(BM_BackgroundBuild)->Arg(1024)->Arg(4096);

static void BM_RunStep(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  flow::Run run(m, 50.0, bench_mode(), 0.0, "g0", 1e-3);
  for (auto _ : state) {
    run.step();
    benchmark::DoNotOptimize(run.y.data());
  }
  state.SetItemsProcessed(state.iterations() * (m - 1));
}
BENCHMARK(BM_RunStep)->Arg(1024)->Arg(4096);

BENCHMARK_MAIN();
