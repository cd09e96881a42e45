// SPDX-License-Identifier: Apache-2.0
//
// Hot-path benchmarks: cache enumeration, approximant construction,
// embedding, the three evaluators, exact sup distance, and the classical
// same-budget baseline.  Budgets follow the depth -> (T, m) floors, so the
// argument is the hidden-layer budget N.

#include <benchmark/benchmark.h>

#include <vector>

#include "cachenet/adaptive_net.hpp"
#include "cachenet/cache.hpp"
#include "cachenet/embed.hpp"
#include "cachenet/harness.hpp"
#include "cachenet/pwl.hpp"
#include "cachenet/relu_net.hpp"

namespace {

using namespace cachenet;

PwlFunction bench_function(int pieces, unsigned seed) {
  UnitBallSpec spec;
  spec.kind = UnitBallSpec::Kind::pwl_random;
  spec.pieces = pieces;
  spec.seed = seed;
  return make_unit_ball_function(spec);
}

void BM_EnumerateCache(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(enumerate_profiles(cells));
  }
}
BENCHMARK(BM_EnumerateCache)->DenseRange(4, 10, 2);

void BM_BuildAdaptive(benchmark::State& state) {
  const ChosenParams p = raw_params(static_cast<int>(state.range(0)));
  const PwlFunction f = bench_function(29, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_adaptive(f, p.intervals, p.cells));
  }
}
BENCHMARK(BM_BuildAdaptive)->Arg(512)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_EmbedExact(benchmark::State& state) {
  const ChosenParams p = raw_params(static_cast<int>(state.range(0)));
  const PwlFunction f = bench_function(29, 7);
  const AdaptiveNet anet = build_adaptive(f, p.intervals, p.cells);
  for (auto _ : state) {
    benchmark::DoNotOptimize(embed_standard(anet, EmbedMode::exact_linear));
  }
}
BENCHMARK(BM_EmbedExact)->Arg(512)->Arg(1024)->Arg(4096);

void BM_EmbedStrict(benchmark::State& state) {
  const ChosenParams p = raw_params(static_cast<int>(state.range(0)));
  const PwlFunction f = bench_function(29, 7);
  const AdaptiveNet anet = build_adaptive(f, p.intervals, p.cells);
  for (auto _ : state) {
    benchmark::DoNotOptimize(embed_standard(anet, EmbedMode::strict_relu));
  }
}
BENCHMARK(BM_EmbedStrict)->Arg(512)->Arg(1024)->Arg(4096);

void BM_ForwardStandard(benchmark::State& state) {
  const ChosenParams p = raw_params(static_cast<int>(state.range(0)));
  const PwlFunction f = bench_function(29, 7);
  const Network net =
      embed_standard(build_adaptive(f, p.intervals, p.cells),
                     EmbedMode::strict_relu)
          .net;
  double x = 0.0;
  for (auto _ : state) {
    x += 0.37;
    if (x > 1.0) x -= 1.0;
    benchmark::DoNotOptimize(forward(net, x));
  }
}
BENCHMARK(BM_ForwardStandard)->Arg(512)->Arg(1024)->Arg(4096);

void BM_EvalAdaptive(benchmark::State& state) {
  const ChosenParams p = raw_params(static_cast<int>(state.range(0)));
  const PwlFunction f = bench_function(29, 7);
  const AdaptiveNet anet = build_adaptive(f, p.intervals, p.cells);
  double x = 0.0;
  for (auto _ : state) {
    x += 0.37;
    if (x > 1.0) x -= 1.0;
    benchmark::DoNotOptimize(eval_adaptive(anet, x));
  }
}
BENCHMARK(BM_EvalAdaptive)->Arg(512)->Arg(1024)->Arg(4096);

void BM_ReferenceEval(benchmark::State& state) {
  const ChosenParams p = raw_params(static_cast<int>(state.range(0)));
  const PwlFunction f = bench_function(29, 7);
  const ReferenceEvaluator ref(f, p.intervals, p.cells);
  double x = 0.0;
  for (auto _ : state) {
    x += 0.37;
    if (x > 1.0) x -= 1.0;
    benchmark::DoNotOptimize(ref(x));
  }
}
BENCHMARK(BM_ReferenceEval)->Arg(512)->Arg(1024)->Arg(4096);

void BM_SupDist(benchmark::State& state) {
  const ChosenParams p = raw_params(static_cast<int>(state.range(0)));
  const PwlFunction f = bench_function(29, 7);
  const ReferenceEvaluator ref(f, p.intervals, p.cells);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sup_dist(f, ref.approximant()));
  }
}
BENCHMARK(BM_SupDist)->Arg(512)->Arg(1024)->Arg(4096);

void BM_Baseline(benchmark::State& state) {
  const PwlFunction f = bench_function(29, 7);
  const auto weights = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_baseline(f, weights));
  }
}
BENCHMARK(BM_Baseline)->Arg(15346)->Arg(30706);

}  // namespace

BENCHMARK_MAIN();
