#include <benchmark/benchmark.h>

#include "sigmalab/decomposition.hpp"
#include "sigmalab/gallery.hpp"
#include "sigmalab/montecarlo.hpp"
#include "sigmalab/qmeasure.hpp"

namespace {

using namespace sigmalab;

AdaptedProcess reflected(int horizon) {
  ProcessSpec spec;
  spec.kind = ProcessKind::kReflectedSrw;
  spec.horizon = horizon;
  return make_process(spec).second;
}

void BM_DoobDecompose(benchmark::State& state) {
  const auto x = reflected(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(doob_decompose(x));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.space().node_count()));
}
BENCHMARK(BM_DoobDecompose)->DenseRange(8, 14, 2);

void BM_BuildQn(benchmark::State& state) {
  const int horizon = static_cast<int>(state.range(0));
  const auto x = reflected(horizon);
  for (auto _ : state) benchmark::DoNotOptimize(build_qn(x, horizon / 2));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.space().leaf_count()));
}
BENCHMARK(BM_BuildQn)->DenseRange(8, 14, 2);

void BM_LawOfG(benchmark::State& state) {
  const auto x = reflected(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(q_law_of_g(x));
}
BENCHMARK(BM_LawOfG)->DenseRange(8, 12, 2);

void BM_UniquenessProbe(benchmark::State& state) {
  const auto x = reflected(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(uniqueness_probe(x));
}
BENCHMARK(BM_UniquenessProbe)->DenseRange(4, 8, 2);

void BM_QFunctionalSampling(benchmark::State& state) {
  const auto sampler = fair_coin_sampler();
  const auto weight = gallery_functional(ProcessKind::kReflectedSrw);
  const auto functional = constant_functional(1.0);
  const auto count = static_cast<std::uint64_t>(state.range(0));
  MCOptions options;
  options.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate_q_functional(sampler, weight, 32, functional, count, 7, options));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_QFunctionalSampling)->Arg(10000)->Arg(100000);

void BM_ScalingProbe(benchmark::State& state) {
  MCOptions options;
  options.threads = 1;
  const ScalingSpec scaling{1.0, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(estimate_q_g_tail(scaling, 100000, 7, options));
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_ScalingProbe)->Arg(25)->Arg(400);

}  // namespace

BENCHMARK_MAIN();
