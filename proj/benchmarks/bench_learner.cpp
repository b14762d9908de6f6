#include <benchmark/benchmark.h>

#include "sdt/learner.hpp"
#include "sdt/oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace sdt;

Fragment fragment_of(int64_t i) {
  switch (i) {
    case 0: return Fragment::Propositional;
    case 1: return Fragment::RCC5;
    case 2: return Fragment::RCC8;
    default: return Fragment::HS2Full;
  }
}

// One split search on 100 random 3x3 windows with 10 attributes.
void BM_FindBestDecision(benchmark::State& state) {
  const auto ds = testing::random_anchored(1, 100, 3, 10, 4, 50);
  LearnerConfig cfg;
  cfg.fragment = fragment_of(state.range(0));
  const auto prepared = preprocess(ds, cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_best_decision(prepared.data, cfg, prepared.cache.get()));
  }
  state.SetLabel(std::string(fragment_name(cfg.fragment)));
}
BENCHMARK(BM_FindBestDecision)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_FindBestDecisionNoCache(benchmark::State& state) {
  const auto ds = testing::random_anchored(1, 100, 3, 10, 4, 50);
  LearnerConfig cfg;
  cfg.fragment = Fragment::RCC8;
  for (auto _ : state) benchmark::DoNotOptimize(find_best_decision(ds, cfg));
}
BENCHMARK(BM_FindBestDecisionNoCache)->Unit(benchmark::kMillisecond);

void BM_LearnContainment(benchmark::State& state) {
  const auto task = oracle::generate_containment_task(100, static_cast<int>(state.range(0)), 1);
  const auto ds = task.data.anchored();
  LearnerConfig cfg;
  cfg.fragment = Fragment::RCC8;
  for (auto _ : state) benchmark::DoNotOptimize(learn(ds, cfg));
}
BENCHMARK(BM_LearnContainment)->Arg(5)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_EnumerateRelated(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GridBounds b{n, n};
  const auto rects = enumerate_rectangles(b);
  const auto& ops = operator_set(Fragment::HS2Full);
  for (auto _ : state) {
    std::size_t total = 0;
    for (const auto& op : ops) total += enumerate_related(rects[rects.size() / 2], op->tuples[0], b).size();
    benchmark::DoNotOptimize(total);
  }
}
BENCHMARK(BM_EnumerateRelated)->Arg(3)->Arg(9)->Arg(17);

}  // namespace

BENCHMARK_MAIN();
