#include <benchmark/benchmark.h>

#include "forcelab/lab.hpp"

using namespace forcelab;
using namespace forcelab::lab;

namespace {

RunOptions opts(Mode mode) {
  RunOptions o;
  o.mode = mode;
  o.budget = std::chrono::minutes(10);
  return o;
}

Mode mode_of(const benchmark::State& state) { return state.range(0) ? Mode::Parallel : Mode::Serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_Bcd(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(verify_bcd(static_cast<int>(state.range(1)), opts(mode_of(state))));
  label(state);
}
BENCHMARK(BM_Bcd)->ArgsProduct({{0, 1}, {3, 4}})->Unit(benchmark::kMillisecond);

void BM_Amalgam(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(verify_amalgam_claims({2, 3}, opts(mode_of(state))));
  label(state);
}
BENCHMARK(BM_Amalgam)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Embedding(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(verify_embedding_criteria(static_cast<int>(state.range(1)), opts(mode_of(state))));
  label(state);
}
BENCHMARK(BM_Embedding)->ArgsProduct({{0, 1}, {4, 5}})->Unit(benchmark::kMillisecond);

void BM_SweetRandom(benchmark::State& state) {
  SweetCorpus corpus;
  corpus.random_triples = static_cast<int>(state.range(1));
  corpus.models.emplace_back("tree", SweetModel::singletons(share(posets::binary_tree(1))));
  for (auto _ : state) benchmark::DoNotOptimize(verify_sweet_laws(corpus, opts(mode_of(state))));
  label(state);
}
BENCHMARK(BM_SweetRandom)->ArgsProduct({{0, 1}, {250, 1000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
