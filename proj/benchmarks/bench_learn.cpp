#include <benchmark/benchmark.h>

#include "corpus.hpp"

namespace {

using namespace agf;

void learn_suffix(benchmark::State& state) {
  auto seqs = training_sequences(bench::traces(), true);
  seqs.resize(std::min<std::size_t>(seqs.size(), static_cast<std::size_t>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(learn(seqs, Direction::suffix));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(seqs.size()));
}
BENCHMARK(learn_suffix)->Arg(400)->Arg(1600)->Arg(3200)->Unit(benchmark::kMillisecond);

void run_pipeline_default(benchmark::State& state) {
  const auto alerts = synth_corpus(default_synth_spec(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(alerts, PipelineConfig{}));
}
BENCHMARK(run_pipeline_default)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
