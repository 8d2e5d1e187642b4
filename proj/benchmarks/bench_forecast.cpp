#include <benchmark/benchmark.h>

#include "corpus.hpp"

namespace {

using namespace agf;

void find_paths_by_strategy(benchmark::State& state) {
  const auto strategy = static_cast<Strategy>(state.range(0));
  const auto windows = bench::prefixes(static_cast<std::size_t>(state.range(1)));
  const RSPDFA r(bench::spdfa());
  const PathSearchOptions opt{strategy, state.range(2) != 0};
  std::size_t i = 0, paths = 0;
  for (auto _ : state) {
    const auto p = find_paths(r, windows[i++ % windows.size()], opt);
    paths += p.size();
    benchmark::DoNotOptimize(p);
  }
  state.counters["paths/call"] = benchmark::Counter(double(paths), benchmark::Counter::kAvgIterations);
  state.SetLabel(std::string(to_string(strategy)) + (opt.memoize ? " memo" : " plain"));
}
BENCHMARK(find_paths_by_strategy)
    ->ArgsProduct({{int(Strategy::FS), int(Strategy::AS), int(Strategy::HC)}, {2, 5, 7}, {1}})
    ->Args({int(Strategy::HC), 7, 0});

void predict_next_default(benchmark::State& state) {
  const auto windows = bench::prefixes(5);
  const RSPDFA r(bench::spdfa());
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(predict_next(r, windows[i++ % windows.size()]));
}
BENCHMARK(predict_next_default);

void pdfa_baseline(benchmark::State& state) {
  const auto windows = bench::prefixes(5);
  const auto pdfa = learn(training_sequences(bench::traces(), false), Direction::prefix);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(baseline_pdfa_predict(pdfa, windows[i++ % windows.size()]));
}
BENCHMARK(pdfa_baseline);

}  // namespace
