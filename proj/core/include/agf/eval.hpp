#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agf/automaton.hpp"
#include "agf/forecast.hpp"
#include "agf/traces.hpp"

namespace agf {

enum class Method { random, frequency, pdfa, fs, as, hc };

std::string_view to_string(Method m) noexcept;
std::optional<Method> parse_method(std::string_view text) noexcept;
/// `all` or a comma separated list. Throws ConfigError naming the valid names.
std::vector<Method> parse_methods(std::string_view text);
const std::vector<Method>& all_methods();

enum class TargetPosition {
  first_window,  // predict symbol min(t, len-1) from the symbols before it
  last_window,   // predict the last symbol from the t symbols before it
};

struct EvalConfig {
  int k = 5;
  std::size_t t = 5;
  double f = 55.0;
  std::vector<Method> methods = all_methods();
  std::uint64_t seed = 0;
  LearnParams learn;
  TargetPosition target = TargetPosition::first_window;
  /// Each timed prediction is repeated this many times; the mean is reported.
  int runtime_repeats = 1;
  /// Train share of the separate perplexity split.
  double perplexity_train_share = 0.8;

  void validate() const;
};

/// Hit counters for one population of predictions.
struct Tally {
  std::size_t hits = 0;
  std::size_t total = 0;       // including no-path predictions
  std::size_t no_path = 0;

  double rate() const { return total ? double(hits) / double(total) : 0.0; }
  /// Accuracy with no-path predictions left out of the denominator.
  double rate_with_path() const {
    return total > no_path ? double(hits) / double(total - no_path) : 0.0;
  }
};

struct MethodReport {
  Method method = Method::hc;
  Tally low, medium, high;
  Tally utas;
  Tally all;
  double mean_runtime = 0.0;  // seconds per prediction
  std::optional<double> perplexity_train;
  std::optional<double> perplexity_test;

  /// Mean of the low, medium, high and UTAS accuracies.
  double avg_accuracy() const;
  double no_path_rate() const { return all.total ? double(all.no_path) / double(all.total) : 0.0; }
};

struct EvalReport {
  std::vector<MethodReport> methods;
  std::size_t evaluated_traces = 0;
  std::size_t excluded_short = 0;
  std::size_t unseen_traces = 0;

  const MethodReport* find(Method m) const;
  /// One row per method in the column order of the forecasting results table.
  std::string to_csv() const;
  std::string to_json() const;
};

/// True when the stage of `truth` equals the stage of one of the three best
/// predicted symbols. No-path forecasts are misses and the end outcome is
/// skipped.
bool top3_stage_hit(const Forecast& forecast, std::string_view truth);
/// Same with full symbols.
bool top3_symbol_hit(const Forecast& forecast, std::string_view truth);

struct Prediction {
  Forecast forecast;
  std::string truth;
  Severity severity = Severity::low;
};

/// Fraction of predictions with a top-3 stage hit, optionally restricted to
/// truths of one severity.
double top3_as_accuracy(std::span<const Prediction> predictions,
                        std::optional<Severity> severity_filter = std::nullopt);

/// Whether `needle` occurs as a contiguous run inside `haystack`.
bool contains_run(std::span<const std::string> haystack, std::span<const std::string> needle);

/// Test traces that occur in no training trace, not even as a contiguous run.
std::vector<std::size_t> unseen_trace_indices(std::span<const std::vector<std::string>> training,
                                              std::span<const std::vector<std::string>> test);

/// Top-3 AS accuracy over the predictions selected by `unseen`.
double utas_accuracy(std::span<const Prediction> predictions, std::span<const std::size_t> unseen);

/// Seeded shuffle then chunking into k folds of near-equal size.
std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int k, std::uint64_t seed);

/// k-fold cross-validation of every configured method.
EvalReport kfold(std::span<const Trace> traces, const EvalConfig& config);

enum class SweepParam { k, f, length };
std::optional<SweepParam> parse_sweep(std::string_view text) noexcept;

struct SweepRow {
  double value = 0.0;
  Method method = Method::hc;
  double avg_accuracy = 0.0;
  double all_accuracy = 0.0;
  double no_path_rate = 0.0;
  double mean_runtime = 0.0;
};

/// Default grids: k in {5,10,15}, f in {1,2,5,10,25,55,95}, length in 2..7.
std::vector<double> default_sweep_values(SweepParam param);

/// k and f sweeps rerun kfold per value. The length sweep learns on all
/// traces and times predictions from the first `length` symbols of every
/// trace long enough.
std::vector<SweepRow> sweep(std::span<const Trace> traces, SweepParam param,
                            std::span<const double> values, const EvalConfig& base);

std::string sweep_to_csv(SweepParam param, std::span<const SweepRow> rows);

}  // namespace agf
