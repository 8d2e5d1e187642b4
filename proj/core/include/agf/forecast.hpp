#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agf/automaton.hpp"

namespace agf {

enum class Strategy { FS, AS, HC };
enum class MatchKind { full, stage, fallback };

std::string_view to_string(Strategy s) noexcept;
std::optional<Strategy> parse_strategy(std::string_view text) noexcept;

/// Outcome used when a reachable path ends in a state without outgoing
/// transitions (the trace is expected to stop).
inline constexpr std::string_view kEndSymbol = "<end>";

/// Reversed view of an S-PDFA.
///
/// An S-PDFA transition s -> d on symbol a becomes d -> s on a, weighted by
/// count / total(d). Because every S-PDFA state has a single incoming symbol,
/// every rSPDFA state has a single outgoing symbol; a state's starting
/// probability is its final count normalised over all states sharing that
/// outgoing symbol.
class RSPDFA {
 public:
  struct Edge {
    std::size_t to = 0;  // state index
    std::int64_t count = 0;
    double prob = 0.0;
  };

  /// Throws Error unless `spdfa.direction() == Direction::suffix`.
  explicit RSPDFA(const Automaton& spdfa);

  const Automaton& model() const noexcept { return *model_; }
  std::size_t size() const noexcept { return edges_.size(); }

  int id(std::size_t index) const { return model_->states()[index].id; }
  std::optional<std::size_t> index_of(int id) const { return model_->index_of(id); }

  /// Reversed edges leaving a state, sorted by target index.
  std::span<const Edge> edges(std::size_t index) const { return edges_[index]; }
  /// The one symbol on edges leaving `index`; nullopt when it has none.
  const std::optional<std::string>& out_symbol(std::size_t index) const { return symbol_[index]; }
  std::string_view out_stage(std::size_t index) const { return stage_[index]; }

  bool is_sink(std::size_t index) const { return model_->states()[index].sink; }

  /// Reversed probability of the edge from `from_id` to `to_id` (state ids),
  /// 0 when no such edge exists.
  double transition_probability(int from_id, int to_id) const;
  /// Starting probability of a state for its own outgoing symbol.
  double start_probability(std::size_t index) const { return start_[index]; }
  /// Starting probability P_a(s); 0 when s has no outgoing `a`.
  double start_probability(std::string_view symbol, int id) const;

  /// States that lack outgoing transitions in the S-PDFA.
  const std::vector<std::size_t>& roots() const noexcept { return roots_; }
  /// All states whose outgoing symbol is `symbol`, ascending by index.
  std::span<const std::size_t> states_with_symbol(std::string_view symbol) const;

 private:
  const Automaton* model_;
  std::vector<std::vector<Edge>> edges_;
  std::vector<std::optional<std::string>> symbol_;
  std::vector<std::string> stage_;
  std::vector<double> start_;
  std::vector<std::size_t> roots_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_symbol_;
};

struct ReachablePath {
  std::vector<std::size_t> states;  // state indices, window length + 1 entries
  std::vector<MatchKind> matched;   // one per consumed symbol
  double prob = 0.0;

  std::vector<int> ids(const RSPDFA& model) const;
};

struct PathSearchOptions {
  Strategy strategy = Strategy::HC;
  bool memoize = true;
  bool exclude_sinks = false;
};

/// Every path matching `window` under the strategy. FS needs equal symbols,
/// AS equal stages; HC takes stage matches and, only when the current state
/// offers none, the outgoing edge with the highest count (lowest target id on
/// ties). Paths that hit a state without edges before the window is consumed
/// are discarded. Output is sorted by state sequence; probabilities are 0.
std::vector<ReachablePath> find_paths(const RSPDFA& model, std::span<const std::string> window,
                                      const PathSearchOptions& options = {});

/// Start probability of the first state times, for every step, the edge
/// probability scaled by 2f (full match), f (stage match) or 1 (fallback).
double path_weight(const RSPDFA& model, const ReachablePath& path, double factor);

/// Assigns normalised probabilities to `paths` in place. When every weight
/// is zero (all starting states have zero start count) the start term is
/// dropped and weights are recomputed.
void assign_path_probabilities(const RSPDFA& model, std::span<ReachablePath> paths, double factor);

struct Forecast {
  std::map<std::string, double> distribution;
  std::vector<std::pair<std::string, double>> top;  // by probability desc, then symbol
  Strategy strategy = Strategy::HC;
  bool no_path = false;
  std::size_t window = 0;
  std::size_t num_paths = 0;
};

/// Ranks a distribution: probability descending, symbol ascending on ties.
std::vector<std::pair<std::string, double>> rank(const std::map<std::string, double>& distribution);

struct ForecastConfig {
  Strategy strategy = Strategy::HC;
  double factor = 55.0;
  std::size_t window = 5;
  std::uint64_t seed = 0;
  bool memoize = true;
  bool exclude_sinks = false;

  void validate() const;  // throws ConfigError
};

/// Next-action distribution for the last `config.window` symbols of `trace`.
Forecast predict_next(const RSPDFA& model, std::span<const std::string> trace,
                      const ForecastConfig& config = {});

/// Same, also returning the weighted reachable paths.
Forecast predict_next(const RSPDFA& model, std::span<const std::string> trace,
                      const ForecastConfig& config, std::vector<ReachablePath>& paths);

}  // namespace agf
