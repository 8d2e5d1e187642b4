#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agf/alert.hpp"
#include "agf/automaton.hpp"
#include "agf/episodes.hpp"
#include "agf/forecast.hpp"
#include "agf/traces.hpp"

namespace agf {

struct VertexVisit {
  std::string attacker;
  TimePoint first_seen{};
  TimePoint last_seen{};

  bool operator==(const VertexVisit&) const = default;
};

struct AGVertex {
  std::string symbol;
  int sid = -1;  // S-PDFA state; -1 for prediction vertices or unreplayable steps
  Severity severity = Severity::low;
  bool is_sink = false;
  bool is_prediction = false;
  std::vector<std::string> signatures;  // sorted, unique
  std::vector<VertexVisit> timestamps;

  bool operator==(const AGVertex&) const = default;
};

struct AGEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  std::string attacker;
  std::optional<double> probability;  // set on edges into a prediction

  bool operator==(const AGEdge&) const = default;
};

/// One episode position in the input, used to audit path preservation.
struct EpisodeRef {
  std::size_t sequence = 0;
  std::size_t episode = 0;

  auto operator<=>(const EpisodeRef&) const = default;
};

struct AGPath {
  std::string attacker;
  std::string victim;
  std::vector<std::size_t> vertices;  // chain ordered in time, ends at root or a prediction
  std::vector<EpisodeRef> episodes;   // one per non-prediction vertex in the chain
  bool predicted = false;

  bool operator==(const AGPath&) const = default;
};

enum class AGKind {
  objective,   // rooted at an observed (or predicted) high-severity action for one victim
  prediction,  // rooted at a low/medium predicted action, shared across victims
  unresolved,  // partial paths without any reachable path
};

struct AttackGraph {
  AGKind kind = AGKind::objective;
  std::string objective;            // symbol, or "unresolved"
  std::string victim;               // single victim, or "all"
  std::vector<std::string> victims;  // sorted
  std::vector<AGVertex> vertices;
  std::vector<AGEdge> edges;
  std::vector<std::string> attackers;  // order of first appearance
  std::vector<AGPath> paths;
  std::size_t root = 0;

  bool has_predictions() const;
  bool operator==(const AttackGraph&) const = default;
};

/// A partial trace waiting to be placed, with the tail of the sequence that
/// follows its last objective.
struct PartialPath {
  std::size_t sequence = 0;
  std::size_t first_episode = 0;  // first episode after the last objective
};

struct ExtractInput {
  std::span<const Alert> alerts;
  std::span<const EpisodeSequence> sequences;
  std::span<const Trace> traces;  // parallel to sequences
  const Automaton* spdfa = nullptr;
  /// Parallel to traces; set for partial traces.
  std::span<const std::optional<Forecast>> forecasts;
};

/// S-PDFA state for each position of a chronological trace, replayed from q0
/// over the reversed trace. -1 where the walk leaves the model.
std::vector<int> replay_states(const Automaton& spdfa, std::span<const std::string> chronological);

/// Builds the attack graphs. Each sequence is cut after every high-severity
/// episode; each cut segment joins the objective AG for (symbol, victim).
/// A remaining low/medium tail is a partial path placed by its forecast.
std::vector<AttackGraph> extract(const ExtractInput& input);

/// Places one partial path according to its forecast's top-1 symbol:
/// high severity joins (or creates) the matching objective AG, low/medium
/// joins a prediction-rooted AG shared by every victim, and a forecast with
/// no reachable path goes to the `unresolved` AG.
void place_partial(std::vector<AttackGraph>& graphs, const ExtractInput& input,
                   const PartialPath& partial, const Forecast& forecast);

/// Deterministic Graphviz text for one AG.
std::string emit_dot(const AttackGraph& graph);

/// `AG-<objective>-<victim>.dot`, both parts reduced to [A-Za-z0-9_].
std::string dot_file_name(const AttackGraph& graph);

/// JSON array of `{file, objective, victims, num_paths, has_predictions}`.
std::string ag_index_json(std::span<const AttackGraph> graphs);

}  // namespace agf
