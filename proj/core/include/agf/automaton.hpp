#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace agf {

/// suffix: S-PDFA over reversed traces, root is the final state q0.
/// prefix: ordinary PDFA over forward traces, root is the start state.
enum class Direction { suffix, prefix };

std::string_view to_string(Direction d) noexcept;

struct State {
  int id = 0;
  std::int64_t total = 0;  // sum of incoming transition counts (trace count for the root)
  std::int64_t cont = 0;   // traces continuing to another state
  std::int64_t final = 0;  // traces ending here
  bool sink = false;

  bool operator==(const State&) const = default;
};

struct Transition {
  int from = 0;
  int to = 0;
  std::string symbol;
  std::int64_t count = 0;
  double prob = 0.0;  // count / total(from), derived

  bool operator==(const Transition&) const = default;
};

struct LearnParams {
  int state_count = 5;   // minimum occurrences for a state to be a merge candidate
  int symbol_count = 5;  // symbols rarer than this are pooled in the merge test
  int sink_count = 5;    // states seen fewer times are sinks
  double merge_alpha = 0.05;

  void validate() const;  // throws ConfigError
};

/// States and transitions of a (suffix or prefix) probabilistic DFA.
///
/// Storage is index based; `index_of` maps the user-visible state id (sID)
/// to a position in `states()`. An Automaton is immutable once constructed
/// and may be shared between threads.
class Automaton {
 public:
  Automaton() = default;

  /// Builds from raw parts and derives probabilities. Does not validate;
  /// call `violations()` or use `import_model` for checked construction.
  Automaton(Direction direction, int root, std::vector<State> states,
            std::vector<Transition> transitions, std::optional<int> sink_count = std::nullopt);

  Direction direction() const noexcept { return direction_; }
  int root() const noexcept { return root_; }
  std::optional<int> sink_count() const noexcept { return sink_count_; }
  const std::vector<State>& states() const noexcept { return states_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }

  std::optional<std::size_t> index_of(int id) const;
  const State& state(int id) const;

  /// Transition indices leaving `id`, sorted by symbol.
  std::span<const std::size_t> outgoing(int id) const;
  /// Transition indices entering `id`, sorted by source id.
  std::span<const std::size_t> incoming(int id) const;

  /// The unique transition on `symbol` from `id`, if any.
  const Transition* step(int id, std::string_view symbol) const;

  const std::set<std::string>& alphabet() const noexcept { return alphabet_; }

  /// Every violated invariant (determinism, milestone property, count and
  /// probability conservation, sink flags). Empty when the model is valid.
  std::vector<std::string> violations() const;

  bool operator==(const Automaton& other) const;

 private:
  Direction direction_ = Direction::suffix;
  int root_ = 0;
  std::optional<int> sink_count_;
  std::vector<State> states_;
  std::vector<Transition> transitions_;
  std::unordered_map<int, std::size_t> index_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
  std::set<std::string> alphabet_;
};

/// Tree automaton whose root-to-node paths are exactly the training sequences.
/// Sequences must already be in training orientation.
Automaton build_prefix_tree(std::span<const std::vector<std::string>> sequences, Direction direction,
                            int sink_count = 5);

/// Red-blue state merging with an Alergia (Hoeffding) compatibility test.
/// Only states with the same incoming symbol are merged, so the milestone
/// property holds by construction. States are renumbered canonically.
/// Throws Error on an empty training set.
Automaton learn(std::span<const std::vector<std::string>> sequences, Direction direction,
                const LearnParams& params = {});

/// Breadth-first renumbering from the root, edges visited in symbol order.
Automaton canonicalize(const Automaton& model);
/// Text rendering of the canonical form; equal strings mean isomorphic models.
std::string canonical_form(const Automaton& model);
inline bool isomorphic(const Automaton& a, const Automaton& b) {
  return canonical_form(a) == canonical_form(b);
}

/// Model JSON: `{direction, root, states:[{id,total,continue,final,sink}],
/// transitions:[{from,to,symbol,count}]}`. Probabilities are derived.
std::string export_model(const Automaton& model);
/// Throws SchemaError for structural problems and ModelValidationError
/// listing every violated invariant.
Automaton import_model(std::string_view text);

/// Graphviz rendering, state labels `sID / total / continue / final`.
std::string to_dot(const Automaton& model);

struct Smoothing {
  double epsilon = 1e-6;
};

/// Probability of a sequence given in the model's training orientation: the
/// product of transition probabilities along the deterministic walk times the
/// final probability of the last state. Each state reserves `epsilon` mass
/// spread uniformly over the |alphabet| + 1 outcomes (symbols plus stop);
/// after an unseen symbol the walk stays where it is.
double trace_probability(const Automaton& model, std::span<const std::string> sequence,
                         const Smoothing& smoothing = {});

/// 2^(-(1/N) * sum log2 p_i). Throws Error on empty input or p_i <= 0.
double perplexity_from_probabilities(std::span<const double> probabilities);
double perplexity(const Automaton& model, std::span<const std::vector<std::string>> sequences,
                  const Smoothing& smoothing = {});

}  // namespace agf
