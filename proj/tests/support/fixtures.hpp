#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "agf/automaton.hpp"
#include "agf/forecast.hpp"

namespace agf::testing {

std::string fixture_path(const std::string& name);
std::string read_file(const std::string& path);

/// Seven-state suffix model with the worked rSPDFA numbers: the vulnD edge
/// out of state 4 into state 2 carries 30 of 42 occurrences, and the states
/// entered on exfil|http (2 and 5) hold 40 and 10 trace starts.
Automaton fig2a_spdfa();
/// Chronological corpus whose learned suffix model is isomorphic to fig2a_spdfa.
std::vector<std::vector<std::string>> fig2a_corpus();

/// Prefix model in which serD|http leads from the root to state 5.
Automaton fig2c_pdfa();

/// Suffix model behind the traversal walkthrough over states 0..6.
Automaton fig2d_spdfa();
inline const std::vector<std::string> kFig2dInput{"serD|http", "vulnD|ssh", "netDOS|dns"};

std::vector<std::vector<std::string>> reversed(const std::vector<std::vector<std::string>>& seqs);

/// Random valid suffix model. Counts come from simulated walks, so count
/// conservation holds by construction. State ids are sparse.
Automaton random_spdfa(std::mt19937_64& rng, int max_states, const std::vector<std::string>& alphabet);

/// Symbols `s|q` over a few stages and services.
std::vector<std::string> small_alphabet(int stages, int services);

/// Random chronological trace of the given length.
std::vector<std::string> random_trace(std::mt19937_64& rng, const std::vector<std::string>& alphabet,
                                      std::size_t length);

/// Chronological trace read off a random walk through the reversed model, so
/// that at least one full-symbol path exists when the walk has the length.
std::vector<std::string> walk_trace(std::mt19937_64& rng, const Automaton& spdfa, std::size_t length);

/// Exhaustive enumeration of every edge path of window length through the
/// reversed model, filtered by the strategy predicate. Works on the suffix
/// model directly. Returns state-id sequences, sorted.
std::vector<std::vector<int>> brute_force_paths(const Automaton& spdfa, const std::vector<std::string>& window,
                                                Strategy strategy);

/// Next-action distribution recomputed from paths and their probabilities.
std::map<std::string, double> next_action_mass(const RSPDFA& model, const std::vector<ReachablePath>& paths);

}  // namespace agf::testing
