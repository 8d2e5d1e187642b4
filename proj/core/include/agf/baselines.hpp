#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "agf/automaton.hpp"
#include "agf/forecast.hpp"

namespace agf {

/// Uniform 1/|alphabet| over every symbol; `top` is a seeded shuffle.
Forecast baseline_random(const std::set<std::string>& alphabet, std::uint64_t seed);

/// Successor counts of each symbol in training traces.
class BigramTable {
 public:
  BigramTable() = default;
  explicit BigramTable(std::span<const std::vector<std::string>> sequences);

  void add(std::span<const std::string> sequence);
  const std::map<std::string, std::int64_t>* successors(const std::string& symbol) const;

 private:
  std::map<std::string, std::map<std::string, std::int64_t>, std::less<>> table_;
};

/// Normalised successor counts of `last_symbol`; no_path when unseen.
Forecast baseline_frequency(const BigramTable& table, const std::string& last_symbol);

/// Deterministic walk through a prefix PDFA from its root. Unmatched symbols
/// follow the highest-count transition. The forecast is the outgoing count
/// distribution of the state reached; no_path for a state without transitions.
Forecast baseline_pdfa_predict(const Automaton& pdfa, std::span<const std::string> trace);

}  // namespace agf
