#include "agf/baselines.hpp"

#include <algorithm>
#include <random>

namespace agf {

Forecast baseline_random(const std::set<std::string>& alphabet, std::uint64_t seed) {
  Forecast f;
  if (alphabet.empty()) {
    f.no_path = true;
    return f;
  }
  const double p = 1.0 / static_cast<double>(alphabet.size());
  for (const auto& s : alphabet) {
    f.distribution[s] = p;
    f.top.emplace_back(s, p);
  }
  std::mt19937_64 rng(seed);
  std::shuffle(f.top.begin(), f.top.end(), rng);
  f.num_paths = alphabet.size();
  return f;
}

BigramTable::BigramTable(std::span<const std::vector<std::string>> sequences) {
  for (const auto& s : sequences) add(s);
}

void BigramTable::add(std::span<const std::string> sequence) {
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i) ++table_[sequence[i]][sequence[i + 1]];
}

const std::map<std::string, std::int64_t>* BigramTable::successors(const std::string& symbol) const {
  const auto it = table_.find(symbol);
  return it == table_.end() ? nullptr : &it->second;
}

namespace {

Forecast from_counts(const std::map<std::string, std::int64_t>& counts) {
  Forecast f;
  std::int64_t sum = 0;
  for (const auto& [s, c] : counts) sum += c;
  if (sum == 0) {
    f.no_path = true;
    return f;
  }
  for (const auto& [s, c] : counts) f.distribution[s] = static_cast<double>(c) / static_cast<double>(sum);
  f.top = rank(f.distribution);
  f.num_paths = 1;
  return f;
}

}  // namespace

Forecast baseline_frequency(const BigramTable& table, const std::string& last_symbol) {
  const auto* succ = table.successors(last_symbol);
  if (!succ) {
    Forecast f;
    f.no_path = true;
    return f;
  }
  return from_counts(*succ);
}

Forecast baseline_pdfa_predict(const Automaton& pdfa, std::span<const std::string> trace) {
  int cur = pdfa.root();
  for (const auto& sym : trace) {
    if (const auto* t = pdfa.step(cur, sym)) {
      cur = t->to;
      continue;
    }
    const Transition* best = nullptr;
    for (auto i : pdfa.outgoing(cur)) {
      const auto& t = pdfa.transitions()[i];
      if (!best || t.count > best->count) best = &t;
    }
    if (!best) {
      Forecast f;
      f.no_path = true;
      return f;
    }
    cur = best->to;
  }
  std::map<std::string, std::int64_t> counts;
  for (auto i : pdfa.outgoing(cur)) counts[pdfa.transitions()[i].symbol] += pdfa.transitions()[i].count;
  return from_counts(counts);
}

}  // namespace agf
