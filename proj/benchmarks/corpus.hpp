#pragma once

#include <string>
#include <vector>

#include "agf/agf.hpp"

namespace agf::bench {

inline const std::vector<Trace>& traces() {
  static const auto t = encode(build_sequences(synth_corpus(default_synth_spec(), 0), SourceKind::ids), SourceKind::ids);
  return t;
}

inline const Automaton& spdfa() {
  static const auto m = learn(training_sequences(traces(), true), Direction::suffix);
  return m;
}

// Every trace prefix of the given length, chronological.
inline std::vector<std::vector<std::string>> prefixes(std::size_t length) {
  std::vector<std::vector<std::string>> out;
  for (const auto& t : traces()) {
    if (t.symbols.size() < length) continue;
    auto s = t.strings();
    s.resize(length);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace agf::bench
