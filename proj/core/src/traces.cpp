#include "agf/traces.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "agf/error.hpp"

namespace agf {

std::string_view stage_of(std::string_view symbol) noexcept {
  const auto bar = symbol.find('|');
  return bar == std::string_view::npos ? symbol : symbol.substr(0, bar);
}

std::vector<std::string> Trace::strings() const {
  std::vector<std::string> out;
  out.reserve(symbols.size());
  for (const auto& s : symbols) out.push_back(s.str());
  return out;
}

namespace {

std::string strip_spaces(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != ' ' && c != '\t' && c != '\r' && c != '\n') out += c;
  return out;
}

}  // namespace

std::vector<Trace> encode(std::span<const EpisodeSequence> sequences, SourceKind mode) {
  std::vector<Trace> traces;
  for (const auto& seq : sequences) {
    if (seq.episodes.empty()) continue;
    Trace t;
    t.key = seq.key;
    for (const auto& e : seq.episodes) {
      if (e.attack_stage.rendered.find('|') != std::string::npos)
        throw Error("attack stage '" + e.attack_stage.rendered + "' contains '|'");
      Symbol s;
      s.stage = strip_spaces(e.attack_stage.rendered);
      s.severity = e.severity;
      if (mode == SourceKind::ids)
        s.qualifier = e.targeted_service ? strip_spaces(*e.targeted_service) : std::string("unknown");
      else
        s.qualifier = std::string(to_string(e.severity));
      t.symbols.push_back(std::move(s));
    }
    t.is_partial = t.symbols.back().severity != Severity::high;
    traces.push_back(std::move(t));
  }
  return traces;
}

std::vector<std::vector<std::string>> training_sequences(std::span<const Trace> traces, bool reversed) {
  std::vector<std::vector<std::string>> out;
  out.reserve(traces.size());
  for (const auto& t : traces) {
    auto s = t.strings();
    if (reversed) std::reverse(s.begin(), s.end());
    out.push_back(std::move(s));
  }
  return out;
}

std::string write_training_file(std::span<const std::vector<std::string>> sequences) {
  std::set<std::string_view> alphabet;
  for (const auto& s : sequences)
    for (const auto& sym : s) alphabet.insert(sym);
  std::string out = std::to_string(sequences.size()) + " " + std::to_string(alphabet.size()) + "\n";
  for (const auto& s : sequences) {
    out += "1 " + std::to_string(s.size());
    for (const auto& sym : s) out += " " + sym;
    out += "\n";
  }
  return out;
}

std::string write_training_file(std::span<const Trace> traces, bool reversed) {
  return write_training_file(training_sequences(traces, reversed));
}

std::vector<std::vector<std::string>> read_training_file(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("training file: missing header");
  std::size_t n = 0, alphabet = 0;
  {
    std::istringstream h(line);
    if (!(h >> n >> alphabet)) throw SchemaError("training file: bad header '" + line + "'");
  }
  std::vector<std::vector<std::string>> sequences;
  std::set<std::string> seen;
  while (sequences.size() < n && std::getline(in, line)) {
    std::istringstream l(line);
    int label = 0;
    std::size_t len = 0;
    if (!(l >> label >> len)) throw SchemaError("training file: bad trace line '" + line + "'");
    std::vector<std::string> seq;
    std::string sym;
    while (l >> sym) seq.push_back(sym);
    if (seq.size() != len)
      throw SchemaError("training file: declared length " + std::to_string(len) + " but found " +
                        std::to_string(seq.size()) + " symbols");
    seen.insert(seq.begin(), seq.end());
    sequences.push_back(std::move(seq));
  }
  if (sequences.size() != n) throw SchemaError("training file: fewer traces than declared");
  if (seen.size() != alphabet) throw SchemaError("training file: alphabet size mismatch");
  return sequences;
}

}  // namespace agf
