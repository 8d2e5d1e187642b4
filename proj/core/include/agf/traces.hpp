#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agf/episodes.hpp"

namespace agf {

/// `stage|qualifier`; the qualifier is the targeted service (ids) or the
/// severity (edr).
struct Symbol {
  std::string stage;
  std::string qualifier;
  Severity severity = Severity::low;

  std::string str() const { return stage + "|" + qualifier; }
  bool operator==(const Symbol&) const = default;
};

/// Stage part of a rendered symbol, i.e. everything before the first `|`.
std::string_view stage_of(std::string_view symbol) noexcept;

struct Trace {
  SequenceKey key;
  std::vector<Symbol> symbols;  // chronological
  bool is_partial = false;      // last symbol is low or medium severity

  std::vector<std::string> strings() const;
};

/// One trace per non-empty sequence. Throws Error when a stage contains `|`.
std::vector<Trace> encode(std::span<const EpisodeSequence> sequences, SourceKind mode);

/// Training orientation for a model direction: reversed for suffix models.
std::vector<std::vector<std::string>> training_sequences(std::span<const Trace> traces,
                                                         bool reversed);

/// Abbadingo-style file: `<num_traces> <alphabet_size>` then `1 <len> <sym...>`.
std::string write_training_file(std::span<const Trace> traces, bool reversed);
std::string write_training_file(std::span<const std::vector<std::string>> sequences);

/// Inverse of write_training_file. Returns sequences exactly as written.
/// Throws SchemaError on malformed content.
std::vector<std::vector<std::string>> read_training_file(std::string_view text);

}  // namespace agf
