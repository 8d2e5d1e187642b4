#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agf/alert.hpp"

namespace agf {

/// One aggregated attacker action.
struct Episode {
  TimePoint start{};
  TimePoint end{};
  AttackStage attack_stage;
  std::optional<std::string> targeted_service;  // ids mode only
  Severity severity = Severity::low;
  std::vector<std::size_t> alert_ids;  // indices into the source alert list

  bool operator==(const Episode&) const = default;
};

/// ids mode: attacker = src_ip, victim = dst_ip. edr mode: both are the host.
struct SequenceKey {
  std::string attacker;
  std::string victim;

  auto operator<=>(const SequenceKey&) const = default;
  std::string str() const { return attacker + "->" + victim; }
};

struct EpisodeSequence {
  SequenceKey key;
  std::vector<Episode> episodes;  // sorted by start time
};

struct EpisodeConfig {
  /// Width of the frequency buckets, aligned to the epoch.
  Seconds bucket{60};
};

/// Splits alerts of one (key, attack stage) group into episodes with the bucket
/// rule: an episode opens at a non-empty bucket with count c0 and extends over
/// following buckets while they are non-empty and hold at least c0 alerts.
/// `ids` selects the alerts (already time-sorted) out of `alerts`.
std::vector<Episode> detect_episodes(std::span<const Alert> alerts,
                                     std::span<const std::size_t> ids,
                                     const EpisodeConfig& config = {});

/// Groups alerts into per-key episode sequences. Keys come out sorted.
std::vector<EpisodeSequence> build_sequences(std::span<const Alert> alerts, SourceKind mode,
                                             const EpisodeConfig& config = {});

/// Service name for a port (`80` -> `http`); unknown ports render as the number.
std::string service_name(std::uint16_t port);

/// Debug dump, one JSON object per episode.
void write_episodes(std::ostream& out, std::span<const EpisodeSequence> sequences);

}  // namespace agf
