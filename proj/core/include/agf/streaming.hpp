#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "agf/alert.hpp"
#include "agf/pipeline.hpp"

namespace agf {

struct HistoryPolicy {
  /// nullopt: all historical alerts. Otherwise only alerts newer than
  /// `boundary - *sliding` are kept in the pool.
  std::optional<Seconds> sliding;
};

/// `all` or `sliding:<duration>`. Throws ConfigError.
HistoryPolicy parse_history(std::string_view text);

struct ReplayConfig {
  Seconds interval{3600};
  HistoryPolicy history;
  std::filesystem::path output_dir;

  void validate() const;
};

/// Number of windows for a time-sorted corpus: floor(span / interval) + 1.
std::size_t window_count(std::span<const Alert> alerts, Seconds interval);

/// Re-runs the pipeline at every interval boundary on the history-selected
/// pool and writes `output_dir/t<k>/`. A window whose pool is empty, or
/// identical to the previous window's pool, reuses the previous outputs.
std::vector<SnapshotSummary> replay(std::span<const Alert> alerts, const PipelineConfig& pipeline,
                                    const ReplayConfig& config);

}  // namespace agf
