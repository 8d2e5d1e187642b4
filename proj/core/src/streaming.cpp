#include "agf/streaming.hpp"

#include <algorithm>
#include <fstream>

#include "agf/error.hpp"
#include "json.hpp"

namespace agf {

HistoryPolicy parse_history(std::string_view text) {
  if (text == "all") return {};
  constexpr std::string_view prefix = "sliding:";
  if (text.substr(0, prefix.size()) == prefix) {
    const auto d = parse_duration(text.substr(prefix.size()));
    if (!d) throw ConfigError("bad sliding duration '" + std::string(text.substr(prefix.size())) + "'");
    if (d->count() <= 0) throw ConfigError("sliding history window must be > 0");
    return {*d};
  }
  throw ConfigError("history must be 'all' or 'sliding:<duration>', got '" + std::string(text) + "'");
}

void ReplayConfig::validate() const {
  if (interval.count() <= 0) throw ConfigError("replay interval must be > 0");
  if (history.sliding && history.sliding->count() <= 0) throw ConfigError("sliding window must be > 0");
}

std::size_t window_count(std::span<const Alert> alerts, Seconds interval) {
  if (alerts.empty()) return 0;
  const auto [lo, hi] = std::minmax_element(alerts.begin(), alerts.end(), [](const Alert& a, const Alert& b) {
    return a.timestamp < b.timestamp;
  });
  const auto span = (hi->timestamp - lo->timestamp).count();
  return static_cast<std::size_t>(span / interval.count()) + 1;
}

std::vector<SnapshotSummary> replay(std::span<const Alert> alerts, const PipelineConfig& pipeline,
                                    const ReplayConfig& config) {
  config.validate();
  std::vector<Alert> sorted(alerts.begin(), alerts.end());
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const Alert& a, const Alert& b) { return a.timestamp < b.timestamp; });
  const auto windows = window_count(sorted, config.interval);
  std::vector<SnapshotSummary> out;
  if (windows == 0) return out;
  std::filesystem::create_directories(config.output_dir);

  const auto first = sorted.front().timestamp;
  std::optional<PipelineResult> previous;
  std::size_t prev_begin = 0, prev_end = 0;
  for (std::size_t k = 1; k <= windows; ++k) {
    // The last window always covers the whole corpus.
    const auto boundary = first + config.interval * static_cast<std::int64_t>(k);
    const auto end = k == windows ? sorted.size()
                                  : static_cast<std::size_t>(
                                        std::lower_bound(sorted.begin(), sorted.end(), boundary,
                                                         [](const Alert& a, TimePoint t) { return a.timestamp < t; }) -
                                        sorted.begin());
    std::size_t begin = 0;
    if (config.history.sliding) {
      const auto cutoff = boundary - *config.history.sliding;
      begin = static_cast<std::size_t>(
          std::lower_bound(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(end), cutoff,
                           [](const Alert& a, TimePoint t) { return a.timestamp < t; }) -
          sorted.begin());
    }
    const bool reuse = previous && ((begin == prev_begin && end == prev_end) || begin == end);
    if (!reuse) {
      previous = run_pipeline(std::vector<Alert>(sorted.begin() + static_cast<std::ptrdiff_t>(begin),
                                                 sorted.begin() + static_cast<std::ptrdiff_t>(end)),
                              pipeline);
      prev_begin = begin;
      prev_end = end;
    }
    write_snapshot(*previous, config.output_dir / ("t" + std::to_string(k)));
    auto s = summarize(*previous);
    s.index = k;
    s.reused = reuse;
    out.push_back(s);
  }

  auto arr = nlohmann::json::array();
  for (const auto& s : out)
    arr.push_back({{"window", s.index},
                   {"dir", "t" + std::to_string(s.index)},
                   {"alerts", s.alerts},
                   {"traces", s.traces},
                   {"partial_traces", s.partial_traces},
                   {"graphs", s.graphs},
                   {"mean_vertices", s.mean_vertices},
                   {"mean_edges", s.mean_edges},
                   {"reused", s.reused}});
  std::ofstream(config.output_dir / "replay.json", std::ios::binary) << arr.dump(1) << "\n";
  return out;
}

}  // namespace agf
