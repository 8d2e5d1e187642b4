#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agf/alert.hpp"
#include "agf/attack_graph.hpp"
#include "agf/automaton.hpp"
#include "agf/episodes.hpp"
#include "agf/forecast.hpp"
#include "agf/traces.hpp"

namespace agf {

struct PipelineConfig {
  SourceKind mode = SourceKind::ids;
  EpisodeConfig episodes;
  LearnParams learn;
  ForecastConfig forecast;
  unsigned jobs = 1;
};

/// Everything one execution over an alert pool produces.
struct PipelineResult {
  std::vector<Alert> alerts;
  std::vector<EpisodeSequence> sequences;
  std::vector<Trace> traces;
  std::optional<Automaton> spdfa;  // empty when there are no traces
  std::vector<std::optional<Forecast>> forecasts;  // parallel to traces
  std::vector<AttackGraph> graphs;
};

/// alerts -> episodes -> traces -> learn -> reverse -> forecast -> AGs.
PipelineResult run_pipeline(std::vector<Alert> alerts, const PipelineConfig& config);

/// JSON line for one forecast: `{key, strategy, window, top:[{symbol,prob}], no_path}`.
std::string forecast_to_json(const SequenceKey& key, const Forecast& forecast);

struct SnapshotSummary {
  std::size_t index = 0;  // window number, 1-based; 0 for an offline run
  std::size_t alerts = 0;
  std::size_t traces = 0;
  std::size_t partial_traces = 0;
  std::size_t graphs = 0;
  double mean_vertices = 0.0;
  double mean_edges = 0.0;
  bool reused = false;
};

SnapshotSummary summarize(const PipelineResult& result);

/// Writes model.json, traces.txt, forecasts.jsonl, the AG DOT files, ag_index.json
/// and summary.json into `dir`. Output is a pure function of `result`.
std::vector<std::filesystem::path> write_snapshot(const PipelineResult& result,
                                                  const std::filesystem::path& dir);

}  // namespace agf
