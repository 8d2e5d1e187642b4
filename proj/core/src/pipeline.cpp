#include "agf/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include "agf/error.hpp"
#include "json.hpp"

namespace agf {

using json = nlohmann::json;

PipelineResult run_pipeline(std::vector<Alert> alerts, const PipelineConfig& config) {
  config.forecast.validate();
  PipelineResult r;
  r.alerts = std::move(alerts);
  r.sequences = build_sequences(r.alerts, config.mode, config.episodes);
  r.traces = encode(r.sequences, config.mode);
  r.forecasts.assign(r.traces.size(), std::nullopt);
  if (!r.traces.empty()) {
    const auto training = training_sequences(r.traces, true);
    r.spdfa = learn(training, Direction::suffix, config.learn);
    const RSPDFA rev(*r.spdfa);

    std::vector<std::size_t> partial;
    for (std::size_t i = 0; i < r.traces.size(); ++i)
      if (r.traces[i].is_partial) partial.push_back(i);
    const auto work = [&](std::size_t begin, std::size_t step) {
      for (std::size_t k = begin; k < partial.size(); k += step) {
        const auto i = partial[k];
        r.forecasts[i] = predict_next(rev, r.traces[i].strings(), config.forecast);
      }
    };
    const auto jobs = std::max<std::size_t>(1, std::min<std::size_t>(config.jobs, partial.size()));
    if (jobs == 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work, j, jobs);
      for (auto& t : pool) t.join();
    }
  }
  ExtractInput in{r.alerts, r.sequences, r.traces, r.spdfa ? &*r.spdfa : nullptr, r.forecasts};
  r.graphs = extract(in);
  return r;
}

std::string forecast_to_json(const SequenceKey& key, const Forecast& forecast) {
  json top = json::array();
  for (const auto& [sym, p] : forecast.top) top.push_back({{"symbol", sym}, {"prob", p}});
  json j{{"key", key.str()},
         {"attacker", key.attacker},
         {"victim", key.victim},
         {"strategy", std::string(to_string(forecast.strategy))},
         {"window", forecast.window},
         {"num_paths", forecast.num_paths},
         {"no_path", forecast.no_path},
         {"top", top}};
  return j.dump();
}

SnapshotSummary summarize(const PipelineResult& r) {
  SnapshotSummary s;
  s.alerts = r.alerts.size();
  s.traces = r.traces.size();
  s.partial_traces = static_cast<std::size_t>(
      std::count_if(r.traces.begin(), r.traces.end(), [](const Trace& t) { return t.is_partial; }));
  s.graphs = r.graphs.size();
  if (!r.graphs.empty()) {
    double v = 0, e = 0;
    for (const auto& g : r.graphs) {
      v += static_cast<double>(g.vertices.size());
      e += static_cast<double>(g.edges.size());
    }
    s.mean_vertices = v / static_cast<double>(r.graphs.size());
    s.mean_edges = e / static_cast<double>(r.graphs.size());
  }
  return s;
}

namespace {

std::filesystem::path write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
  return path;
}

}  // namespace

std::vector<std::filesystem::path> write_snapshot(const PipelineResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  written.push_back(write_file(dir / "model.json", r.spdfa ? export_model(*r.spdfa) : std::string("null\n")));
  written.push_back(write_file(dir / "traces.txt", write_training_file(r.traces, true)));

  std::string lines;
  for (std::size_t i = 0; i < r.traces.size(); ++i)
    if (r.forecasts[i]) lines += forecast_to_json(r.traces[i].key, *r.forecasts[i]) + "\n";
  written.push_back(write_file(dir / "forecasts.jsonl", lines));

  for (const auto& g : r.graphs) written.push_back(write_file(dir / dot_file_name(g), emit_dot(g)));
  written.push_back(write_file(dir / "ag_index.json", ag_index_json(r.graphs)));

  const auto s = summarize(r);
  json j{{"alerts", s.alerts},
         {"traces", s.traces},
         {"partial_traces", s.partial_traces},
         {"graphs", s.graphs},
         {"mean_vertices", s.mean_vertices},
         {"mean_edges", s.mean_edges}};
  written.push_back(write_file(dir / "summary.json", j.dump(1) + "\n"));
  return written;
}

}  // namespace agf
