// agf: alert-driven attack graphs and next-action forecasts.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "agf/agf.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace agf;
using agf::cli::Manifest;

namespace {

struct UsageError : Error {
  using Error::Error;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("AGF_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("AGF_SEED is not an unsigned integer: ") + env);
    }
  }
  return 0;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

// --- shared options ---------------------------------------------------------

struct InputOptions {
  std::string path;
  std::string kind = "alerts";  // alerts (normalized JSONL), ids, edr
  std::string map;
  std::string key = "agf";

  void add(CLI::App& app) {
    app.add_option("input", path, "Alert file")->required();
    app.add_option("--kind", kind, "Input format: alerts (normalized JSONL), ids or edr")
        ->check(CLI::IsMember({"alerts", "ids", "edr"}));
    app.add_option("--map", map, "Stage map for raw ids input");
    app.add_option("--key", key, "Host anonymization key for edr input");
  }

  void record(Manifest& m) const {
    m.config()["input_kind"] = kind;
    if (!map.empty()) m.config()["map"] = map;
  }
};

ParseResult parse_input(const std::string& kind, const std::string& path, const std::string& map_path,
                        const std::string& key, Manifest& m) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input " + path);
  m.input(path);
  if (kind == "ids") {
    if (map_path.empty()) throw UsageError("--map is required for ids input");
    if (!fs::exists(map_path)) throw UsageError("stage map not found: " + map_path);
    m.input(map_path);
    return parse_ids(in, StageMap::load(map_path));
  }
  if (kind == "edr") return parse_edr(in, EdrOptions{key});
  ParseResult r;
  r.alerts = read_alerts(in);
  r.report.parsed_records = r.report.emitted_alerts = r.alerts.size();
  return r;
}

std::vector<Alert> load_alerts(const InputOptions& o, Manifest& m) {
  auto r = m.timed("ingest", [&] { return parse_input(o.kind, o.path, o.map, o.key, m); });
  if (r.report.skipped_records > 0) r.report.print(std::cerr);
  return std::move(r.alerts);
}

struct PipelineOptions {
  std::string mode = "auto";
  int bucket = 60;
  LearnParams learn;
  std::string strategy = "hc";
  double factor = 55.0;
  std::size_t window = 5;
  unsigned jobs = 1;

  void add(CLI::App& app, bool with_forecast = true) {
    app.add_option("--mode", mode, "Symbol mode: auto, ids or edr")->check(CLI::IsMember({"auto", "ids", "edr"}));
    app.add_option("--bucket", bucket, "Episode bucket width in seconds")->check(CLI::PositiveNumber);
    app.add_option("--state-count", learn.state_count, "Minimum occurrences of a merge candidate");
    app.add_option("--symbol-count", learn.symbol_count, "Symbols rarer than this are pooled in merge tests");
    app.add_option("--sink-count", learn.sink_count, "States seen fewer times are sinks");
    app.add_option("--alpha", learn.merge_alpha, "Significance of the merge test");
    if (with_forecast) {
      app.add_option("--strategy", strategy, "Traversal strategy: fs, as or hc")
          ->check(CLI::IsMember({"fs", "as", "hc"}, CLI::ignore_case));
      app.add_option("--factor", factor, "Match multiplication factor f");
      app.add_option("--window", window, "Forecast window t");
    }
    app.add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  }

  PipelineConfig build(std::span<const Alert> alerts, std::uint64_t seed) const {
    PipelineConfig c;
    if (mode == "auto")
      c.mode = !alerts.empty() && alerts.front().source_kind == SourceKind::edr ? SourceKind::edr : SourceKind::ids;
    else
      c.mode = mode == "edr" ? SourceKind::edr : SourceKind::ids;
    c.episodes.bucket = Seconds{bucket};
    c.learn = learn;
    c.forecast.strategy = *parse_strategy(strategy);
    c.forecast.factor = factor;
    c.forecast.window = window;
    c.forecast.seed = seed;
    c.jobs = jobs;
    c.learn.validate();
    c.forecast.validate();
    return c;
  }

  void record(Manifest& m, const PipelineConfig& c) const {
    auto& j = m.config();
    j["mode"] = std::string(to_string(c.mode));
    j["bucket_s"] = bucket;
    j["state_count"] = learn.state_count;
    j["symbol_count"] = learn.symbol_count;
    j["sink_count"] = learn.sink_count;
    j["alpha"] = learn.merge_alpha;
    j["strategy"] = std::string(to_string(c.forecast.strategy));
    j["factor"] = factor;
    j["window"] = window;
    j["jobs"] = jobs;
  }
};

// --- commands ---------------------------------------------------------------

struct IngestCmd {
  InputOptions in;
  std::string output;
  std::string report;
  std::string episodes;

  void add(CLI::App& app) {
    in.add(app);
    app.add_option("-o,--output", output, "Normalized alerts (JSONL)")->required();
    app.add_option("--report", report, "Parse report (JSON)");
    app.add_option("--episodes", episodes, "Also dump episodes (JSONL)");
  }

  int run(std::uint64_t seed) {
    Manifest m("ingest", seed);
    in.record(m);
    auto r = m.timed("ingest", [&] { return parse_input(in.kind, in.path, in.map, in.key, m); });
    r.report.print(std::cerr);
    std::ostringstream os;
    write_alerts(os, r.alerts);
    write_file(output, os.str());
    m.output(output);
    if (!report.empty()) {
      nlohmann::json j{{"parsed_records", r.report.parsed_records},
                       {"skipped_records", r.report.skipped_records},
                       {"skipped_host_alerts", r.report.skipped_host_alerts},
                       {"emitted_alerts", r.report.emitted_alerts},
                       {"messages", r.report.messages}};
      write_file(report, j.dump(1) + "\n");
      m.output(report);
    }
    if (!episodes.empty()) {
      const auto mode = in.kind == "edr" ? SourceKind::edr : SourceKind::ids;
      const auto seqs = build_sequences(r.alerts, mode);
      std::ostringstream es;
      write_episodes(es, seqs);
      write_file(episodes, es.str());
      m.output(episodes);
    }
    m.write(output + ".manifest.json");
    return 0;
  }
};

struct RunCmd {
  InputOptions in;
  PipelineOptions pipe;
  std::string output;

  void add(CLI::App& app) {
    in.add(app);
    pipe.add(app);
    app.add_option("-o,--output", output, "Output directory")->required();
  }

  int run(std::uint64_t seed) {
    Manifest m("run", seed);
    in.record(m);
    auto alerts = load_alerts(in, m);
    const auto cfg = pipe.build(alerts, seed);
    pipe.record(m, cfg);
    const auto result = m.timed("pipeline", [&] { return run_pipeline(std::move(alerts), cfg); });
    const auto paths = m.timed("write", [&] { return write_snapshot(result, output); });
    for (const auto& p : paths) m.output(p);
    m.write(fs::path(output) / "manifest.json");
    const auto s = summarize(result);
    std::cout << s.alerts << " alerts, " << s.traces << " traces (" << s.partial_traces << " partial), " << s.graphs
              << " attack graphs -> " << output << "\n";
    return 0;
  }
};

struct ReplayCmd {
  InputOptions in;
  PipelineOptions pipe;
  std::string output;
  std::string interval = "1h";
  std::string history = "all";

  void add(CLI::App& app) {
    in.add(app);
    pipe.add(app);
    app.add_option("-o,--output", output, "Output directory")->required();
    app.add_option("--interval", interval, "Re-execution interval, e.g. 1h or 30m");
    app.add_option("--history", history, "all or sliding:<duration>");
  }

  int run(std::uint64_t seed) {
    Manifest m("replay", seed);
    in.record(m);
    ReplayConfig rc;
    const auto iv = parse_duration(interval);
    if (!iv) throw UsageError("bad --interval '" + interval + "'");
    rc.interval = *iv;
    rc.history = parse_history(history);
    rc.output_dir = output;
    rc.validate();
    auto alerts = load_alerts(in, m);
    const auto cfg = pipe.build(alerts, seed);
    pipe.record(m, cfg);
    m.config()["interval"] = interval;
    m.config()["history"] = history;
    const auto summaries = m.timed("replay", [&] { return replay(alerts, cfg, rc); });
    for (const auto& s : summaries) {
      std::cout << "t" << s.index << ": " << s.alerts << " alerts, " << s.traces << " traces, " << s.graphs
                << " attack graphs" << (s.reused ? " (reused)" : "") << "\n";
      for (const auto& e : fs::directory_iterator(fs::path(output) / ("t" + std::to_string(s.index))))
        m.output(e.path());
    }
    m.output(fs::path(output) / "replay.json");
    m.write(fs::path(output) / "manifest.json");
    return 0;
  }
};

struct EvalCmd {
  InputOptions in;
  int bucket = 60;
  std::string mode = "auto";
  EvalConfig cfg;
  std::string methods = "all";
  std::string sweep_param;
  std::vector<double> values;
  std::string target = "first";
  std::string output;

  void add(CLI::App& app) {
    in.add(app);
    app.add_option("--mode", mode, "Symbol mode: auto, ids or edr")->check(CLI::IsMember({"auto", "ids", "edr"}));
    app.add_option("--bucket", bucket, "Episode bucket width in seconds")->check(CLI::PositiveNumber);
    app.add_option("--k", cfg.k, "Number of folds");
    app.add_option("--t", cfg.t, "Forecast window");
    app.add_option("--f", cfg.f, "Match multiplication factor");
    app.add_option("--methods", methods, "all or a comma separated list of random,frequency,pdfa,fs,as,hc");
    app.add_option("--target", target, "Prediction target: first or last window")
        ->check(CLI::IsMember({"first", "last"}));
    app.add_option("--repeats", cfg.runtime_repeats, "Timing repetitions per prediction");
    app.add_option("--state-count", cfg.learn.state_count, "Minimum occurrences of a merge candidate");
    app.add_option("--symbol-count", cfg.learn.symbol_count, "Symbols rarer than this are pooled in merge tests");
    app.add_option("--sink-count", cfg.learn.sink_count, "States seen fewer times are sinks");
    app.add_option("--alpha", cfg.learn.merge_alpha, "Significance of the merge test");
    app.add_option("--sweep", sweep_param, "Parameter sweep: k, f or length")
        ->check(CLI::IsMember({"k", "f", "length"}));
    app.add_option("--values", values, "Sweep grid, comma separated (defaults per parameter)")->delimiter(',');
    app.add_option("-o,--output", output, "Output directory")->required();
  }

  int run(std::uint64_t seed) {
    Manifest m("eval", seed);
    in.record(m);
    cfg.seed = seed;
    cfg.methods = parse_methods(methods);
    cfg.target = target == "first" ? TargetPosition::first_window : TargetPosition::last_window;
    cfg.validate();
    const auto alerts = load_alerts(in, m);
    SourceKind kind = SourceKind::ids;
    if (mode == "edr" || (mode == "auto" && !alerts.empty() && alerts.front().source_kind == SourceKind::edr))
      kind = SourceKind::edr;
    auto& j = m.config();
    j["mode"] = std::string(to_string(kind));
    j["k"] = cfg.k;
    j["t"] = cfg.t;
    j["f"] = cfg.f;
    j["methods"] = methods;
    j["target"] = target;
    j["repeats"] = cfg.runtime_repeats;

    const auto traces = m.timed("encode", [&] {
      EpisodeConfig ec;
      ec.bucket = Seconds{bucket};
      return encode(build_sequences(alerts, kind, ec), kind);
    });
    if (!sweep_param.empty()) {
      const auto p = *parse_sweep(sweep_param);
      if (values.empty()) values = default_sweep_values(p);
      j["sweep"] = sweep_param;
      j["values"] = values;
      const auto rows = m.timed("sweep", [&] { return sweep(traces, p, values, cfg); });
      const auto path = fs::path(output) / ("sweep_" + sweep_param + ".csv");
      write_file(path, sweep_to_csv(p, rows));
      m.output(path);
      std::cout << sweep_to_csv(p, rows);
    } else {
      const auto report = m.timed("kfold", [&] { return kfold(traces, cfg); });
      const auto csv = fs::path(output) / "eval.csv";
      const auto json = fs::path(output) / "eval.json";
      write_file(csv, report.to_csv());
      write_file(json, report.to_json());
      m.output(csv);
      m.output(json);
      std::cout << report.to_csv();
    }
    m.write(fs::path(output) / "manifest.json");
    return 0;
  }
};

struct ExportModelCmd {
  InputOptions in;
  PipelineOptions pipe;
  std::string direction = "suffix";
  std::string output;
  std::string dot;
  std::string traces_out;

  void add(CLI::App& app) {
    in.add(app);
    pipe.add(app, false);
    app.add_option("--direction", direction, "suffix (reversed traces) or prefix")
        ->check(CLI::IsMember({"suffix", "prefix"}));
    app.add_option("-o,--output", output, "Model JSON")->required();
    app.add_option("--dot", dot, "Also write the automaton as DOT");
    app.add_option("--traces", traces_out, "Also write the training file");
  }

  int run(std::uint64_t seed) {
    Manifest m("export-model", seed);
    in.record(m);
    const auto alerts = load_alerts(in, m);
    const auto cfg = pipe.build(alerts, seed);
    pipe.record(m, cfg);
    m.config()["direction"] = direction;
    const auto dir = direction == "suffix" ? Direction::suffix : Direction::prefix;
    const auto traces = encode(build_sequences(alerts, cfg.mode, cfg.episodes), cfg.mode);
    if (traces.empty()) throw Error("no traces in input");
    const auto seqs = training_sequences(traces, dir == Direction::suffix);
    const auto model = m.timed("learn", [&] { return learn(seqs, dir, cfg.learn); });
    write_file(output, export_model(model));
    m.output(output);
    if (!dot.empty()) {
      write_file(dot, to_dot(model));
      m.output(dot);
    }
    if (!traces_out.empty()) {
      write_file(traces_out, write_training_file(seqs));
      m.output(traces_out);
    }
    m.write(output + ".manifest.json");
    std::cout << model.states().size() << " states, " << model.transitions().size() << " transitions\n";
    return 0;
  }
};

struct ImportModelCmd {
  std::string path;
  std::string dot;
  std::string output;

  void add(CLI::App& app) {
    app.add_option("model", path, "Model JSON")->required();
    app.add_option("--dot", dot, "Write the automaton as DOT");
    app.add_option("-o,--output", output, "Re-export the validated model");
  }

  int run(std::uint64_t seed) {
    Manifest m("import-model", seed);
    const auto text = read_file(path);
    m.input(path);
    Automaton model;
    try {
      model = import_model(text);
    } catch (const ModelValidationError& e) {
      std::cerr << "invalid model " << path << ":\n";
      for (const auto& v : e.violations()) std::cerr << "  " << v << "\n";
      return 1;
    }
    std::cout << to_string(model.direction()) << " model: " << model.states().size() << " states, "
              << model.transitions().size() << " transitions, " << model.alphabet().size() << " symbols\n";
    if (!dot.empty()) {
      write_file(dot, to_dot(model));
      m.output(dot);
    }
    if (!output.empty()) {
      write_file(output, export_model(model));
      m.output(output);
    }
    if (!dot.empty() || !output.empty()) m.write((output.empty() ? dot : output) + ".manifest.json");
    return 0;
  }
};

struct SynthCmd {
  std::string spec;
  std::string output;
  std::string map_out;
  std::string format = "ids";

  void add(CLI::App& app) {
    app.add_option("--spec", spec, "JSON overrides of the generator parameters");
    app.add_option("-o,--output", output, "Alert file")->required();
    app.add_option("--map-out", map_out, "Write the matching stage map");
    app.add_option("--format", format, "ids (raw CSV) or alerts (normalized JSONL)")
        ->check(CLI::IsMember({"ids", "alerts"}));
  }

  int run(std::uint64_t seed) {
    Manifest m("synth", seed);
    auto s = default_synth_spec();
    if (!spec.empty()) {
      s = parse_synth_spec(read_file(spec));
      m.input(spec);
    }
    const auto alerts = synth_corpus(s, seed);
    std::ostringstream os;
    if (format == "ids")
      write_ids_csv(os, alerts);
    else
      write_alerts(os, alerts);
    write_file(output, os.str());
    m.output(output);
    if (!map_out.empty()) {
      std::ostringstream ms;
      const auto map = synth_stage_map(s);
      for (const auto& r : map.rules()) ms << r.pattern << "\t" << r.stage << "\t" << to_string(r.severity) << "\n";
      write_file(map_out, ms.str());
      m.output(map_out);
    }
    m.config()["format"] = format;
    m.write(output + ".manifest.json");
    std::cout << alerts.size() << " alerts -> " << output << "\n";
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Alert-driven attack graphs and next-action forecasting"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "TOML/INI configuration file; flags take precedence");
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed_flag;
  app.add_option("--seed", seed_flag, "Seed for all randomness (default: $AGF_SEED or 0)");

  IngestCmd ingest;
  RunCmd run;
  ReplayCmd rep;
  EvalCmd ev;
  ExportModelCmd exp;
  ImportModelCmd imp;
  SynthCmd syn;
  auto* c_ingest = app.add_subcommand("ingest", "Parse ids/edr alerts into normalized JSONL");
  auto* c_run = app.add_subcommand("run", "Offline pipeline: attack graphs and forecasts");
  auto* c_rep = app.add_subcommand("replay", "Re-run the pipeline in time windows");
  auto* c_ev = app.add_subcommand("eval", "k-fold evaluation and parameter sweeps");
  auto* c_exp = app.add_subcommand("export-model", "Learn an automaton and write model JSON");
  auto* c_imp = app.add_subcommand("import-model", "Validate a model JSON");
  auto* c_syn = app.add_subcommand("synth", "Generate a synthetic alert corpus");
  ingest.add(*c_ingest);
  run.add(*c_run);
  rep.add(*c_rep);
  ev.add(*c_ev);
  exp.add(*c_exp);
  imp.add(*c_imp);
  syn.add(*c_syn);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const auto seed = seed_flag ? *seed_flag : default_seed();
    if (c_ingest->parsed()) return ingest.run(seed);
    if (c_run->parsed()) return run.run(seed);
    if (c_rep->parsed()) return rep.run(seed);
    if (c_ev->parsed()) return ev.run(seed);
    if (c_exp->parsed()) return exp.run(seed);
    if (c_imp->parsed()) return imp.run(seed);
    if (c_syn->parsed()) return syn.run(seed);
  } catch (const UsageError& e) {
    std::cerr << "agf: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "agf: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "agf: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
