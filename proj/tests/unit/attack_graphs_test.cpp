#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "agf/attack_graph.hpp"
#include "agf/pipeline.hpp"
#include "agf/synth.hpp"
#include "json.hpp"

namespace agf {
namespace {

const TimePoint kT0{std::chrono::seconds{1541239200}};

struct Step {
  std::string stage;
  Severity severity;
};

// One pair's campaign: each step is one alert, three minutes apart.
void campaign(std::vector<Alert>& out, const std::string& src, const std::string& dst, const std::vector<Step>& steps,
              int start_min = 0) {
  int m = start_min;
  for (const auto& s : steps) {
    Alert a;
    a.timestamp = kT0 + Seconds{60 * m};
    a.signature = "AGF " + s.stage;
    a.src_ip = src;
    a.dst_ip = dst;
    a.dst_port = 80;
    a.attack_stage = {s.stage, std::nullopt, s.stage};
    a.severity = s.severity;
    out.push_back(a);
    m += 3;
  }
}

struct Inputs {
  std::vector<Alert> alerts;
  std::vector<EpisodeSequence> sequences;
  std::vector<Trace> traces;
  std::vector<std::optional<Forecast>> forecasts;

  void finish() {
    std::stable_sort(alerts.begin(), alerts.end(),
                     [](const Alert& a, const Alert& b) { return a.timestamp < b.timestamp; });
    sequences = build_sequences(alerts, SourceKind::ids);
    traces = encode(sequences, SourceKind::ids);
    forecasts.assign(traces.size(), std::nullopt);
  }
  std::size_t index(const std::string& src, const std::string& dst) const {
    for (std::size_t i = 0; i < sequences.size(); ++i)
      if (sequences[i].key == SequenceKey{src, dst}) return i;
    return sequences.size();
  }
  ExtractInput input() const { return {alerts, sequences, traces, nullptr, forecasts}; }
};

Forecast forecast(std::vector<std::pair<std::string, double>> top) {
  Forecast f;
  for (const auto& [s, p] : top) f.distribution[s] = p;
  f.top = rank(f.distribution);
  f.num_paths = 1;
  return f;
}

Forecast no_path() {
  Forecast f;
  f.no_path = true;
  return f;
}

const AttackGraph* find(const std::vector<AttackGraph>& gs, AGKind kind, const std::string& obj) {
  for (const auto& g : gs)
    if (g.kind == kind && g.objective == obj) return &g;
  return nullptr;
}

TEST(Extract, EmptyInputGivesNoGraphs) {
  Inputs empty;
  empty.finish();
  EXPECT_TRUE(extract(empty.input()).empty());
}

TEST(Extract, TailWithoutForecastIsUnresolved) {
  Inputs in;
  campaign(in.alerts, "a", "v", {{"serD", Severity::low}, {"vulnD", Severity::medium}});
  in.finish();
  const ExtractInput x{in.alerts, in.sequences, in.traces, nullptr, {}};
  const auto gs = extract(x);
  ASSERT_EQ(gs.size(), 1u);
  EXPECT_EQ(gs[0].kind, AGKind::unresolved);
  EXPECT_EQ(gs[0].paths.size(), 1u);
}

TEST(Extract, PredictionJoinsExistingObjective) {
  Inputs in;
  campaign(in.alerts, "a1", "10.0.0.24", {{"serD", Severity::low}, {"dManip", Severity::high}});
  campaign(in.alerts, "a2", "10.0.0.24", {{"serD", Severity::low}, {"vulnD", Severity::medium}}, 30);
  in.finish();
  in.forecasts[in.index("a2", "10.0.0.24")] = forecast({{"dManip|http", 0.875}, {"exfil|http", 0.125}});
  const auto gs = extract(in.input());
  ASSERT_EQ(gs.size(), 1u);
  const auto& g = gs[0];
  EXPECT_EQ(g.objective, "dManip|http");
  EXPECT_EQ(g.victim, "10.0.0.24");
  EXPECT_EQ(g.paths.size(), 2u);
  EXPECT_TRUE(g.has_predictions());
  EXPECT_EQ(g.attackers, (std::vector<std::string>{"a1", "a2"}));
  const auto dot = emit_dot(g);
  EXPECT_NE(dot.find("label=\"87.5%\""), std::string::npos) << dot;
  EXPECT_NE(dot.find("style=\"dashed\", color=orange"), std::string::npos);
  bool labelled = false;
  for (const auto& e : g.edges)
    if (g.vertices[e.to].is_prediction) labelled = e.probability && *e.probability == 0.875;
  EXPECT_TRUE(labelled);
}

TEST(Extract, SharedPredictionRootAcrossVictims) {
  Inputs in;
  for (const auto* v : {"h1", "h2", "h3"}) {
    campaign(in.alerts, "a", v, {{"serD", Severity::low}});
  }
  campaign(in.alerts, "b", "h9", {{"vulnD", Severity::medium}}, 40);
  in.finish();
  for (const auto* v : {"h1", "h2", "h3"}) in.forecasts[in.index("a", v)] = forecast({{"vulnD|http", 0.6}, {"serD|http", 0.4}});
  in.forecasts[in.index("b", "h9")] = no_path();
  const auto gs = extract(in.input());
  const auto* g = find(gs, AGKind::prediction, "vulnD|http");
  ASSERT_TRUE(g);
  EXPECT_EQ(g->paths.size(), 3u);
  EXPECT_EQ(g->victims, (std::vector<std::string>{"h1", "h2", "h3"}));
  EXPECT_EQ(g->victim, "all");
  EXPECT_TRUE(g->vertices[g->root].is_prediction);
  const auto* u = find(gs, AGKind::unresolved, "unresolved");
  ASSERT_TRUE(u);
  EXPECT_EQ(u->paths.size(), 1u);
}

TEST(Extract, NovelHighPredictionCreatesGraph) {
  Inputs in;
  campaign(in.alerts, "a", "v1", {{"serD", Severity::low}, {"exfil", Severity::high}});
  campaign(in.alerts, "a", "v2", {{"serD", Severity::low}});
  in.finish();
  in.forecasts[in.index("a", "v2")] = forecast({{"exfil|http", 1.0}});
  const auto gs = extract(in.input());
  ASSERT_EQ(gs.size(), 2u);
  for (const auto& g : gs) EXPECT_EQ(g.objective, "exfil|http");
  const auto& created = gs[0].victim == "v2" ? gs[0] : gs[1];
  EXPECT_EQ(created.victim, "v2");
  EXPECT_TRUE(created.vertices[created.root].is_prediction);
}

TEST(Extract, EndOutcomeIsNotVisualized) {
  Inputs in;
  campaign(in.alerts, "a", "v", {{"serD", Severity::low}});
  in.finish();
  in.forecasts[0] = forecast({{"<end>", 0.7}, {"vulnD|http", 0.3}});
  const auto gs = extract(in.input());
  ASSERT_EQ(gs.size(), 1u);
  EXPECT_EQ(gs[0].objective, "vulnD|http");
}

TEST(PlacePartial, AppendsToExistingGraph) {
  Inputs in;
  campaign(in.alerts, "a", "v", {{"serD", Severity::low}, {"ACE", Severity::high}});
  campaign(in.alerts, "b", "v", {{"vulnD", Severity::medium}}, 30);
  in.finish();
  const auto x = in.input();
  auto gs = extract(x);
  gs.erase(std::remove_if(gs.begin(), gs.end(), [](const AttackGraph& g) { return g.kind != AGKind::objective; }),
           gs.end());
  ASSERT_EQ(gs.size(), 1u);
  place_partial(gs, x, {in.index("b", "v"), 0}, forecast({{"ACE|http", 0.9}, {"serD|http", 0.1}}));
  ASSERT_EQ(gs.size(), 1u);
  EXPECT_EQ(gs[0].paths.size(), 2u);
  EXPECT_TRUE(gs[0].paths.back().predicted);
}

TEST(Extract, InvariantsOnPipelineOutput) {
  auto spec = default_synth_spec();
  spec.attackers = 3;
  spec.victims = 12;
  PipelineConfig pc;
  const auto r = run_pipeline(synth_corpus(spec, 4), pc);
  ASSERT_FALSE(r.graphs.empty());

  std::map<EpisodeRef, int> seen;
  for (const auto& g : r.graphs) {
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
      const bool has_out = std::any_of(g.edges.begin(), g.edges.end(), [&](const AGEdge& e) { return e.from == i; });
      if (g.vertices[i].is_prediction || i == g.root) { EXPECT_FALSE(has_out); }
      if (!has_out && !g.vertices[i].is_prediction) { EXPECT_EQ(i, g.root) << dot_file_name(g); }
    }
    for (const auto& p : g.paths) {
      if (!p.predicted) { EXPECT_EQ(p.vertices.back(), g.root); }
      if (p.predicted) { EXPECT_TRUE(g.vertices[p.vertices.back()].is_prediction); }
      for (std::size_t k = 1; k < p.episodes.size(); ++k) {
        EXPECT_LT(p.episodes[k - 1], p.episodes[k]);
      }
      for (const auto& e : p.episodes) ++seen[e];
    }
    for (const auto& e : g.edges)
      if (g.kind != AGKind::unresolved && g.vertices[e.to].is_prediction) { EXPECT_TRUE(e.probability); }
  }
  std::size_t total = 0;
  for (std::size_t s = 0; s < r.sequences.size(); ++s) {
    for (std::size_t e = 0; e < r.sequences[s].episodes.size(); ++e) {
      EXPECT_EQ(seen[(EpisodeRef{s, e})], 1) << s << ":" << e;
      ++total;
    }
  }
  EXPECT_EQ(seen.size(), total);

  const ExtractInput x{r.alerts, r.sequences, r.traces, &*r.spdfa, r.forecasts};
  EXPECT_EQ(extract(x), r.graphs);
}

TEST(Extract, VerticesCarrySidsFromReplay) {
  auto spec = default_synth_spec();
  spec.attackers = 2;
  spec.victims = 8;
  const auto r = run_pipeline(synth_corpus(spec, 2), PipelineConfig{});
  for (std::size_t s = 0; s < r.traces.size(); ++s) {
    const auto sids = replay_states(*r.spdfa, r.traces[s].strings());
    for (auto id : sids) EXPECT_GE(id, 0);
  }
}

TEST(Dot, DeterministicAndStyled) {
  Inputs in;
  campaign(in.alerts, "a1", "v", {{"serD", Severity::low}, {"vulnD", Severity::medium}, {"ACE", Severity::high}});
  campaign(in.alerts, "a2", "v", {{"serD", Severity::low}, {"ACE", Severity::high}}, 1);
  in.finish();
  const auto gs = extract(in.input());
  ASSERT_EQ(gs.size(), 1u);
  const auto dot = emit_dot(gs[0]);
  EXPECT_EQ(dot, emit_dot(extract(in.input())[0]));
  EXPECT_NE(dot.find("shape=oval"), std::string::npos);
  EXPECT_NE(dot.find("shape=box"), std::string::npos);
  EXPECT_NE(dot.find("shape=hexagon"), std::string::npos);
  std::set<std::string> colors;
  for (std::size_t p = dot.find("color=\"#"); p != std::string::npos; p = dot.find("color=\"#", p + 1))
    colors.insert(dot.substr(p + 7, 7));
  EXPECT_EQ(colors.size(), 2u);
  EXPECT_NE(dot.find("tooltip=\"AGF ACE\""), std::string::npos);
}

TEST(Dot, SinkVerticesAreDotted) {
  AttackGraph g;
  g.objective = "ACE|http";
  g.victim = "v";
  AGVertex root{"ACE|http", 3, Severity::high, false, false, {}, {}};
  AGVertex sink{"serD|http", 7, Severity::low, true, false, {}, {}};
  g.vertices = {root, sink};
  g.edges = {{1, 0, "a", std::nullopt}};
  g.attackers = {"a"};
  EXPECT_NE(emit_dot(g).find("style=\"dotted\""), std::string::npos);
}

TEST(Dot, FileNameIsSanitized) {
  AttackGraph g;
  g.objective = "exfil|http";
  g.victim = "10.0.0.24";
  EXPECT_EQ(dot_file_name(g), "AG-exfil_http-10_0_0_24.dot");
}

TEST(Index, ListsEveryGraph) {
  Inputs in;
  campaign(in.alerts, "a", "v", {{"serD", Severity::low}, {"ACE", Severity::high}});
  in.finish();
  const auto gs = extract(in.input());
  const auto j = nlohmann::json::parse(ag_index_json(gs));
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["file"], dot_file_name(gs[0]));
  EXPECT_EQ(j[0]["objective"], "ACE|http");
  EXPECT_EQ(j[0]["num_paths"], 1);
  EXPECT_EQ(j[0]["has_predictions"], false);
}

}  // namespace
}  // namespace agf
