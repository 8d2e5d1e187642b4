#include "agf/attack_graph.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "json.hpp"

namespace agf {
namespace {

constexpr std::string_view kUnresolved = "unresolved";
constexpr std::string_view kAllVictims = "all";

constexpr std::array<std::string_view, 12> kPalette = {
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2",
    "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939", "#843c39"};

// Vertex identity inside one AG.
struct VertexKey {
  std::string symbol;
  int sid = -1;
  bool prediction = false;
  bool root = false;
  auto operator<=>(const VertexKey&) const = default;
};

class Builder {
 public:
  explicit Builder(AttackGraph& g) : g_(g) {
    for (std::size_t i = 0; i < g.vertices.size(); ++i) {
      const auto& v = g.vertices[i];
      keys_.emplace(VertexKey{v.symbol, v.sid, v.is_prediction, i == g.root}, i);
    }
    for (std::size_t i = 0; i < g.edges.size(); ++i)
      edges_.emplace(std::make_tuple(g.edges[i].from, g.edges[i].to, g.edges[i].attacker), i);
  }

  std::size_t vertex(const VertexKey& key, Severity severity, bool sink) {
    const auto it = keys_.find(key);
    if (it != keys_.end()) return it->second;
    AGVertex v;
    v.symbol = key.symbol;
    v.sid = key.sid;
    v.severity = severity;
    v.is_sink = sink;
    v.is_prediction = key.prediction;
    g_.vertices.push_back(std::move(v));
    keys_.emplace(key, g_.vertices.size() - 1);
    return g_.vertices.size() - 1;
  }

  void edge(std::size_t from, std::size_t to, const std::string& attacker, std::optional<double> prob) {
    const auto key = std::make_tuple(from, to, attacker);
    const auto it = edges_.find(key);
    if (it == edges_.end()) {
      g_.edges.push_back({from, to, attacker, prob});
      edges_.emplace(key, g_.edges.size() - 1);
    } else if (prob) {
      auto& p = g_.edges[it->second].probability;
      p = p ? std::max(*p, *prob) : *prob;
    }
  }

  void visit(std::size_t vertex, const ExtractInput& in, const EpisodeSequence& seq, const Episode& ep) {
    auto& v = g_.vertices[vertex];
    for (auto id : ep.alert_ids) v.signatures.push_back(in.alerts[id].signature);
    std::sort(v.signatures.begin(), v.signatures.end());
    v.signatures.erase(std::unique(v.signatures.begin(), v.signatures.end()), v.signatures.end());
    v.timestamps.push_back({seq.key.attacker, ep.start, ep.end});
    std::sort(v.timestamps.begin(), v.timestamps.end(), [](const VertexVisit& a, const VertexVisit& b) {
      return std::tie(a.attacker, a.first_seen, a.last_seen) < std::tie(b.attacker, b.first_seen, b.last_seen);
    });
  }

  void member(const SequenceKey& key) {
    if (std::find(g_.attackers.begin(), g_.attackers.end(), key.attacker) == g_.attackers.end())
      g_.attackers.push_back(key.attacker);
    const auto it = std::lower_bound(g_.victims.begin(), g_.victims.end(), key.victim);
    if (it == g_.victims.end() || *it != key.victim) g_.victims.insert(it, key.victim);
  }

 private:
  AttackGraph& g_;
  std::map<VertexKey, std::size_t> keys_;
  std::map<std::tuple<std::size_t, std::size_t, std::string>, std::size_t> edges_;
};

std::map<std::string, Severity> symbol_severities(std::span<const Trace> traces) {
  std::map<std::string, Severity> out;
  for (const auto& t : traces)
    for (const auto& s : t.symbols) out.emplace(s.str(), s.severity);
  return out;
}

struct Context {
  const ExtractInput& in;
  std::size_t seq;
  std::vector<int> sids;
  std::vector<std::string> symbols;
};

Context context(const ExtractInput& in, std::size_t seq) {
  Context c{in, seq, {}, in.traces[seq].strings()};
  if (in.spdfa) {
    c.sids = replay_states(*in.spdfa, c.symbols);
  } else {
    c.sids.assign(c.symbols.size(), -1);
  }
  return c;
}

bool sink_of(const ExtractInput& in, int sid) {
  return in.spdfa && sid >= 0 && in.spdfa->state(sid).sink;
}

// Adds the chain of episodes [first, last) followed by `end` to the graph.
void add_chain(AttackGraph& g, const Context& c, std::size_t first, std::size_t last, std::size_t end_vertex,
               std::optional<double> end_prob, bool end_is_episode) {
  Builder b(g);
  const auto& seq = c.in.sequences[c.seq];
  const auto& trace = c.in.traces[c.seq];
  b.member(seq.key);
  AGPath path{seq.key.attacker, seq.key.victim, {}, {}, !end_is_episode};
  for (std::size_t j = first; j < last; ++j) {
    const auto& sym = trace.symbols[j];
    const auto v = b.vertex({c.symbols[j], c.sids[j], false, false}, sym.severity, sink_of(c.in, c.sids[j]));
    b.visit(v, c.in, seq, seq.episodes[j]);
    path.vertices.push_back(v);
    path.episodes.push_back({c.seq, j});
  }
  if (end_is_episode) {
    b.visit(end_vertex, c.in, seq, seq.episodes[last]);
    path.episodes.push_back({c.seq, last});
  }
  path.vertices.push_back(end_vertex);
  for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k) {
    const bool last_edge = k + 2 == path.vertices.size();
    b.edge(path.vertices[k], path.vertices[k + 1], seq.key.attacker, last_edge ? end_prob : std::nullopt);
  }
  g.paths.push_back(std::move(path));
}

AttackGraph* find_graph(std::vector<AttackGraph>& graphs, AGKind kind, std::string_view objective,
                        std::string_view victim) {
  for (auto& g : graphs)
    if (g.kind == kind && g.objective == objective && g.victim == victim) return &g;
  return nullptr;
}

AttackGraph& new_graph(std::vector<AttackGraph>& graphs, AGKind kind, std::string objective, std::string victim,
                       AGVertex root) {
  AttackGraph g;
  g.kind = kind;
  g.objective = std::move(objective);
  g.victim = std::move(victim);
  g.vertices.push_back(std::move(root));
  g.root = 0;
  graphs.push_back(std::move(g));
  return graphs.back();
}

AGVertex prediction_vertex(std::string symbol, Severity severity) {
  AGVertex v;
  v.symbol = std::move(symbol);
  v.severity = severity;
  v.is_prediction = true;
  return v;
}

void place(std::vector<AttackGraph>& graphs, const Context& c, const PartialPath& partial,
           const Forecast& forecast, const std::map<std::string, Severity>& severities) {
  const auto& key = c.in.sequences[c.seq].key;
  const auto last = c.symbols.size();
  std::optional<std::pair<std::string, double>> top;
  if (!forecast.no_path)
    for (const auto& entry : forecast.top)
      if (entry.first != kEndSymbol) {
        top = entry;
        break;
      }

  if (!top) {
    auto* g = find_graph(graphs, AGKind::unresolved, kUnresolved, kAllVictims);
    if (!g) g = &new_graph(graphs, AGKind::unresolved, std::string(kUnresolved), std::string(kAllVictims),
                           prediction_vertex(std::string(kUnresolved), Severity::low));
    add_chain(*g, c, partial.first_episode, last, g->root, std::nullopt, false);
    return;
  }

  const auto& [symbol, prob] = *top;
  const auto sit = severities.find(symbol);
  const auto severity = sit == severities.end() ? Severity::low : sit->second;
  if (severity == Severity::high) {
    if (auto* g = find_graph(graphs, AGKind::objective, symbol, key.victim)) {
      std::size_t pv;
      {
        Builder b(*g);
        pv = b.vertex({symbol, -1, true, false}, severity, false);
      }
      add_chain(*g, c, partial.first_episode, last, pv, prob, false);
    } else {
      auto& ng = new_graph(graphs, AGKind::objective, symbol, key.victim, prediction_vertex(symbol, severity));
      add_chain(ng, c, partial.first_episode, last, ng.root, prob, false);
    }
    return;
  }
  auto* g = find_graph(graphs, AGKind::prediction, symbol, kAllVictims);
  if (!g) g = &new_graph(graphs, AGKind::prediction, symbol, std::string(kAllVictims), prediction_vertex(symbol, severity));
  add_chain(*g, c, partial.first_episode, last, g->root, prob, false);
}

}  // namespace

bool AttackGraph::has_predictions() const {
  return std::any_of(vertices.begin(), vertices.end(), [](const AGVertex& v) { return v.is_prediction; });
}

std::vector<int> replay_states(const Automaton& spdfa, std::span<const std::string> chronological) {
  std::vector<int> out(chronological.size(), -1);
  int cur = spdfa.root();
  for (std::size_t k = chronological.size(); k-- > 0;) {
    const auto* t = spdfa.step(cur, chronological[k]);
    if (!t) break;
    cur = t->to;
    out[k] = cur;
  }
  return out;
}

void place_partial(std::vector<AttackGraph>& graphs, const ExtractInput& input, const PartialPath& partial,
                   const Forecast& forecast) {
  place(graphs, context(input, partial.sequence), partial, forecast, symbol_severities(input.traces));
}

std::vector<AttackGraph> extract(const ExtractInput& input) {
  std::vector<AttackGraph> graphs;
  const auto severities = symbol_severities(input.traces);
  std::vector<std::pair<PartialPath, Context>> partials;

  for (std::size_t s = 0; s < input.sequences.size(); ++s) {
    auto c = context(input, s);
    const auto& trace = input.traces[s];
    const auto& victim = input.sequences[s].key.victim;
    std::size_t first = 0;
    for (std::size_t j = 0; j < trace.symbols.size(); ++j) {
      if (trace.symbols[j].severity != Severity::high) continue;
      const auto& symbol = c.symbols[j];
      auto* g = find_graph(graphs, AGKind::objective, symbol, victim);
      if (!g) {
        AGVertex root;
        root.symbol = symbol;
        root.sid = c.sids[j];
        root.severity = Severity::high;
        root.is_sink = sink_of(input, c.sids[j]);
        g = &new_graph(graphs, AGKind::objective, symbol, victim, std::move(root));
      }
      add_chain(*g, c, first, j, g->root, std::nullopt, true);
      first = j + 1;
    }
    if (first < trace.symbols.size()) partials.emplace_back(PartialPath{s, first}, std::move(c));
  }

  for (const auto& [partial, c] : partials) {
    const auto& f = partial.sequence < input.forecasts.size() ? input.forecasts[partial.sequence] : std::nullopt;
    Forecast none;
    none.no_path = true;
    place(graphs, c, partial, f ? *f : none, severities);
  }

  std::stable_sort(graphs.begin(), graphs.end(), [](const AttackGraph& a, const AttackGraph& b) {
    return std::tie(a.kind, a.objective, a.victim) < std::tie(b.kind, b.objective, b.victim);
  });
  return graphs;
}

namespace {

std::string sanitize(std::string_view s) {
  std::string out;
  for (char ch : s) out += (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') ? ch : '_';
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out;
}

std::string_view shape(Severity s) {
  switch (s) {
    case Severity::low: return "oval";
    case Severity::medium: return "box";
    case Severity::high: return "hexagon";
  }
  return "oval";
}

}  // namespace

std::string dot_file_name(const AttackGraph& graph) {
  return "AG-" + sanitize(graph.objective) + "-" + sanitize(graph.victim) + ".dot";
}

std::string emit_dot(const AttackGraph& g) {
  std::vector<std::size_t> order(g.vertices.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = g.vertices[a];
    const auto& y = g.vertices[b];
    return std::tie(x.sid, x.symbol, x.is_prediction, a) < std::tie(y.sid, y.symbol, y.is_prediction, b);
  });
  std::vector<std::size_t> name(g.vertices.size());
  for (std::size_t i = 0; i < order.size(); ++i) name[order[i]] = i;

  std::ostringstream os;
  os << "digraph \"" << dot_escape(dot_file_name(g).substr(0, dot_file_name(g).size() - 4)) << "\" {\n";
  os << "  graph [label=\"" << dot_escape(g.objective) << " @ " << dot_escape(g.victim)
     << "\", labelloc=t, rankdir=TB];\n";
  os << "  node [fontsize=10];\n";
  for (auto i : order) {
    const auto& v = g.vertices[i];
    os << "  v" << name[i] << " [label=\"" << dot_escape(v.symbol);
    if (v.sid >= 0) os << "\\n" << v.sid;
    os << "\", shape=" << shape(v.severity);
    if (v.is_prediction)
      os << ", style=\"dashed\", color=orange";
    else if (v.is_sink)
      os << ", style=\"dotted\"";
    if (i == g.root) os << ", peripheries=2";
    std::string tip;
    for (const auto& s : v.signatures) tip += (tip.empty() ? "" : "\n") + s;
    os << ", tooltip=\"" << dot_escape(tip) << "\"];\n";
  }
  std::vector<const AGEdge*> edges;
  for (const auto& e : g.edges) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [&](const AGEdge* a, const AGEdge* b) {
    return std::make_tuple(name[a->from], name[a->to], a->attacker) <
           std::make_tuple(name[b->from], name[b->to], b->attacker);
  });
  for (const auto* e : edges) {
    const auto pos = std::find(g.attackers.begin(), g.attackers.end(), e->attacker) - g.attackers.begin();
    os << "  v" << name[e->from] << " -> v" << name[e->to] << " [color=\""
       << kPalette[static_cast<std::size_t>(pos) % kPalette.size()] << "\", tooltip=\"" << dot_escape(e->attacker)
       << "\"";
    if (e->probability) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.1f%%", *e->probability * 100.0);
      os << ", label=\"" << buf << "\"";
    }
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

std::string ag_index_json(std::span<const AttackGraph> graphs) {
  auto arr = nlohmann::json::array();
  for (const auto& g : graphs) {
    std::string kind = g.kind == AGKind::objective ? "objective" : g.kind == AGKind::prediction ? "prediction" : "unresolved";
    arr.push_back({{"file", dot_file_name(g)},
                   {"kind", kind},
                   {"objective", g.objective},
                   {"victim", g.victim},
                   {"victims", g.victims},
                   {"num_paths", g.paths.size()},
                   {"has_predictions", g.has_predictions()}});
  }
  return arr.dump(1) + "\n";
}

}  // namespace agf
