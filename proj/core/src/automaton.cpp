#include "agf/automaton.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "agf/error.hpp"
#include "json.hpp"

namespace agf {

using json = nlohmann::json;

std::string_view to_string(Direction d) noexcept { return d == Direction::suffix ? "suffix" : "prefix"; }

void LearnParams::validate() const {
  if (state_count < 1 || symbol_count < 1 || sink_count < 1)
    throw ConfigError("state_count, symbol_count and sink_count must be >= 1");
  if (!(merge_alpha > 0.0 && merge_alpha < 1.0)) throw ConfigError("merge_alpha must be in (0, 1)");
}

Automaton::Automaton(Direction direction, int root, std::vector<State> states,
                     std::vector<Transition> transitions, std::optional<int> sink_count)
    : direction_(direction),
      root_(root),
      sink_count_(sink_count),
      states_(std::move(states)),
      transitions_(std::move(transitions)) {
  std::stable_sort(states_.begin(), states_.end(), [](const State& a, const State& b) { return a.id < b.id; });
  std::stable_sort(transitions_.begin(), transitions_.end(), [](const Transition& a, const Transition& b) {
    if (a.from != b.from) return a.from < b.from;
    if (a.symbol != b.symbol) return a.symbol < b.symbol;
    return a.to < b.to;
  });
  for (std::size_t i = 0; i < states_.size(); ++i) index_.emplace(states_[i].id, i);
  out_.assign(states_.size(), {});
  in_.assign(states_.size(), {});
  for (std::size_t t = 0; t < transitions_.size(); ++t) {
    auto& tr = transitions_[t];
    alphabet_.insert(tr.symbol);
    const auto from = index_of(tr.from);
    const auto to = index_of(tr.to);
    if (from) {
      out_[*from].push_back(t);
      const auto total = states_[*from].total;
      tr.prob = total > 0 ? static_cast<double>(tr.count) / static_cast<double>(total) : 0.0;
    }
    if (to) in_[*to].push_back(t);
  }
}

std::optional<std::size_t> Automaton::index_of(int id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const State& Automaton::state(int id) const {
  const auto i = index_of(id);
  if (!i) throw Error("no state with id " + std::to_string(id));
  return states_[*i];
}

std::span<const std::size_t> Automaton::outgoing(int id) const {
  const auto i = index_of(id);
  if (!i) return {};
  return out_[*i];
}

std::span<const std::size_t> Automaton::incoming(int id) const {
  const auto i = index_of(id);
  if (!i) return {};
  return in_[*i];
}

const Transition* Automaton::step(int id, std::string_view symbol) const {
  const auto out = outgoing(id);
  // Outgoing transitions are sorted by symbol.
  const auto it = std::lower_bound(out.begin(), out.end(), symbol, [&](std::size_t t, std::string_view s) {
    return transitions_[t].symbol < s;
  });
  if (it == out.end() || transitions_[*it].symbol != symbol) return nullptr;
  return &transitions_[*it];
}

std::vector<std::string> Automaton::violations() const {
  std::vector<std::string> v;
  const auto sid = [](int id) { return "state " + std::to_string(id); };

  if (index_.size() != states_.size()) v.push_back("duplicate state ids");
  if (!index_of(root_)) {
    v.push_back("root " + std::to_string(root_) + " is not a state");
    return v;
  }
  for (const auto& t : transitions_) {
    if (!index_of(t.from) || !index_of(t.to))
      v.push_back("transition " + std::to_string(t.from) + "->" + std::to_string(t.to) + " on '" + t.symbol +
                  "' references a missing state");
    if (t.count < 1)
      v.push_back("transition " + std::to_string(t.from) + "->" + std::to_string(t.to) + " has count " +
                  std::to_string(t.count));
    if (t.symbol.empty() || t.symbol.find_first_of(" \t\n") != std::string::npos)
      v.push_back("transition symbol '" + t.symbol + "' is empty or contains whitespace");
  }
  if (!v.empty()) return v;

  for (std::size_t i = 0; i < states_.size(); ++i) {
    const auto& s = states_[i];
    if (s.total < 0 || s.cont < 0 || s.final < 0) v.push_back(sid(s.id) + " has a negative count");

    std::int64_t out_sum = 0;
    for (std::size_t k = 0; k < out_[i].size(); ++k) {
      const auto& t = transitions_[out_[i][k]];
      out_sum += t.count;
      if (k > 0 && transitions_[out_[i][k - 1]].symbol == t.symbol)
        v.push_back("determinism: " + sid(s.id) + " has several transitions on '" + t.symbol + "'");
    }
    std::int64_t in_sum = 0;
    for (auto t : in_[i]) {
      in_sum += transitions_[t].count;
      if (transitions_[t].symbol != transitions_[in_[i].front()].symbol && s.id != root_) {
        v.push_back("milestone property: " + sid(s.id) + " has incoming symbols '" +
                    transitions_[in_[i].front()].symbol + "' and '" + transitions_[t].symbol + "'");
        break;
      }
    }
    if (s.id == root_) {
      if (!in_[i].empty()) v.push_back("root " + sid(s.id) + " has incoming transitions");
    } else if (s.total != in_sum) {
      v.push_back(sid(s.id) + " total " + std::to_string(s.total) + " != sum of incoming counts " +
                  std::to_string(in_sum));
    }
    if (s.cont != out_sum)
      v.push_back(sid(s.id) + " continue " + std::to_string(s.cont) + " != sum of outgoing counts " +
                  std::to_string(out_sum));
    if (s.total != s.cont + s.final)
      v.push_back(sid(s.id) + " total " + std::to_string(s.total) + " != continue + final");
    if (s.total > 0) {
      double mass = static_cast<double>(s.final) / static_cast<double>(s.total);
      for (auto t : out_[i]) mass += transitions_[t].prob;
      if (std::abs(mass - 1.0) > 1e-9) v.push_back(sid(s.id) + " probabilities sum to " + std::to_string(mass));
    }
    if (sink_count_ && s.sink != (s.total < *sink_count_))
      v.push_back(sid(s.id) + " sink flag inconsistent with sink_count " + std::to_string(*sink_count_));
  }
  return v;
}

bool Automaton::operator==(const Automaton& o) const {
  return direction_ == o.direction_ && root_ == o.root_ && states_ == o.states_ &&
         transitions_ == o.transitions_;
}

// --- prefix tree ------------------------------------------------------------

Automaton build_prefix_tree(std::span<const std::vector<std::string>> sequences, Direction direction,
                            int sink_count) {
  struct Node {
    std::int64_t total = 0, final = 0;
    std::map<std::string, int> children;
  };
  std::vector<Node> nodes(1);
  std::map<std::pair<int, std::string>, std::int64_t> counts;
  nodes[0].total = static_cast<std::int64_t>(sequences.size());
  for (const auto& seq : sequences) {
    int cur = 0;
    for (const auto& sym : seq) {
      auto it = nodes[cur].children.find(sym);
      int next;
      if (it == nodes[cur].children.end()) {
        next = static_cast<int>(nodes.size());
        nodes[cur].children.emplace(sym, next);
        nodes.emplace_back();
      } else {
        next = it->second;
      }
      ++counts[{cur, sym}];
      ++nodes[next].total;
      cur = next;
    }
    ++nodes[cur].final;
  }
  std::vector<State> states;
  std::vector<Transition> transitions;
  for (int i = 0; i < static_cast<int>(nodes.size()); ++i) {
    const auto& n = nodes[i];
    states.push_back({i, n.total, n.total - n.final, n.final, n.total < sink_count});
    for (const auto& [sym, child] : n.children) transitions.push_back({i, child, sym, counts[{i, sym}], 0.0});
  }
  return Automaton(direction, 0, std::move(states), std::move(transitions), sink_count);
}

// --- canonical form -----------------------------------------------------------

Automaton canonicalize(const Automaton& model) {
  const auto& states = model.states();
  std::vector<int> new_id(states.size(), -1);
  int next = 0;
  std::deque<std::size_t> queue;
  if (const auto r = model.index_of(model.root())) {
    new_id[*r] = next++;
    queue.push_back(*r);
  }
  const auto drain = [&] {
    while (!queue.empty()) {
      const auto i = queue.front();
      queue.pop_front();
      for (auto t : model.outgoing(states[i].id)) {
        const auto j = *model.index_of(model.transitions()[t].to);
        if (new_id[j] < 0) {
          new_id[j] = next++;
          queue.push_back(j);
        }
      }
    }
  };
  drain();
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (new_id[i] < 0) {
      new_id[i] = next++;
      queue.push_back(i);
      drain();
    }
  }
  std::vector<State> out_states;
  for (std::size_t i = 0; i < states.size(); ++i) {
    auto s = states[i];
    s.id = new_id[i];
    out_states.push_back(s);
  }
  std::vector<Transition> out_transitions;
  for (const auto& t : model.transitions()) {
    auto c = t;
    c.from = new_id[*model.index_of(t.from)];
    c.to = new_id[*model.index_of(t.to)];
    out_transitions.push_back(std::move(c));
  }
  const auto root = model.index_of(model.root()) ? new_id[*model.index_of(model.root())] : 0;
  return Automaton(model.direction(), root, std::move(out_states), std::move(out_transitions),
                   model.sink_count());
}

std::string canonical_form(const Automaton& model) {
  const auto c = canonicalize(model);
  std::ostringstream os;
  os << to_string(c.direction()) << " root " << c.root() << "\n";
  for (const auto& s : c.states())
    os << "s " << s.id << " " << s.total << " " << s.cont << " " << s.final << " " << s.sink << "\n";
  for (const auto& t : c.transitions()) os << "t " << t.from << " " << t.symbol << " " << t.to << " " << t.count << "\n";
  return os.str();
}

// --- JSON -------------------------------------------------------------------

std::string export_model(const Automaton& model) {
  json j;
  j["direction"] = to_string(model.direction());
  j["root"] = model.root();
  if (model.sink_count()) j["sink_count"] = *model.sink_count();
  j["states"] = json::array();
  for (const auto& s : model.states())
    j["states"].push_back({{"id", s.id}, {"total", s.total}, {"continue", s.cont}, {"final", s.final}, {"sink", s.sink}});
  j["transitions"] = json::array();
  for (const auto& t : model.transitions())
    j["transitions"].push_back({{"from", t.from}, {"to", t.to}, {"symbol", t.symbol}, {"count", t.count}});
  return j.dump(1) + "\n";
}

Automaton import_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model JSON: ") + e.what());
  }
  try {
    if (!j.is_object()) throw SchemaError("model JSON: top level must be an object");
    const auto dir = j.at("direction").get<std::string>();
    if (dir != "suffix" && dir != "prefix") throw SchemaError("model JSON: direction must be suffix or prefix");
    std::optional<int> sink_count;
    if (j.contains("sink_count")) sink_count = j["sink_count"].get<int>();
    std::vector<State> states;
    for (const auto& s : j.at("states"))
      states.push_back({s.at("id").get<int>(), s.at("total").get<std::int64_t>(), s.at("continue").get<std::int64_t>(),
                        s.at("final").get<std::int64_t>(), s.at("sink").get<bool>()});
    std::vector<Transition> transitions;
    for (const auto& t : j.at("transitions"))
      transitions.push_back({t.at("from").get<int>(), t.at("to").get<int>(), t.at("symbol").get<std::string>(),
                             t.at("count").get<std::int64_t>(), 0.0});
    Automaton model(dir == "suffix" ? Direction::suffix : Direction::prefix, j.at("root").get<int>(),
                    std::move(states), std::move(transitions), sink_count);
    if (auto v = model.violations(); !v.empty()) throw ModelValidationError(std::move(v));
    return model;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model JSON: ") + e.what());
  }
}

std::string to_dot(const Automaton& model) {
  std::ostringstream os;
  os << "digraph automaton {\n  rankdir=TB;\n  node [shape=ellipse, fontsize=10];\n";
  for (const auto& s : model.states()) {
    os << "  s" << s.id << " [label=\"" << s.id << "\\n" << s.total << " / " << s.cont << " / " << s.final << "\"";
    if (s.sink) os << ", style=dotted";
    if (s.id == model.root()) os << ", peripheries=2";
    os << "];\n";
  }
  for (const auto& t : model.transitions()) {
    char prob[32];
    std::snprintf(prob, sizeof prob, "%.2f", t.prob);
    os << "  s" << t.from << " -> s" << t.to << " [label=\"" << t.symbol << "\\n" << t.count << " (" << prob
       << ")\"];\n";
  }
  os << "}\n";
  return os.str();
}

// --- probabilities ----------------------------------------------------------

double trace_probability(const Automaton& model, std::span<const std::string> sequence,
                         const Smoothing& smoothing) {
  const double eps = smoothing.epsilon;
  const double outcomes = static_cast<double>(model.alphabet().size() + 1);
  const double unseen = eps / outcomes;
  const auto smoothed = [&](std::int64_t count, std::int64_t total) {
    if (total <= 0) return unseen;
    return (1.0 - eps) * static_cast<double>(count) / static_cast<double>(total) + unseen;
  };

  int cur = model.root();
  double p = 1.0;
  for (const auto& sym : sequence) {
    const auto& st = model.state(cur);
    if (const auto* t = model.step(cur, sym)) {
      p *= smoothed(t->count, st.total);
      cur = t->to;
    } else {
      p *= unseen;
    }
  }
  const auto& last = model.state(cur);
  return p * smoothed(last.final, last.total);
}

double perplexity_from_probabilities(std::span<const double> probabilities) {
  if (probabilities.empty()) throw Error("perplexity of an empty trace set");
  double sum = 0.0;
  for (double p : probabilities) {
    if (!(p > 0.0)) throw Error("perplexity: trace probability is zero");
    sum += std::log2(p);
  }
  return std::exp2(-sum / static_cast<double>(probabilities.size()));
}

double perplexity(const Automaton& model, std::span<const std::vector<std::string>> sequences,
                  const Smoothing& smoothing) {
  std::vector<double> probs;
  probs.reserve(sequences.size());
  for (const auto& s : sequences) probs.push_back(trace_probability(model, s, smoothing));
  return perplexity_from_probabilities(probs);
}

}  // namespace agf
