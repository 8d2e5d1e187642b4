#include "fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "agf/traces.hpp"

namespace agf::testing {

std::string fixture_path(const std::string& name) { return std::string(AGF_FIXTURE_DIR) + "/" + name; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

struct Edge {
  int from, to;
  const char* symbol;
  std::int64_t count;
};

Automaton build(Direction dir, std::vector<State> states, const std::vector<Edge>& edges) {
  std::vector<Transition> ts;
  for (const auto& e : edges) ts.push_back({e.from, e.to, e.symbol, e.count, 0.0});
  return Automaton(dir, 0, std::move(states), std::move(ts));
}

std::vector<std::vector<std::string>> repeat(std::vector<std::string> seq, int n) {
  return std::vector<std::vector<std::string>>(static_cast<std::size_t>(n), seq);
}

}  // namespace

Automaton fig2a_spdfa() {
  return build(Direction::suffix,
               {{0, 162, 162, 0, false},
                {1, 72, 72, 0, false},
                {2, 70, 30, 40, false},
                {3, 20, 0, 20, false},
                {4, 42, 0, 42, false},
                {5, 72, 62, 10, false},
                {6, 50, 0, 50, false}},
               {{0, 2, "exfil|http", 70},
                {0, 1, "netDOS|http", 72},
                {0, 3, "resHJ|http", 20},
                {1, 5, "exfil|http", 72},
                {2, 4, "vulnD|http", 30},
                {5, 4, "vulnD|http", 12},
                {5, 6, "serD|http", 50}});
}

std::vector<std::vector<std::string>> fig2a_corpus() {
  std::vector<std::vector<std::string>> out;
  const auto add = [&](std::vector<std::string> seq, int n) {
    auto r = repeat(std::move(seq), n);
    out.insert(out.end(), r.begin(), r.end());
  };
  add({"exfil|http"}, 40);
  add({"vulnD|http", "exfil|http"}, 30);
  add({"exfil|http", "netDOS|http"}, 10);
  add({"vulnD|http", "exfil|http", "netDOS|http"}, 12);
  add({"serD|http", "exfil|http", "netDOS|http"}, 50);
  add({"resHJ|http"}, 20);
  return out;
}

Automaton fig2c_pdfa() {
  return build(Direction::prefix,
               {{0, 80, 80, 0, false},
                {1, 10, 0, 10, false},
                {2, 20, 20, 0, false},
                {3, 20, 0, 20, false},
                {4, 30, 0, 30, false},
                {5, 50, 45, 5, false},
                {6, 15, 0, 15, false}},
               {{0, 1, "exfil|http", 10},
                {0, 2, "vulnD|http", 20},
                {2, 3, "exfil|http", 20},
                {0, 5, "serD|http", 50},
                {5, 4, "vulnD|http", 30},
                {5, 6, "exfil|http", 15}});
}

Automaton fig2d_spdfa() {
  return build(Direction::suffix,
               {{0, 7, 7, 0, false},
                {1, 3, 3, 0, false},
                {2, 4, 4, 0, false},
                {3, 3, 3, 0, false},
                {4, 4, 4, 0, false},
                {5, 7, 7, 0, false},
                {6, 7, 0, 7, false}},
               {{0, 1, "resHJ|http", 3},
                {0, 2, "exfil|http", 4},
                {1, 3, "netDOS|dns", 3},
                {2, 4, "dManip|ssh", 4},
                {3, 5, "vulnD|http", 3},
                {4, 5, "vulnD|http", 4},
                {5, 6, "serD|http", 7}});
}

std::vector<std::vector<std::string>> reversed(const std::vector<std::vector<std::string>>& seqs) {
  auto out = seqs;
  for (auto& s : out) std::reverse(s.begin(), s.end());
  return out;
}

std::vector<std::string> small_alphabet(int stages, int services) {
  std::vector<std::string> out;
  for (int s = 0; s < stages; ++s)
    for (int q = 0; q < services; ++q)
      out.push_back(std::string(1, char('a' + s)) + "|" + std::string(1, char('x' + q)));
  return out;
}

Automaton random_spdfa(std::mt19937_64& rng, int max_states, const std::vector<std::string>& alphabet) {
  const auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  const int n = 2 + static_cast<int>(pick(static_cast<std::size_t>(std::max(1, max_states - 1))));

  // Skeleton: each non-root state has one incoming symbol and at least one parent.
  std::vector<std::string> in_symbol(static_cast<std::size_t>(n));
  std::vector<std::map<std::string, int>> out(static_cast<std::size_t>(n));
  std::vector<bool> alive(static_cast<std::size_t>(n), false);
  alive[0] = true;
  for (int s = 1; s < n; ++s) {
    in_symbol[static_cast<std::size_t>(s)] = alphabet[pick(alphabet.size())];
    std::vector<int> parents;
    for (int p = 0; p < s; ++p)
      if (alive[static_cast<std::size_t>(p)] && !out[static_cast<std::size_t>(p)].count(in_symbol[static_cast<std::size_t>(s)]))
        parents.push_back(p);
    if (parents.empty()) continue;
    const int p = parents[pick(parents.size())];
    out[static_cast<std::size_t>(p)][in_symbol[static_cast<std::size_t>(s)]] = s;
    alive[static_cast<std::size_t>(s)] = true;
  }
  const auto extra = pick(static_cast<std::size_t>(n) + 1);
  for (std::size_t k = 0; k < extra; ++k) {
    const int p = static_cast<int>(pick(static_cast<std::size_t>(n)));
    const int s = 1 + static_cast<int>(pick(static_cast<std::size_t>(n - 1)));
    if (!alive[static_cast<std::size_t>(p)] || !alive[static_cast<std::size_t>(s)]) continue;
    auto& o = out[static_cast<std::size_t>(p)];
    if (!o.count(in_symbol[static_cast<std::size_t>(s)])) o[in_symbol[static_cast<std::size_t>(s)]] = s;
  }

  // Counts from simulated walks.
  std::map<std::pair<int, int>, std::int64_t> edge_count;
  std::vector<std::int64_t> total(static_cast<std::size_t>(n), 0), fin(static_cast<std::size_t>(n), 0);
  const int walks = 3 + static_cast<int>(pick(60));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int w = 0; w < walks; ++w) {
    int at = 0;
    ++total[0];
    for (int step = 0;; ++step) {
      const auto& o = out[static_cast<std::size_t>(at)];
      if (o.empty() || step >= 10 || (step > 0 && u(rng) < 0.3)) {
        ++fin[static_cast<std::size_t>(at)];
        break;
      }
      auto it = o.begin();
      std::advance(it, static_cast<long>(pick(o.size())));
      ++edge_count[{at, it->second}];
      at = it->second;
      ++total[static_cast<std::size_t>(at)];
    }
  }

  // Sparse ids: state i gets id 3*i + (i % 2), the root stays 0.
  const auto id = [](int i) { return i == 0 ? 0 : 3 * i + (i % 2); };
  std::vector<State> states;
  std::vector<Transition> transitions;
  for (int i = 0; i < n; ++i) {
    if (total[static_cast<std::size_t>(i)] == 0 && i != 0) continue;
    State st;
    st.id = id(i);
    st.total = total[static_cast<std::size_t>(i)];
    st.final = fin[static_cast<std::size_t>(i)];
    st.cont = st.total - st.final;
    states.push_back(st);
  }
  for (const auto& [e, c] : edge_count)
    transitions.push_back({id(e.first), id(e.second), in_symbol[static_cast<std::size_t>(e.second)], c, 0.0});
  Automaton a(Direction::suffix, 0, std::move(states), std::move(transitions));
  const auto v = a.violations();
  if (!v.empty()) throw std::logic_error("random_spdfa produced an invalid model: " + v.front());
  return a;
}

std::vector<std::string> random_trace(std::mt19937_64& rng, const std::vector<std::string>& alphabet,
                                      std::size_t length) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < length; ++i)
    out.push_back(alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)]);
  return out;
}

namespace {

// Reversed view computed straight from the suffix model.
struct Reversed {
  std::map<int, std::vector<std::pair<int, std::int64_t>>> edges;  // d -> (s, count)
  std::map<int, std::string> symbol;                                // out symbol of d
};

Reversed reverse_view(const Automaton& spdfa) {
  Reversed r;
  for (const auto& t : spdfa.transitions()) {
    r.edges[t.to].push_back({t.from, t.count});
    r.symbol[t.to] = t.symbol;
  }
  return r;
}

}  // namespace

std::vector<std::string> walk_trace(std::mt19937_64& rng, const Automaton& spdfa, std::size_t length) {
  const auto r = reverse_view(spdfa);
  std::vector<int> starts;
  for (const auto& [d, e] : r.edges) starts.push_back(d);
  std::vector<std::string> out;
  if (starts.empty()) return out;
  int at = starts[std::uniform_int_distribution<std::size_t>(0, starts.size() - 1)(rng)];
  while (out.size() < length) {
    const auto it = r.edges.find(at);
    if (it == r.edges.end()) break;
    out.push_back(r.symbol.at(at));
    at = it->second[std::uniform_int_distribution<std::size_t>(0, it->second.size() - 1)(rng)].first;
  }
  return out;
}

std::vector<std::vector<int>> brute_force_paths(const Automaton& spdfa, const std::vector<std::string>& window,
                                                Strategy strategy) {
  const auto r = reverse_view(spdfa);
  std::vector<std::vector<int>> all;
  std::vector<int> cur;
  const auto dfs = [&](auto&& self, int at) -> void {
    cur.push_back(at);
    if (cur.size() == window.size() + 1) {
      all.push_back(cur);
    } else if (auto it = r.edges.find(at); it != r.edges.end()) {
      for (const auto& [to, c] : it->second) self(self, to);
    }
    cur.pop_back();
  };
  for (const auto& st : spdfa.states()) dfs(dfs, st.id);

  const auto stage = [](const std::string& s) { return s.substr(0, s.find('|')); };
  std::vector<std::vector<int>> out;
  for (const auto& p : all) {
    bool ok = true;
    for (std::size_t i = 0; ok && i < window.size(); ++i) {
      const auto& sym = r.symbol.at(p[i]);
      const bool full = sym == window[i];
      const bool st = stage(sym) == stage(window[i]);
      if (strategy == Strategy::FS) {
        ok = full;
      } else if (strategy == Strategy::AS) {
        ok = st;
      } else if (!st) {
        if (i == 0) {
          ok = false;
        } else {
          int best = -1;
          std::int64_t best_count = -1;
          for (const auto& [to, c] : r.edges.at(p[i]))
            if (c > best_count || (c == best_count && to < best)) best = to, best_count = c;
          ok = p[i + 1] == best;
        }
      }
    }
    if (ok) out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, double> next_action_mass(const RSPDFA& model, const std::vector<ReachablePath>& paths) {
  std::map<std::string, double> out;
  for (const auto& p : paths) {
    const int last = model.id(p.states.back());
    std::string next(kEndSymbol);
    for (const auto& t : model.model().transitions())
      if (t.to == last) next = t.symbol;
    out[next] += p.prob;
  }
  return out;
}

}  // namespace agf::testing
