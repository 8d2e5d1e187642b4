#include "agf/forecast.hpp"

#include <algorithm>
#include <cctype>
#include <deque>
#include <map>

#include "agf/error.hpp"
#include "agf/traces.hpp"

namespace agf {

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::FS: return "FS";
    case Strategy::AS: return "AS";
    case Strategy::HC: return "HC";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view text) noexcept {
  std::string up;
  for (char c : text) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "FS") return Strategy::FS;
  if (up == "AS") return Strategy::AS;
  if (up == "HC") return Strategy::HC;
  return std::nullopt;
}

RSPDFA::RSPDFA(const Automaton& spdfa) : model_(&spdfa) {
  if (spdfa.direction() != Direction::suffix) throw Error("forecasting needs a suffix model");
  const auto& states = spdfa.states();
  const auto n = states.size();
  edges_.assign(n, {});
  symbol_.assign(n, std::nullopt);
  stage_.assign(n, {});
  start_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& st = states[i];
    for (auto t : spdfa.incoming(st.id)) {
      const auto& tr = spdfa.transitions()[t];
      if (!symbol_[i]) {
        symbol_[i] = tr.symbol;
        stage_[i] = std::string(stage_of(tr.symbol));
      }
      const double p = st.total > 0 ? static_cast<double>(tr.count) / static_cast<double>(st.total) : 0.0;
      edges_[i].push_back({*spdfa.index_of(tr.from), tr.count, p});
    }
    std::sort(edges_[i].begin(), edges_[i].end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
    if (spdfa.outgoing(st.id).empty()) roots_.push_back(i);
    if (symbol_[i]) by_symbol_[*symbol_[i]].push_back(i);
  }
  for (const auto& [sym, members] : by_symbol_) {
    std::int64_t sum = 0;
    for (auto i : members) sum += states[i].final;
    for (auto i : members)
      start_[i] = sum > 0 ? static_cast<double>(states[i].final) / static_cast<double>(sum)
                          : 1.0 / static_cast<double>(members.size());
  }
}

double RSPDFA::transition_probability(int from_id, int to_id) const {
  const auto from = index_of(from_id);
  const auto to = index_of(to_id);
  if (!from || !to) return 0.0;
  for (const auto& e : edges_[*from])
    if (e.to == *to) return e.prob;
  return 0.0;
}

double RSPDFA::start_probability(std::string_view symbol, int id) const {
  const auto i = index_of(id);
  if (!i || !symbol_[*i] || *symbol_[*i] != symbol) return 0.0;
  return start_[*i];
}

std::span<const std::size_t> RSPDFA::states_with_symbol(std::string_view symbol) const {
  const auto it = by_symbol_.find(symbol);
  if (it == by_symbol_.end()) return {};
  return it->second;
}

std::vector<int> ReachablePath::ids(const RSPDFA& model) const {
  std::vector<int> out;
  out.reserve(states.size());
  for (auto s : states) out.push_back(model.id(s));
  return out;
}

namespace {

// Suffix of a path starting at some (state, offset).
struct Tail {
  std::vector<std::size_t> states;
  std::vector<MatchKind> matched;
};

class PathSearch {
 public:
  PathSearch(const RSPDFA& m, std::span<const std::string> w, const PathSearchOptions& o)
      : model_(m), window_(w), opt_(o) {
    for (const auto& s : w) stages_.emplace_back(stage_of(s));
  }

  std::optional<MatchKind> match(std::size_t state, std::size_t offset) const {
    const auto& sym = model_.out_symbol(state);
    if (!sym) return std::nullopt;
    if (*sym == window_[offset]) return MatchKind::full;
    if (opt_.strategy != Strategy::FS && model_.out_stage(state) == stages_[offset]) return MatchKind::stage;
    return std::nullopt;
  }

  const std::vector<Tail>& tails(std::size_t state, std::size_t offset) {
    const auto key = std::make_pair(state, offset);
    if (opt_.memoize) {
      if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    }
    std::vector<Tail> out;
    if (offset == window_.size()) {
      out.push_back({{state}, {}});
    } else if (!model_.edges(state).empty()) {
      const auto m = match(state, offset);
      std::vector<std::size_t> next;
      MatchKind kind = MatchKind::fallback;
      if (m) {
        kind = *m;
        for (const auto& e : model_.edges(state)) next.push_back(e.to);
      } else if (opt_.strategy == Strategy::HC) {
        const RSPDFA::Edge* best = nullptr;
        for (const auto& e : model_.edges(state))
          if (!best || e.count > best->count || (e.count == best->count && model_.id(e.to) < model_.id(best->to)))
            best = &e;
        next.push_back(best->to);
      }
      for (auto n : next) {
        if (opt_.exclude_sinks && model_.is_sink(n)) continue;
        for (const auto& t : tails(n, offset + 1)) {
          Tail c;
          c.states.reserve(t.states.size() + 1);
          c.states.push_back(state);
          c.states.insert(c.states.end(), t.states.begin(), t.states.end());
          c.matched.push_back(kind);
          c.matched.insert(c.matched.end(), t.matched.begin(), t.matched.end());
          out.push_back(std::move(c));
        }
      }
    }
    if (opt_.memoize) return memo_.emplace(key, std::move(out)).first->second;
    scratch_.push_back(std::move(out));
    return scratch_.back();
  }

 private:
  const RSPDFA& model_;
  std::span<const std::string> window_;
  PathSearchOptions opt_;
  std::vector<std::string> stages_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<Tail>> memo_;
  std::deque<std::vector<Tail>> scratch_;
};

}  // namespace

std::vector<ReachablePath> find_paths(const RSPDFA& model, std::span<const std::string> window,
                                      const PathSearchOptions& options) {
  std::vector<ReachablePath> out;
  if (window.empty()) return out;
  PathSearch search(model, window, options);
  for (std::size_t s = 0; s < model.size(); ++s) {
    if (options.exclude_sinks && model.is_sink(s)) continue;
    if (!search.match(s, 0)) continue;
    for (const auto& t : search.tails(s, 0)) out.push_back({t.states, t.matched, 0.0});
  }
  std::sort(out.begin(), out.end(),
            [](const ReachablePath& a, const ReachablePath& b) { return a.states < b.states; });
  return out;
}

namespace {

double step_weight(const RSPDFA& model, const ReachablePath& path, double factor) {
  double w = 1.0;
  for (std::size_t i = 0; i + 1 < path.states.size(); ++i) {
    double p = 0.0;
    for (const auto& e : model.edges(path.states[i]))
      if (e.to == path.states[i + 1]) p = e.prob;
    const double scale = path.matched[i] == MatchKind::full    ? 2.0 * factor
                         : path.matched[i] == MatchKind::stage ? factor
                                                               : 1.0;
    w *= p * scale;
  }
  return w;
}

}  // namespace

double path_weight(const RSPDFA& model, const ReachablePath& path, double factor) {
  if (path.states.empty()) return 0.0;
  return model.start_probability(path.states.front()) * step_weight(model, path, factor);
}

void assign_path_probabilities(const RSPDFA& model, std::span<ReachablePath> paths, double factor) {
  double sum = 0.0;
  for (auto& p : paths) sum += (p.prob = path_weight(model, p, factor));
  if (sum <= 0.0) {
    sum = 0.0;
    for (auto& p : paths) sum += (p.prob = step_weight(model, p, factor));
  }
  if (sum <= 0.0) {
    for (auto& p : paths) p.prob = 1.0 / static_cast<double>(paths.size());
    return;
  }
  for (auto& p : paths) p.prob /= sum;
}

std::vector<std::pair<std::string, double>> rank(const std::map<std::string, double>& distribution) {
  std::vector<std::pair<std::string, double>> out(distribution.begin(), distribution.end());
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  return out;
}

void ForecastConfig::validate() const {
  if (!(factor >= 1.0)) throw ConfigError("forecast factor f must be >= 1");
  if (window < 1) throw ConfigError("forecast window t must be >= 1");
}

Forecast predict_next(const RSPDFA& model, std::span<const std::string> trace, const ForecastConfig& config) {
  std::vector<ReachablePath> paths;
  return predict_next(model, trace, config, paths);
}

Forecast predict_next(const RSPDFA& model, std::span<const std::string> trace, const ForecastConfig& config,
                      std::vector<ReachablePath>& paths) {
  config.validate();
  Forecast f;
  f.strategy = config.strategy;
  const auto w = std::min(config.window, trace.size());
  f.window = w;
  const auto window = trace.subspan(trace.size() - w);
  paths = find_paths(model, window, {config.strategy, config.memoize, config.exclude_sinks});
  f.num_paths = paths.size();
  if (paths.empty()) {
    f.no_path = true;
    return f;
  }
  assign_path_probabilities(model, paths, config.factor);
  for (const auto& p : paths) {
    const auto& sym = model.out_symbol(p.states.back());
    f.distribution[sym ? *sym : std::string(kEndSymbol)] += p.prob;
  }
  f.top = rank(f.distribution);
  return f;
}

}  // namespace agf
