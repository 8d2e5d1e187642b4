#include "agf/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <numeric>
#include <random>
#include <sstream>

#include "agf/baselines.hpp"
#include "agf/error.hpp"
#include "json.hpp"

namespace agf {

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::random: return "random";
    case Method::frequency: return "frequency";
    case Method::pdfa: return "pdfa";
    case Method::fs: return "fs";
    case Method::as: return "as";
    case Method::hc: return "hc";
  }
  return "?";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> kAll{Method::random, Method::frequency, Method::pdfa,
                                        Method::fs,     Method::as,        Method::hc};
  return kAll;
}

std::optional<Method> parse_method(std::string_view text) noexcept {
  std::string low;
  for (char c : text) low += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  for (auto m : all_methods())
    if (to_string(m) == low) return m;
  return std::nullopt;
}

std::vector<Method> parse_methods(std::string_view text) {
  if (text == "all") return all_methods();
  std::vector<Method> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto item = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    const auto m = parse_method(item);
    if (!m) throw ConfigError("unknown method '" + std::string(item) + "'; valid: random, frequency, pdfa, fs, as, hc, all");
    if (std::find(out.begin(), out.end(), *m) == out.end()) out.push_back(*m);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

void EvalConfig::validate() const {
  if (k < 2) throw ConfigError("k must be >= 2");
  if (t < 1) throw ConfigError("t must be >= 1");
  if (!(f >= 1.0)) throw ConfigError("f must be >= 1");
  if (methods.empty()) throw ConfigError("no methods selected");
  if (runtime_repeats < 1) throw ConfigError("runtime repeats must be >= 1");
  if (!(perplexity_train_share > 0.0 && perplexity_train_share < 1.0))
    throw ConfigError("perplexity train share must be in (0, 1)");
  learn.validate();
}

double MethodReport::avg_accuracy() const {
  double sum = 0.0;
  int n = 0;
  for (const auto* t : {&low, &medium, &high, &utas}) {
    if (t->total == 0) continue;
    sum += t->rate();
    ++n;
  }
  return n ? sum / n : 0.0;
}

const MethodReport* EvalReport::find(Method m) const {
  for (const auto& r : methods)
    if (r.method == m) return &r;
  return nullptr;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

std::string EvalReport::to_csv() const {
  std::ostringstream os;
  os << "method,low,medium,high,utas,avg_accuracy,all,all_with_path,no_path_rate,mean_runtime_s,"
        "perplexity_train,perplexity_test\n";
  for (const auto& r : methods) {
    os << to_string(r.method) << "," << num(r.low.rate()) << "," << num(r.medium.rate()) << ","
       << num(r.high.rate()) << "," << num(r.utas.rate()) << "," << num(r.avg_accuracy()) << ","
       << num(r.all.rate()) << "," << num(r.all.rate_with_path()) << "," << num(r.no_path_rate()) << ","
       << num(r.mean_runtime) << "," << (r.perplexity_train ? num(*r.perplexity_train) : "") << ","
       << (r.perplexity_test ? num(*r.perplexity_test) : "") << "\n";
  }
  return os.str();
}

std::string EvalReport::to_json() const {
  using nlohmann::json;
  const auto tally = [](const Tally& t) {
    return json{{"hits", t.hits}, {"total", t.total}, {"no_path", t.no_path}, {"rate", t.rate()},
                {"rate_with_path", t.rate_with_path()}};
  };
  json j{{"evaluated_traces", evaluated_traces}, {"excluded_short", excluded_short}, {"unseen_traces", unseen_traces}};
  j["methods"] = json::array();
  for (const auto& r : methods) {
    json m{{"method", std::string(to_string(r.method))},
           {"low", tally(r.low)},
           {"medium", tally(r.medium)},
           {"high", tally(r.high)},
           {"utas", tally(r.utas)},
           {"all", tally(r.all)},
           {"avg_accuracy", r.avg_accuracy()},
           {"no_path_rate", r.no_path_rate()},
           {"mean_runtime_s", r.mean_runtime}};
    m["perplexity_train"] = r.perplexity_train ? json(*r.perplexity_train) : json(nullptr);
    m["perplexity_test"] = r.perplexity_test ? json(*r.perplexity_test) : json(nullptr);
    j["methods"].push_back(m);
  }
  return j.dump(1) + "\n";
}

namespace {

template <typename Pred>
bool top3_hit(const Forecast& f, std::string_view truth, Pred same) {
  if (f.no_path) return false;
  // The end outcome is not an action, so it does not take one of the three slots.
  std::size_t ranked = 0;
  for (const auto& [symbol, p] : f.top) {
    if (symbol == kEndSymbol) continue;
    if (same(symbol, truth)) return true;
    if (++ranked == 3) break;
  }
  return false;
}

}  // namespace

bool top3_stage_hit(const Forecast& f, std::string_view truth) {
  return top3_hit(f, truth, [](std::string_view a, std::string_view b) { return stage_of(a) == stage_of(b); });
}

bool top3_symbol_hit(const Forecast& f, std::string_view truth) {
  return top3_hit(f, truth, [](std::string_view a, std::string_view b) { return a == b; });
}

double top3_as_accuracy(std::span<const Prediction> predictions, std::optional<Severity> filter) {
  std::size_t hits = 0, total = 0;
  for (const auto& p : predictions) {
    if (filter && p.severity != *filter) continue;
    ++total;
    hits += top3_stage_hit(p.forecast, p.truth);
  }
  return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

bool contains_run(std::span<const std::string> haystack, std::span<const std::string> needle) {
  if (needle.empty()) return true;
  if (needle.size() > haystack.size()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

std::vector<std::size_t> unseen_trace_indices(std::span<const std::vector<std::string>> training,
                                              std::span<const std::vector<std::string>> test) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < test.size(); ++i) {
    const bool seen = std::any_of(training.begin(), training.end(),
                                  [&](const std::vector<std::string>& tr) { return contains_run(tr, test[i]); });
    if (!seen) out.push_back(i);
  }
  return out;
}

double utas_accuracy(std::span<const Prediction> predictions, std::span<const std::size_t> unseen) {
  if (unseen.empty()) return 0.0;
  std::size_t hits = 0;
  for (auto i : unseen) hits += top3_stage_hit(predictions[i].forecast, predictions[i].truth);
  return static_cast<double>(hits) / static_cast<double>(unseen.size());
}

std::vector<std::vector<std::size_t>> make_folds(std::size_t n, int k, std::uint64_t seed) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
  const auto kk = static_cast<std::size_t>(k);
  std::size_t pos = 0;
  for (std::size_t f = 0; f < kk; ++f) {
    const auto size = n / kk + (f < n % kk ? 1 : 0);
    folds[f].assign(idx.begin() + static_cast<std::ptrdiff_t>(pos), idx.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }
  return folds;
}

namespace {

using Clock = std::chrono::steady_clock;

std::vector<std::string> reversed(const std::vector<std::string>& s) { return {s.rbegin(), s.rend()}; }

struct Models {
  Automaton spdfa;
  std::optional<RSPDFA> rev;
  Automaton pdfa;
  BigramTable bigrams;
  std::set<std::string> alphabet;

  Models(const std::vector<std::vector<std::string>>& train, const LearnParams& learn_params) {
    std::vector<std::vector<std::string>> rtrain;
    for (const auto& s : train) {
      rtrain.push_back(reversed(s));
      alphabet.insert(s.begin(), s.end());
    }
    spdfa = learn(rtrain, Direction::suffix, learn_params);
    rev.emplace(spdfa);
    pdfa = learn(train, Direction::prefix, learn_params);
    bigrams = BigramTable(train);
  }
  // rev points into spdfa, so the object must stay put.
  Models(const Models&) = delete;
  Models& operator=(const Models&) = delete;
};

Forecast predict(Method m, const Models& models, std::span<const std::string> prefix, const EvalConfig& cfg,
                 std::uint64_t seed) {
  switch (m) {
    case Method::random: return baseline_random(models.alphabet, seed);
    case Method::frequency: return baseline_frequency(models.bigrams, prefix.back());
    case Method::pdfa: return baseline_pdfa_predict(models.pdfa, prefix);
    case Method::fs:
    case Method::as:
    case Method::hc: {
      ForecastConfig fc;
      fc.strategy = m == Method::fs ? Strategy::FS : m == Method::as ? Strategy::AS : Strategy::HC;
      fc.factor = cfg.f;
      fc.window = cfg.t;
      fc.seed = seed;
      return predict_next(*models.rev, prefix, fc);
    }
  }
  return {};
}

struct Accumulator {
  MethodReport report;
  double runtime_sum = 0.0;
  std::size_t runtime_n = 0;
};

std::pair<Forecast, double> timed(Method m, const Models& models, std::span<const std::string> prefix,
                                  const EvalConfig& cfg, std::uint64_t seed) {
  Forecast f;
  double total = 0.0;
  for (int r = 0; r < cfg.runtime_repeats; ++r) {
    const auto t0 = Clock::now();
    f = predict(m, models, prefix, cfg, seed);
    total += std::chrono::duration<double>(Clock::now() - t0).count();
  }
  return {std::move(f), total / cfg.runtime_repeats};
}

void tally(Tally& t, bool hit, bool no_path) {
  ++t.total;
  t.hits += hit;
  t.no_path += no_path;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = seed ^ (a * 0x9E3779B97F4A7C15ULL) ^ (b + 0x632BE59BD9B4E019ULL + (a << 6));
  x ^= x >> 31;
  x *= 0xBF58476D1CE4E5B9ULL;
  return x ^ (x >> 29);
}

}  // namespace

EvalReport kfold(std::span<const Trace> traces, const EvalConfig& cfg) {
  cfg.validate();
  EvalReport report;
  std::vector<std::vector<std::string>> seqs;
  std::vector<std::vector<Severity>> sevs;
  for (const auto& t : traces) {
    if (t.symbols.size() < 2) {
      ++report.excluded_short;
      continue;
    }
    seqs.push_back(t.strings());
    std::vector<Severity> s;
    for (const auto& sym : t.symbols) s.push_back(sym.severity);
    sevs.push_back(std::move(s));
  }
  if (seqs.size() < static_cast<std::size_t>(cfg.k))
    throw Error("k-fold needs at least k traces with two or more symbols, have " + std::to_string(seqs.size()));

  std::vector<Accumulator> acc;
  for (auto m : cfg.methods) {
    Accumulator a{};
    a.report.method = m;
    acc.push_back(std::move(a));
  }

  const auto folds = make_folds(seqs.size(), cfg.k, cfg.seed);
  for (std::size_t f = 0; f < folds.size(); ++f) {
    std::vector<std::vector<std::string>> train, test;
    std::vector<std::size_t> test_ids;
    for (std::size_t g = 0; g < folds.size(); ++g)
      for (auto i : folds[g]) {
        if (g == f) {
          test.push_back(seqs[i]);
          test_ids.push_back(i);
        } else {
          train.push_back(seqs[i]);
        }
      }
    const Models models(train, cfg.learn);
    const auto unseen = unseen_trace_indices(train, test);
    report.unseen_traces += unseen.size();
    std::vector<bool> is_unseen(test.size(), false);
    for (auto u : unseen) is_unseen[u] = true;

    for (std::size_t j = 0; j < test.size(); ++j) {
      const auto& s = test[j];
      const auto w = cfg.target == TargetPosition::first_window ? std::min(cfg.t, s.size() - 1) : s.size() - 1;
      const std::span<const std::string> prefix(s.data(), w);
      const auto& truth = s[w];
      const auto severity = sevs[test_ids[j]][w];
      const auto seed = mix(cfg.seed, f, j);
      for (auto& a : acc) {
        auto [fc, secs] = timed(a.report.method, models, prefix, cfg, seed);
        const bool hit = top3_stage_hit(fc, truth);
        auto& r = a.report;
        tally(severity == Severity::low ? r.low : severity == Severity::medium ? r.medium : r.high, hit, fc.no_path);
        if (is_unseen[j]) tally(r.utas, hit, fc.no_path);
        tally(r.all, hit, fc.no_path);
        a.runtime_sum += secs;
        ++a.runtime_n;
      }
    }
    report.evaluated_traces += test.size();
  }

  // Perplexity on a separate seeded split.
  std::vector<std::size_t> idx(seqs.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed ^ 0x5DEECE66DULL);
  std::shuffle(idx.begin(), idx.end(), rng);
  const auto cut = std::clamp<std::size_t>(
      static_cast<std::size_t>(cfg.perplexity_train_share * static_cast<double>(idx.size())), 1, idx.size() - 1);
  std::vector<std::vector<std::string>> ptrain, ptest, rtrain, rtest;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto& fw = i < cut ? ptrain : ptest;
    auto& bw = i < cut ? rtrain : rtest;
    fw.push_back(seqs[idx[i]]);
    bw.push_back(reversed(seqs[idx[i]]));
  }
  std::optional<std::pair<double, double>> suffix_pp, prefix_pp;
  const auto need = [&](std::initializer_list<Method> ms) {
    return std::any_of(cfg.methods.begin(), cfg.methods.end(),
                       [&](Method m) { return std::find(ms.begin(), ms.end(), m) != ms.end(); });
  };
  if (need({Method::fs, Method::as, Method::hc})) {
    const auto m = learn(rtrain, Direction::suffix, cfg.learn);
    suffix_pp = {perplexity(m, rtrain), perplexity(m, rtest)};
  }
  if (need({Method::pdfa})) {
    const auto m = learn(ptrain, Direction::prefix, cfg.learn);
    prefix_pp = {perplexity(m, ptrain), perplexity(m, ptest)};
  }

  for (auto& a : acc) {
    auto r = a.report;
    r.mean_runtime = a.runtime_n ? a.runtime_sum / static_cast<double>(a.runtime_n) : 0.0;
    const auto& pp = r.method == Method::pdfa ? prefix_pp
                     : (r.method == Method::fs || r.method == Method::as || r.method == Method::hc)
                         ? suffix_pp
                         : std::optional<std::pair<double, double>>{};
    if (pp) {
      r.perplexity_train = pp->first;
      r.perplexity_test = pp->second;
    }
    report.methods.push_back(r);
  }
  return report;
}

std::optional<SweepParam> parse_sweep(std::string_view text) noexcept {
  if (text == "k") return SweepParam::k;
  if (text == "f") return SweepParam::f;
  if (text == "length") return SweepParam::length;
  return std::nullopt;
}

std::vector<double> default_sweep_values(SweepParam p) {
  switch (p) {
    case SweepParam::k: return {5, 10, 15};
    case SweepParam::f: return {1, 2, 5, 10, 25, 55, 95};
    case SweepParam::length: return {2, 3, 4, 5, 6, 7};
  }
  return {};
}

std::vector<SweepRow> sweep(std::span<const Trace> traces, SweepParam param, std::span<const double> values,
                            const EvalConfig& base) {
  std::vector<SweepRow> rows;
  if (param != SweepParam::length) {
    for (double v : values) {
      auto cfg = base;
      if (param == SweepParam::k) cfg.k = static_cast<int>(v);
      if (param == SweepParam::f) cfg.f = v;
      const auto rep = kfold(traces, cfg);
      for (const auto& r : rep.methods)
        rows.push_back({v, r.method, r.avg_accuracy(), r.all.rate(), r.no_path_rate(), r.mean_runtime});
    }
    return rows;
  }

  base.validate();
  std::vector<std::vector<std::string>> all;
  for (const auto& t : traces)
    if (!t.symbols.empty()) all.push_back(t.strings());
  if (all.empty()) throw Error("length sweep needs at least one trace");
  const Models models(all, base.learn);
  for (double v : values) {
    const auto len = static_cast<std::size_t>(v);
    if (len < 1) throw ConfigError("sweep lengths must be >= 1");
    auto cfg = base;
    cfg.t = len;
    for (auto m : base.methods) {
      Tally t;
      double secs = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& s = all[i];
        if (s.size() <= len) continue;
        auto [fc, dt] = timed(m, models, std::span<const std::string>(s.data(), len), cfg, mix(base.seed, len, i));
        tally(t, top3_stage_hit(fc, s[len]), fc.no_path);
        secs += dt;
        ++n;
      }
      rows.push_back({v, m, t.rate(), t.rate(), t.total ? double(t.no_path) / double(t.total) : 0.0,
                      n ? secs / static_cast<double>(n) : 0.0});
    }
  }
  return rows;
}

std::string sweep_to_csv(SweepParam param, std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << (param == SweepParam::k ? "k" : param == SweepParam::f ? "f" : "length")
     << ",method,avg_accuracy,all_accuracy,no_path_rate,mean_runtime_s\n";
  for (const auto& r : rows)
    os << num(r.value) << "," << to_string(r.method) << "," << num(r.avg_accuracy) << "," << num(r.all_accuracy)
       << "," << num(r.no_path_rate) << "," << num(r.mean_runtime) << "\n";
  return os.str();
}

}  // namespace agf
