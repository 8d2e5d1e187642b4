#include "agf/synth.hpp"

#include <algorithm>
#include <ostream>
#include <random>
#include <set>

#include "agf/error.hpp"
#include "json.hpp"

namespace agf {

SynthSpec default_synth_spec() {
  SynthSpec s;
  s.stages = {
      {"tarRecon", Severity::low},    {"surfRecon", Severity::low},  {"hostD", Severity::low},
      {"serD", Severity::low},        {"infoD", Severity::low},      {"osFinger", Severity::low},
      {"wScan", Severity::low},       {"netSniff", Severity::low},   {"dnsEnum", Severity::low},
      {"vulnD", Severity::medium},    {"bfCred", Severity::medium},  {"uPrivEsc", Severity::medium},
      {"serSpec", Severity::medium},  {"ACE", Severity::high},       {"rPrivEsc", Severity::high},
      {"exfil", Severity::high},      {"dManip", Severity::high},    {"resHJ", Severity::high},
      {"netDOS", Severity::high},     {"dDelivery", Severity::high}, {"CnC", Severity::high},
  };
  s.playbooks = {
      {"web-exfil", {"tarRecon", "serD", "vulnD", "uPrivEsc", "exfil"}, 1.0},
      {"web-deface", {"surfRecon", "serD", "vulnD", "uPrivEsc", "dManip"}, 1.0},
      {"miner", {"wScan", "serD", "vulnD", "uPrivEsc", "resHJ"}, 1.0},
      {"root", {"osFinger", "serD", "vulnD", "uPrivEsc", "rPrivEsc"}, 1.0},
      {"flood", {"netSniff", "serD", "vulnD", "uPrivEsc", "netDOS"}, 1.0},
      {"rce", {"dnsEnum", "serD", "vulnD", "uPrivEsc", "ACE"}, 1.0},
      {"dropper", {"hostD", "serD", "vulnD", "uPrivEsc", "dDelivery"}, 1.0},
      {"implant", {"infoD", "serD", "vulnD", "uPrivEsc", "CnC"}, 1.0},
      {"brute", {"hostD", "bfCred", "serSpec", "infoD"}, 0.8},
      {"recon", {"tarRecon", "surfRecon", "serD", "infoD"}, 2.0},
      {"scan", {"hostD", "osFinger", "serD", "wScan"}, 1.0},
  };
  return s;
}

SynthSpec parse_synth_spec(std::string_view text) {
  using nlohmann::json;
  auto s = default_synth_spec();
  try {
    const auto j = json::parse(text);
    if (!j.is_object()) throw ConfigError("synth spec must be a JSON object");
    static const std::set<std::string> known{"attackers", "victims",   "start",     "duration",     "participation",
                                             "service_drift", "lead_in_max", "interleave", "late_start", "truncation",
                                             "repeat",    "min_burst", "max_burst", "step_gap",     "ports",
                                             "stages",    "playbooks"};
    for (const auto& [key, value] : j.items())
      if (!known.count(key)) throw ConfigError("synth spec: unknown field '" + key + "'");
    if (j.contains("attackers")) s.attackers = j["attackers"].get<int>();
    if (j.contains("victims")) s.victims = j["victims"].get<int>();
    if (j.contains("start")) {
      const auto t = parse_timestamp(j["start"].get<std::string>());
      if (!t) throw ConfigError("synth spec: bad start timestamp");
      s.start = *t;
    }
    if (j.contains("duration")) {
      const auto d = parse_duration(j["duration"].get<std::string>());
      if (!d) throw ConfigError("synth spec: bad duration");
      s.duration = *d;
    }
    if (j.contains("participation")) s.participation = j["participation"].get<double>();
    if (j.contains("service_drift")) s.service_drift = j["service_drift"].get<double>();
    if (j.contains("lead_in_max")) s.lead_in_max = j["lead_in_max"].get<int>();
    if (j.contains("interleave")) s.interleave = j["interleave"].get<double>();
    if (j.contains("late_start")) s.late_start = j["late_start"].get<double>();
    if (j.contains("truncation")) s.truncation = j["truncation"].get<double>();
    if (j.contains("repeat")) s.repeat = j["repeat"].get<double>();
    if (j.contains("min_burst")) s.min_burst = j["min_burst"].get<int>();
    if (j.contains("max_burst")) s.max_burst = j["max_burst"].get<int>();
    if (j.contains("step_gap")) s.step_gap = Seconds{j["step_gap"].get<std::int64_t>()};
    if (j.contains("ports")) s.ports = j["ports"].get<std::vector<std::uint16_t>>();
    if (j.contains("stages")) {
      s.stages.clear();
      for (const auto& st : j["stages"]) {
        const auto sev = parse_severity(st.at("severity").get<std::string>());
        if (!sev) throw ConfigError("synth spec: bad severity for stage " + st.at("name").get<std::string>());
        s.stages.push_back({st.at("name").get<std::string>(), *sev});
      }
    }
    if (j.contains("playbooks")) {
      s.playbooks.clear();
      for (const auto& p : j["playbooks"])
        s.playbooks.push_back({p.at("name").get<std::string>(), p.at("stages").get<std::vector<std::string>>(),
                               p.value("weight", 1.0)});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("synth spec: ") + e.what());
  }
  return s;
}

namespace {

void check(const SynthSpec& s) {
  if (s.attackers < 1 || s.victims < 1) throw ConfigError("synth spec: attackers and victims must be >= 1");
  if (s.attackers > 250 || s.victims > 250 * 200) throw ConfigError("synth spec: too many hosts");
  if (s.playbooks.empty() || s.ports.empty()) throw ConfigError("synth spec: playbooks and ports must be non-empty");
  if (s.min_burst < 1 || s.max_burst < s.min_burst || s.max_burst > 60)
    throw ConfigError("synth spec: need 1 <= min_burst <= max_burst <= 60");
  if (s.step_gap < Seconds{120}) throw ConfigError("synth spec: step_gap must be >= 120s");
  for (const auto& p : s.playbooks) {
    if (p.stages.empty()) throw ConfigError("synth spec: playbook " + p.name + " has no stages");
    for (const auto& st : p.stages)
      if (std::none_of(s.stages.begin(), s.stages.end(), [&](const SynthStage& x) { return x.name == st; }))
        throw ConfigError("synth spec: playbook " + p.name + " uses unknown stage " + st);
  }
}

std::string victim_ip(int v) { return "10.0." + std::to_string(v / 200) + "." + std::to_string(10 + v % 200); }

}  // namespace

std::vector<Alert> synth_corpus(const SynthSpec& spec, std::uint64_t seed) {
  check(spec);
  std::mt19937_64 rng(seed);
  const auto uniform = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  const auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  std::vector<double> weights;
  for (const auto& p : spec.playbooks) weights.push_back(p.weight);
  std::discrete_distribution<std::size_t> playbook(weights.begin(), weights.end());

  std::vector<std::string> noise;
  for (const auto& st : spec.stages)
    if (st.severity == Severity::low) noise.push_back(st.name);

  std::vector<Alert> out;
  for (int a = 0; a < spec.attackers; ++a) {
    const auto attacker = "10.0.254." + std::to_string(1 + a);
    for (int v = 0; v < spec.victims; ++v) {
      if (uniform(0.0, 1.0) >= spec.participation) continue;
      const auto& pb = spec.playbooks[playbook(rng)];
      std::vector<std::string> steps;
      const int lead = noise.empty() ? 0 : std::uniform_int_distribution<int>(0, std::max(0, spec.lead_in_max))(rng);
      for (int i = 0; i < lead; ++i) steps.push_back(noise[pick(noise.size())]);
      for (const auto& st : pb.stages) {
        if (!noise.empty() && uniform(0.0, 1.0) < spec.interleave) steps.push_back(noise[pick(noise.size())]);
        steps.push_back(st);
        if (uniform(0.0, 1.0) < spec.repeat) steps.push_back(st);
      }
      if (steps.size() > 2 && uniform(0.0, 1.0) < spec.late_start)
        steps.erase(steps.begin(), steps.begin() + static_cast<std::ptrdiff_t>(1 + pick(steps.size() / 2)));
      if (steps.size() > 1 && uniform(0.0, 1.0) < spec.truncation) steps.resize(1 + pick(steps.size() - 1));

      const auto own_port = spec.ports[pick(spec.ports.size())];
      const auto needed = spec.step_gap.count() * static_cast<std::int64_t>(steps.size()) + 60;
      const auto slack = std::max<std::int64_t>(0, spec.duration.count() - needed) / 60;
      auto t = std::chrono::floor<std::chrono::minutes>(spec.start) +
               std::chrono::minutes(std::uniform_int_distribution<std::int64_t>(0, slack)(rng));
      for (const auto& st : steps) {
        const auto& stage = *std::find_if(spec.stages.begin(), spec.stages.end(),
                                          [&](const SynthStage& x) { return x.name == st; });
        const auto port = uniform(0.0, 1.0) < spec.service_drift ? spec.ports[pick(spec.ports.size())] : own_port;
        const int burst = std::uniform_int_distribution<int>(spec.min_burst, spec.max_burst)(rng);
        std::vector<int> offsets;
        for (int b = 0; b < burst; ++b) offsets.push_back(std::uniform_int_distribution<int>(0, 59)(rng));
        std::sort(offsets.begin(), offsets.end());
        for (int off : offsets) {
          Alert al;
          al.timestamp = TimePoint{t.time_since_epoch()} + Seconds{off};
          al.signature = "AGF " + stage.name + " variant " + std::to_string(1 + pick(3));
          al.src_ip = attacker;
          al.dst_ip = victim_ip(v);
          al.src_port = static_cast<std::uint16_t>(std::uniform_int_distribution<int>(1024, 65535)(rng));
          al.dst_port = port;
          al.attack_stage = {stage.name, std::nullopt, stage.name};
          al.severity = stage.severity;
          al.source_kind = SourceKind::ids;
          out.push_back(std::move(al));
        }
        t += std::chrono::duration_cast<std::chrono::minutes>(spec.step_gap);
      }
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const Alert& x, const Alert& y) { return x.timestamp < y.timestamp; });
  return out;
}

StageMap synth_stage_map(const SynthSpec& spec) {
  std::vector<StageRule> rules;
  for (const auto& s : spec.stages) rules.push_back({"AGF " + s.name + " *", s.name, s.severity});
  return StageMap(std::move(rules));
}

void write_ids_csv(std::ostream& out, const std::vector<Alert>& alerts) {
  out << "timestamp,signature,src_ip,src_port,dst_ip,dst_port\n";
  for (const auto& a : alerts) {
    out << format_timestamp(a.timestamp) << "," << a.signature << "," << a.src_ip.value_or("") << ","
        << (a.src_port ? std::to_string(*a.src_port) : "") << "," << a.dst_ip.value_or("") << ","
        << (a.dst_port ? std::to_string(*a.dst_port) : "") << "\n";
  }
}

}  // namespace agf
