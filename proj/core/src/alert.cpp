#include "agf/alert.hpp"

#include <arpa/inet.h>
#include <fnmatch.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include "agf/digest.hpp"
#include "agf/error.hpp"
#include "csv.hpp"
#include "json.hpp"

namespace agf {

using json = nlohmann::json;
using detail::split_csv_line;
using detail::split_list;
using detail::trim;

std::string_view to_string(Severity s) noexcept {
  switch (s) {
    case Severity::low: return "low";
    case Severity::medium: return "medium";
    case Severity::high: return "high";
  }
  return "low";
}

std::string_view to_string(SourceKind k) noexcept { return k == SourceKind::ids ? "ids" : "edr"; }

std::optional<Severity> parse_severity(std::string_view text) noexcept {
  std::string lower;
  for (char c : text)
    if (c != ' ' && c != '\r') lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "low") return Severity::low;
  if (lower == "medium") return Severity::medium;
  if (lower == "high") return Severity::high;
  return std::nullopt;
}

std::optional<SourceKind> parse_source_kind(std::string_view text) noexcept {
  if (text == "ids") return SourceKind::ids;
  if (text == "edr") return SourceKind::edr;
  return std::nullopt;
}

AttackStage render_stage(const std::vector<std::string>& tactics,
                         const std::vector<std::string>& techniques) {
  AttackStage stage;
  const auto joined = [](const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ",") + s;
    return out;
  };
  stage.tactic = joined(tactics);
  if (!techniques.empty()) stage.technique = joined(techniques);

  const std::size_t n = std::max(tactics.size(), techniques.size());
  for (std::size_t i = 0; i < n; ++i) {
    std::string part;
    if (!tactics.empty()) part = tactics[std::min(i, tactics.size() - 1)];
    if (!techniques.empty()) {
      if (!part.empty()) part += '.';
      part += techniques[std::min(i, techniques.size() - 1)];
    }
    if (i) stage.rendered += ", ";
    stage.rendered += part;
  }
  return stage;
}

// --- StageMap -------------------------------------------------------------

StageMap::StageMap(std::vector<StageRule> rules, std::optional<StageRule> fallback)
    : rules_(std::move(rules)), fallback_(std::move(fallback)) {}

StageMap StageMap::parse(std::istream& in) {
  std::vector<StageRule> rules;
  std::optional<StageRule> fallback;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = [&] {
      std::vector<std::string> out;
      std::size_t start = 0;
      while (true) {
        const auto pos = line.find('\t', start);
        out.push_back(trim(line.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
      }
      return out;
    }();
    if (fields.size() != 3 || fields[0].empty() || fields[1].empty())
      throw ConfigError("stage map line " + std::to_string(lineno) +
                        ": expected <pattern>\\t<stage>\\t<severity>");
    const auto sev = parse_severity(fields[2]);
    if (!sev)
      throw ConfigError("stage map line " + std::to_string(lineno) + ": bad severity '" + fields[2] + "'");
    StageRule rule{fields[0], fields[1], *sev};
    if (rule.pattern == "@fallback")
      fallback = std::move(rule);
    else
      rules.push_back(std::move(rule));
  }
  return StageMap(std::move(rules), std::move(fallback));
}

StageMap StageMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open stage map '" + path + "'");
  return parse(in);
}

std::optional<StageRule> StageMap::resolve(std::string_view signature) const {
  const std::string sig(signature);
  for (const auto& rule : rules_)
    if (fnmatch(rule.pattern.c_str(), sig.c_str(), 0) == 0) return rule;
  return fallback_;
}

void ParseReport::print(std::ostream& os) const {
  os << "parsed " << parsed_records << " records, skipped " << skipped_records << ", emitted "
     << emitted_alerts << " alerts";
  if (skipped_host_alerts) os << " (" << skipped_host_alerts << " host alerts lost)";
  os << '\n';
  for (const auto& m : messages) os << "  " << m << '\n';
}

// --- IDS --------------------------------------------------------------------

namespace {

constexpr std::array<std::string_view, 6> kIdsFields{"timestamp", "signature", "src_ip",
                                                     "src_port",  "dst_ip",    "dst_port"};
constexpr std::array<std::string_view, 6> kEdrFields{"timestamp",  "signature", "severity",
                                                     "tactics",    "techniques", "hosts"};

bool valid_ip(const std::string& ip) {
  unsigned char buf[16];
  return inet_pton(AF_INET, ip.c_str(), buf) == 1 || inet_pton(AF_INET6, ip.c_str(), buf) == 1;
}

/// "" -> nullopt; otherwise must be an integer in [0, 65535].
bool parse_port(const std::string& text, std::optional<std::uint16_t>& out) {
  if (text.empty()) {
    out.reset();
    return true;
  }
  unsigned v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || v > 65535) return false;
  out = static_cast<std::uint16_t>(v);
  return true;
}

template <std::size_t N>
std::vector<std::size_t> map_header(const std::vector<std::string>& header,
                                    const std::array<std::string_view, N>& required) {
  std::vector<std::size_t> index;
  for (auto name : required) {
    const auto it = std::find_if(header.begin(), header.end(),
                                 [&](const std::string& h) { return trim(h) == name; });
    if (it == header.end()) throw SchemaError("missing field '" + std::string(name) + "' in header");
    index.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  return index;
}

struct RawIds {
  std::string timestamp, signature, src_ip, src_port, dst_ip, dst_port;
};

std::string json_field(const json& j, const char* name) {
  const auto it = j.find(name);
  if (it == j.end() || it->is_null()) return {};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  return it->dump();
}

void skip(ParseReport& report, std::size_t lineno, const std::string& why) {
  ++report.skipped_records;
  report.messages.push_back("line " + std::to_string(lineno) + ": " + why);
}

}  // namespace

ParseResult parse_ids(std::istream& in, const StageMap& map) {
  ParseResult result;
  auto& report = result.report;
  std::string line;
  std::size_t lineno = 0;
  std::optional<bool> is_json;
  std::vector<std::size_t> columns;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (!is_json) {
      is_json = trim(line).front() == '{';
      if (!*is_json) {
        const auto header = split_csv_line(line);
        if (!header) throw SchemaError("unreadable CSV header");
        columns = map_header(*header, kIdsFields);
        continue;
      }
    }

    RawIds raw;
    if (*is_json) {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception&) {
        skip(report, lineno, "invalid JSON");
        continue;
      }
      if (!j.is_object()) {
        skip(report, lineno, "record is not an object");
        continue;
      }
      raw = {json_field(j, "timestamp"), json_field(j, "signature"), json_field(j, "src_ip"),
             json_field(j, "src_port"),  json_field(j, "dst_ip"),    json_field(j, "dst_port")};
    } else {
      const auto fields = split_csv_line(line);
      if (!fields || fields->size() <= *std::max_element(columns.begin(), columns.end())) {
        skip(report, lineno, "wrong number of fields");
        continue;
      }
      const auto f = [&](std::size_t i) { return trim((*fields)[columns[i]]); };
      raw = {f(0), f(1), f(2), f(3), f(4), f(5)};
    }

    Alert alert;
    alert.source_kind = SourceKind::ids;
    const auto ts = parse_timestamp(raw.timestamp);
    if (!ts) {
      skip(report, lineno, "unparseable timestamp '" + raw.timestamp + "'");
      continue;
    }
    alert.timestamp = *ts;
    if (raw.signature.empty()) {
      skip(report, lineno, "missing signature");
      continue;
    }
    if (raw.src_ip.empty() || raw.dst_ip.empty()) {
      skip(report, lineno, raw.src_ip.empty() ? "missing src_ip" : "missing dst_ip");
      continue;
    }
    if (!valid_ip(raw.src_ip) || !valid_ip(raw.dst_ip)) {
      skip(report, lineno, "invalid IP address");
      continue;
    }
    if (!parse_port(raw.src_port, alert.src_port) || !parse_port(raw.dst_port, alert.dst_port)) {
      skip(report, lineno, "invalid port");
      continue;
    }
    alert.signature = raw.signature;
    alert.src_ip = raw.src_ip;
    alert.dst_ip = raw.dst_ip;

    const auto rule = map.resolve(alert.signature);
    if (!rule) throw UnknownSignatureError(alert.signature);
    alert.attack_stage = AttackStage{rule->stage, std::nullopt, rule->stage};
    alert.severity = rule->severity;

    ++report.parsed_records;
    result.alerts.push_back(std::move(alert));
  }
  report.emitted_alerts = result.alerts.size();
  return result;
}

// --- EDR --------------------------------------------------------------------

std::string HostAnonymizer::operator()(const std::string& host) {
  auto digest = hmac_sha256_hex(key_, host).substr(0, 8);
  const auto it = std::lower_bound(seen_.begin(), seen_.end(), digest,
                                   [](const auto& entry, const std::string& d) { return entry.first < d; });
  if (it != seen_.end() && it->first == digest) {
    if (it->second != host)
      throw Error("host anonymization collision between '" + it->second + "' and '" + host + "'");
  } else {
    seen_.insert(it, {digest, host});
  }
  return digest;
}

ParseResult parse_edr(std::istream& in, const EdrOptions& options) {
  ParseResult result;
  auto& report = result.report;
  HostAnonymizer anonymize(options.anonymization_key);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> columns;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (!have_header) {
      if (!fields) throw SchemaError("unreadable CSV header");
      columns = map_header(*fields, kEdrFields);
      have_header = true;
      continue;
    }
    if (!fields || fields->size() <= *std::max_element(columns.begin(), columns.end())) {
      skip(report, lineno, "wrong number of fields");
      continue;
    }
    const auto f = [&](std::size_t i) { return trim((*fields)[columns[i]]); };
    const auto hosts = split_list(f(5), ';');
    const auto lost = [&](const std::string& why) {
      skip(report, lineno, why);
      report.skipped_host_alerts += hosts.size();
    };
    if (hosts.empty()) {
      skip(report, lineno, "empty host list");
      continue;
    }
    const auto ts = parse_timestamp(f(0));
    if (!ts) {
      lost("unparseable timestamp '" + f(0) + "'");
      continue;
    }
    const auto sev = parse_severity(f(2));
    if (!sev) {
      lost("bad severity '" + f(2) + "'");
      continue;
    }
    const auto tactics = split_list(f(3), ';');
    const auto techniques = split_list(f(4), ';');
    if (tactics.empty() && techniques.empty()) {
      lost("no tactic or technique");
      continue;
    }
    if (f(1).empty()) {
      lost("missing signature");
      continue;
    }
    const auto stage = render_stage(tactics, techniques);
    ++report.parsed_records;
    for (const auto& host : hosts) {
      Alert alert;
      alert.source_kind = SourceKind::edr;
      alert.timestamp = *ts;
      alert.signature = f(1);
      alert.severity = *sev;
      alert.attack_stage = stage;
      alert.host = anonymize(host);
      result.alerts.push_back(std::move(alert));
    }
  }
  if (!have_header && lineno > 0) throw SchemaError("missing header");
  report.emitted_alerts = result.alerts.size();
  return result;
}

// --- JSON lines -------------------------------------------------------------

std::string alert_to_json(const Alert& a) {
  json j;
  j["timestamp"] = format_timestamp(a.timestamp);
  j["signature"] = a.signature;
  j["src_ip"] = a.src_ip ? json(*a.src_ip) : json(nullptr);
  j["dst_ip"] = a.dst_ip ? json(*a.dst_ip) : json(nullptr);
  j["src_port"] = a.src_port ? json(*a.src_port) : json(nullptr);
  j["dst_port"] = a.dst_port ? json(*a.dst_port) : json(nullptr);
  j["host"] = a.host ? json(*a.host) : json(nullptr);
  j["attack_stage"] = {{"tactic", a.attack_stage.tactic},
                       {"technique", a.attack_stage.technique ? json(*a.attack_stage.technique) : json(nullptr)},
                       {"rendered", a.attack_stage.rendered}};
  j["severity"] = to_string(a.severity);
  j["source_kind"] = to_string(a.source_kind);
  return j.dump();
}

Alert alert_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("invalid alert JSON: ") + e.what());
  }
  const auto opt_str = [&](const char* k) -> std::optional<std::string> {
    if (!j.contains(k) || j[k].is_null()) return std::nullopt;
    return j[k].get<std::string>();
  };
  const auto opt_port = [&](const char* k) -> std::optional<std::uint16_t> {
    if (!j.contains(k) || j[k].is_null()) return std::nullopt;
    const auto v = j[k].get<int>();
    if (v < 0 || v > 65535) throw SchemaError(std::string("port out of range in ") + k);
    return static_cast<std::uint16_t>(v);
  };
  try {
    Alert a;
    const auto ts = parse_timestamp(j.at("timestamp").get<std::string>());
    if (!ts) throw SchemaError("bad timestamp in alert JSON");
    a.timestamp = *ts;
    a.signature = j.at("signature").get<std::string>();
    a.src_ip = opt_str("src_ip");
    a.dst_ip = opt_str("dst_ip");
    a.src_port = opt_port("src_port");
    a.dst_port = opt_port("dst_port");
    a.host = opt_str("host");
    const auto& st = j.at("attack_stage");
    a.attack_stage.tactic = st.at("tactic").get<std::string>();
    if (st.contains("technique") && !st["technique"].is_null())
      a.attack_stage.technique = st["technique"].get<std::string>();
    a.attack_stage.rendered = st.at("rendered").get<std::string>();
    const auto sev = parse_severity(j.at("severity").get<std::string>());
    const auto kind = parse_source_kind(j.at("source_kind").get<std::string>());
    if (!sev || !kind) throw SchemaError("bad severity or source_kind in alert JSON");
    a.severity = *sev;
    a.source_kind = *kind;
    return a;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("alert JSON: ") + e.what());
  }
}

void write_alerts(std::ostream& out, const std::vector<Alert>& alerts) {
  for (const auto& a : alerts) out << alert_to_json(a) << '\n';
}

std::vector<Alert> read_alerts(std::istream& in) {
  std::vector<Alert> alerts;
  std::string line;
  while (std::getline(in, line))
    if (!trim(line).empty()) alerts.push_back(alert_from_json(line));
  return alerts;
}

}  // namespace agf
