#include "agf/episodes.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <ostream>

#include "json.hpp"

namespace agf {

std::string service_name(std::uint16_t port) {
  static const std::map<std::uint16_t, const char*> kServices{
      {20, "ftp-data"}, {21, "ftp"},      {22, "ssh"},     {23, "telnet"},  {25, "smtp"},
      {53, "dns"},      {67, "dhcp"},     {69, "tftp"},    {80, "http"},    {88, "kerberos"},
      {110, "pop3"},    {123, "ntp"},     {135, "msrpc"},  {137, "netbios"}, {139, "netbios"},
      {143, "imap"},    {161, "snmp"},    {389, "ldap"},   {443, "https"},  {445, "smb"},
      {465, "smtps"},   {514, "syslog"},  {587, "smtp"},   {636, "ldaps"},  {993, "imaps"},
      {995, "pop3s"},   {1433, "mssql"},  {1521, "oracle"}, {2049, "nfs"},  {3306, "mysql"},
      {3389, "rdp"},    {5432, "postgresql"}, {5900, "vnc"}, {6379, "redis"}, {8080, "http-alt"},
      {8443, "https-alt"}, {9200, "elasticsearch"}, {27017, "mongodb"}};
  const auto it = kServices.find(port);
  return it == kServices.end() ? std::to_string(port) : std::string(it->second);
}

namespace {

std::optional<std::string> modal_service(std::span<const Alert> alerts, std::span<const std::size_t> ids) {
  std::map<std::uint16_t, std::size_t> counts;
  for (auto i : ids)
    if (alerts[i].dst_port) ++counts[*alerts[i].dst_port];
  if (counts.empty()) return std::nullopt;
  // std::map iterates ports ascending, so strict > keeps the smallest port on ties.
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it)
    if (it->second > best->second) best = it;
  return service_name(best->first);
}

Episode make_episode(std::span<const Alert> alerts, std::vector<std::size_t> ids, bool with_service) {
  Episode e;
  e.start = alerts[ids.front()].timestamp;
  e.end = alerts[ids.back()].timestamp;
  e.attack_stage = alerts[ids.front()].attack_stage;
  e.severity = Severity::low;
  for (auto i : ids) e.severity = std::max(e.severity, alerts[i].severity);
  if (with_service) e.targeted_service = modal_service(alerts, ids);
  e.alert_ids = std::move(ids);
  return e;
}

std::int64_t bucket_of(TimePoint t, Seconds width) {
  const auto s = t.time_since_epoch().count();
  const auto w = width.count();
  return s >= 0 ? s / w : -((-s + w - 1) / w);
}

/// Sorts indices by (timestamp, index).
void time_sort(std::span<const Alert> alerts, std::vector<std::size_t>& ids) {
  std::stable_sort(ids.begin(), ids.end(),
                   [&](std::size_t a, std::size_t b) { return alerts[a].timestamp < alerts[b].timestamp; });
}

}  // namespace

std::vector<Episode> detect_episodes(std::span<const Alert> alerts, std::span<const std::size_t> ids,
                                     const EpisodeConfig& config) {
  std::vector<Episode> episodes;
  if (ids.empty()) return episodes;
  const auto width = config.bucket.count() > 0 ? config.bucket : Seconds{60};

  // Consecutive runs of alerts sharing a bucket.
  struct Bucket {
    std::int64_t index;
    std::size_t begin, end;  // range in ids
  };
  std::vector<Bucket> buckets;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto b = bucket_of(alerts[ids[i]].timestamp, width);
    if (buckets.empty() || buckets.back().index != b)
      buckets.push_back({b, i, i + 1});
    else
      buckets.back().end = i + 1;
  }

  std::size_t open = 0;
  while (open < buckets.size()) {
    const auto start_count = buckets[open].end - buckets[open].begin;
    std::size_t close = open;
    while (close + 1 < buckets.size() && buckets[close + 1].index == buckets[close].index + 1 &&
           buckets[close + 1].end - buckets[close + 1].begin >= start_count)
      ++close;
    std::vector<std::size_t> members(ids.begin() + static_cast<std::ptrdiff_t>(buckets[open].begin),
                                     ids.begin() + static_cast<std::ptrdiff_t>(buckets[close].end));
    episodes.push_back(make_episode(alerts, std::move(members), true));
    open = close + 1;
  }
  return episodes;
}

std::vector<EpisodeSequence> build_sequences(std::span<const Alert> alerts, SourceKind mode,
                                             const EpisodeConfig& config) {
  std::map<SequenceKey, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < alerts.size(); ++i) {
    const auto& a = alerts[i];
    if (mode == SourceKind::ids) {
      if (!a.src_ip || !a.dst_ip) continue;
      groups[{*a.src_ip, *a.dst_ip}].push_back(i);
    } else {
      if (!a.host) continue;
      groups[{*a.host, *a.host}].push_back(i);
    }
  }

  std::vector<EpisodeSequence> sequences;
  sequences.reserve(groups.size());
  for (auto& [key, ids] : groups) {
    time_sort(alerts, ids);
    EpisodeSequence seq{key, {}};
    if (mode == SourceKind::edr) {
      for (auto i : ids) seq.episodes.push_back(make_episode(alerts, {i}, false));
    } else {
      std::map<std::string, std::vector<std::size_t>> by_stage;
      for (auto i : ids) by_stage[alerts[i].attack_stage.rendered].push_back(i);
      for (const auto& [stage, members] : by_stage) {
        auto eps = detect_episodes(alerts, members, config);
        seq.episodes.insert(seq.episodes.end(), std::make_move_iterator(eps.begin()),
                            std::make_move_iterator(eps.end()));
      }
      std::stable_sort(seq.episodes.begin(), seq.episodes.end(), [](const Episode& a, const Episode& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.alert_ids.front() < b.alert_ids.front();
      });
    }
    sequences.push_back(std::move(seq));
  }
  return sequences;
}

void write_episodes(std::ostream& out, std::span<const EpisodeSequence> sequences) {
  using nlohmann::json;
  for (const auto& seq : sequences) {
    for (const auto& e : seq.episodes) {
      json j{{"attacker", seq.key.attacker},
             {"victim", seq.key.victim},
             {"start", format_timestamp(e.start)},
             {"end", format_timestamp(e.end)},
             {"attack_stage", e.attack_stage.rendered},
             {"targeted_service", e.targeted_service ? json(*e.targeted_service) : json(nullptr)},
             {"severity", to_string(e.severity)},
             {"alert_ids", e.alert_ids}};
      out << j.dump() << '\n';
    }
  }
}

}  // namespace agf
