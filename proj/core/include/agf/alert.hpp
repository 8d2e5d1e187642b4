#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agf/severity.hpp"
#include "agf/timeutil.hpp"

namespace agf {

/// Attack stage of an alert. IDS alerts get it from the stage map; EDR alerts
/// render it from the MITRE tactic/technique attributes of the record.
struct AttackStage {
  std::string tactic;
  std::optional<std::string> technique;
  std::string rendered;

  bool operator==(const AttackStage&) const = default;
};

/// Renders `Tactic.Technique` pairs joined with ", ". The i-th tactic is paired
/// with the i-th technique; the shorter list repeats its last element.
AttackStage render_stage(const std::vector<std::string>& tactics,
                         const std::vector<std::string>& techniques);

struct Alert {
  TimePoint timestamp{};
  std::string signature;
  std::optional<std::string> src_ip;
  std::optional<std::string> dst_ip;
  std::optional<std::uint16_t> src_port;
  std::optional<std::uint16_t> dst_port;
  std::optional<std::string> host;
  AttackStage attack_stage;
  Severity severity = Severity::low;
  SourceKind source_kind = SourceKind::ids;

  bool operator==(const Alert&) const = default;
};

struct StageRule {
  std::string pattern;  // fnmatch-style glob
  std::string stage;
  Severity severity = Severity::low;
};

/// Signature -> (stage, severity) rules. The first matching rule wins.
///
/// Text format, one rule per line, tab separated:
///
///     <glob-pattern> \t <stage-label> \t <low|medium|high>
///
/// Blank lines and lines starting with `#` are ignored. A fallback for
/// signatures that match nothing is opt-in through a line whose pattern
/// field is the literal `@fallback`.
class StageMap {
 public:
  StageMap() = default;
  explicit StageMap(std::vector<StageRule> rules, std::optional<StageRule> fallback = std::nullopt);

  static StageMap parse(std::istream& in);
  static StageMap load(const std::string& path);

  /// nullopt when no rule matches and no fallback is configured.
  std::optional<StageRule> resolve(std::string_view signature) const;

  const std::vector<StageRule>& rules() const noexcept { return rules_; }
  const std::optional<StageRule>& fallback() const noexcept { return fallback_; }

 private:
  std::vector<StageRule> rules_;
  std::optional<StageRule> fallback_;
};

struct ParseReport {
  std::size_t parsed_records = 0;
  std::size_t skipped_records = 0;
  /// EDR only: host entries lost with skipped records that did list hosts.
  std::size_t skipped_host_alerts = 0;
  std::size_t emitted_alerts = 0;
  std::vector<std::string> messages;  // one per skipped record, "line N: reason"

  void print(std::ostream& os) const;
};

struct ParseResult {
  std::vector<Alert> alerts;
  ParseReport report;
};

/// Line-delimited IDS records: CSV with header
/// `timestamp,signature,src_ip,src_port,dst_ip,dst_port` or JSON lines with the
/// same field names. Format is detected from the first non-blank line.
/// Throws SchemaError on a bad CSV header and UnknownSignatureError for an
/// unmapped signature without fallback.
ParseResult parse_ids(std::istream& in, const StageMap& map);

struct EdrOptions {
  /// Key for host-name anonymization.
  std::string anonymization_key = "agf";
};

/// EDR CSV with header `timestamp,signature,severity,tactics,techniques,hosts`;
/// list fields are `;` separated. One Alert per (record, host).
ParseResult parse_edr(std::istream& in, const EdrOptions& options = {});

/// Keyed hash of a host name: HMAC-SHA256 truncated to 8 hex characters.
/// Throws Error if two distinct names collide within one anonymizer.
class HostAnonymizer {
 public:
  explicit HostAnonymizer(std::string key) : key_(std::move(key)) {}
  std::string operator()(const std::string& host);

 private:
  std::string key_;
  std::vector<std::pair<std::string, std::string>> seen_;  // (digest, host), sorted by digest
};

/// Normalized alerts as JSON lines, the `ingest` output format.
std::string alert_to_json(const Alert& alert);
Alert alert_from_json(std::string_view line);
void write_alerts(std::ostream& out, const std::vector<Alert>& alerts);
std::vector<Alert> read_alerts(std::istream& in);

}  // namespace agf
