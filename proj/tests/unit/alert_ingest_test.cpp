#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "agf/alert.hpp"
#include "agf/digest.hpp"
#include "agf/error.hpp"
#include "fixtures.hpp"

namespace agf {
namespace {

StageMap fixture_map() { return StageMap::load(testing::fixture_path("stage_map.tsv")); }

TEST(StageMap, FirstMatchingRuleWins) {
  std::istringstream in("ET *\tfirst\tlow\nET SCAN*\tsecond\thigh\n");
  const auto m = StageMap::parse(in);
  const auto r = m.resolve("ET SCAN Nmap");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->stage, "first");
  EXPECT_FALSE(m.resolve("GPL ICMP"));
}

TEST(StageMap, CommentsBlankLinesAndFallback) {
  std::istringstream in("# header\n\nET SCAN*\tserD\tlow\n@fallback\tother\tmedium\n");
  const auto m = StageMap::parse(in);
  EXPECT_EQ(m.rules().size(), 1u);
  const auto r = m.resolve("anything else");
  ASSERT_TRUE(r);
  EXPECT_EQ(r->stage, "other");
  EXPECT_EQ(r->severity, Severity::medium);
}

TEST(StageMap, BadSeverityIsConfigError) {
  std::istringstream in("ET SCAN*\tserD\tcritical\n");
  EXPECT_THROW(StageMap::parse(in), ConfigError);
}

TEST(StageMap, MissingFileIsConfigError) { EXPECT_THROW(StageMap::load("/nonexistent/stage.map"), ConfigError); }

TEST(ParseIds, ScanRecordMapsToStageAndService) {
  std::istringstream in(
      "timestamp,signature,src_ip,src_port,dst_ip,dst_port\n"
      "2018-11-03T10:00:00Z,ET SCAN Nmap,10.0.0.1,40000,10.0.0.24,80\n");
  const auto r = parse_ids(in, fixture_map());
  ASSERT_EQ(r.alerts.size(), 1u);
  const auto& a = r.alerts[0];
  EXPECT_EQ(a.attack_stage.rendered, "serD");
  EXPECT_EQ(a.severity, Severity::low);
  EXPECT_EQ(a.dst_port, std::optional<std::uint16_t>(80));
  EXPECT_EQ(a.src_ip, std::optional<std::string>("10.0.0.1"));
  EXPECT_EQ(a.source_kind, SourceKind::ids);
  EXPECT_EQ(format_timestamp(a.timestamp), "2018-11-03T10:00:00Z");
}

TEST(ParseIds, EmptyStreamGivesNoAlerts) {
  std::istringstream in("");
  const auto r = parse_ids(in, fixture_map());
  EXPECT_TRUE(r.alerts.empty());
  EXPECT_EQ(r.report.skipped_records, 0u);
}

TEST(ParseIds, MalformedRecordsAreSkippedAndCounted) {
  std::istringstream in(testing::read_file(testing::fixture_path("ids_small.csv")));
  const auto r = parse_ids(in, fixture_map());
  EXPECT_EQ(r.alerts.size(), 6u);
  EXPECT_EQ(r.report.parsed_records, 6u);
  EXPECT_EQ(r.report.skipped_records, 2u);
  ASSERT_EQ(r.report.messages.size(), 2u);
  EXPECT_NE(r.report.messages[0].find("line 8"), std::string::npos);
  EXPECT_FALSE(r.alerts[5].src_port);
  for (const auto& a : r.alerts) {
    EXPECT_TRUE(a.src_ip && a.dst_ip);
  }
}

TEST(ParseIds, MissingDestinationSkipsOneRecord) {
  std::istringstream in(
      "timestamp,signature,src_ip,src_port,dst_ip,dst_port\n"
      "2018-11-03T10:00:00Z,ET SCAN Nmap,10.0.0.1,1,,80\n");
  const auto r = parse_ids(in, fixture_map());
  EXPECT_TRUE(r.alerts.empty());
  EXPECT_EQ(r.report.skipped_records, 1u);
}

TEST(ParseIds, UnknownSignatureNamesTheSignature) {
  std::istringstream in(
      "timestamp,signature,src_ip,src_port,dst_ip,dst_port\n"
      "2018-11-03T10:00:00Z,GPL ICMP ping,10.0.0.1,1,10.0.0.2,80\n");
  try {
    parse_ids(in, fixture_map());
    FAIL() << "expected UnknownSignatureError";
  } catch (const UnknownSignatureError& e) {
    EXPECT_EQ(e.signature(), "GPL ICMP ping");
  }
}

TEST(ParseIds, BadHeaderIsSchemaError) {
  std::istringstream in("time,sig\n2018-11-03T10:00:00Z,x\n");
  EXPECT_THROW(parse_ids(in, fixture_map()), SchemaError);
}

TEST(ParseIds, JsonLinesMatchCsv) {
  std::istringstream csv(
      "timestamp,signature,src_ip,src_port,dst_ip,dst_port\n"
      "2018-11-03T10:00:00Z,ET EXPLOIT x,10.0.0.1,40000,10.0.0.24,445\n");
  std::istringstream jsonl(
      R"({"timestamp":"2018-11-03T10:00:00Z","signature":"ET EXPLOIT x","src_ip":"10.0.0.1","src_port":40000,"dst_ip":"10.0.0.24","dst_port":445})"
      "\n");
  const auto a = parse_ids(csv, fixture_map());
  const auto b = parse_ids(jsonl, fixture_map());
  EXPECT_EQ(a.alerts, b.alerts);
  ASSERT_EQ(a.alerts.size(), 1u);
  EXPECT_EQ(a.alerts[0].severity, Severity::high);
}

TEST(ParseIds, Deterministic) {
  const auto text = testing::read_file(testing::fixture_path("ids_small.csv"));
  std::istringstream a(text), b(text);
  EXPECT_EQ(parse_ids(a, fixture_map()).alerts, parse_ids(b, fixture_map()).alerts);
}

TEST(RenderStage, PairsTacticsWithTechniques) {
  EXPECT_EQ(render_stage({"CredentialAccess"}, {"OSCredDump"}).rendered, "CredentialAccess.OSCredDump");
  EXPECT_EQ(render_stage({"T1", "T2"}, {"Q1"}).rendered, "T1.Q1, T2.Q1");
  EXPECT_EQ(render_stage({"T1"}, {"Q1", "Q2"}).rendered, "T1.Q1, T1.Q2");
  EXPECT_EQ(render_stage({"Discovery"}, {}).rendered, "Discovery");
}

TEST(ParseEdr, MultiHostRecordIsSplit) {
  std::istringstream in(
      "timestamp,signature,severity,tactics,techniques,hosts\n"
      "2023-05-04T09:00:00Z,Dump,high,CredentialAccess,OSCredDump,H1;H2\n");
  const auto r = parse_edr(in);
  ASSERT_EQ(r.alerts.size(), 2u);
  HostAnonymizer anon("agf");
  EXPECT_EQ(r.alerts[0].host, anon("H1"));
  EXPECT_EQ(r.alerts[1].host, anon("H2"));
  for (const auto& a : r.alerts) {
    EXPECT_EQ(a.attack_stage.rendered, "CredentialAccess.OSCredDump");
    EXPECT_EQ(a.severity, Severity::high);
    EXPECT_EQ(a.source_kind, SourceKind::edr);
  }
}

TEST(ParseEdr, SingleHostGivesOneAlert) {
  std::istringstream in(
      "timestamp,signature,severity,tactics,techniques,hosts\n"
      "2023-05-04T09:00:00Z,Scan,low,Discovery,T1046,H1\n");
  EXPECT_EQ(parse_edr(in).alerts.size(), 1u);
}

TEST(ParseEdr, EmptyHostListIsSkipped) {
  std::istringstream in(
      "timestamp,signature,severity,tactics,techniques,hosts\n"
      "2023-05-04T09:00:00Z,Scan,low,Discovery,T1046,\n");
  const auto r = parse_edr(in);
  EXPECT_TRUE(r.alerts.empty());
  EXPECT_EQ(r.report.skipped_records, 1u);
}

TEST(ParseEdr, SplitIsCountPreserving) {
  std::istringstream in(testing::read_file(testing::fixture_path("edr_20.csv")));
  const auto r = parse_edr(in);
  std::size_t hosts = 0;
  std::istringstream again(testing::read_file(testing::fixture_path("edr_20.csv")));
  std::string line;
  std::getline(again, line);
  while (std::getline(again, line)) {
    const auto field = line.substr(line.rfind(',') + 1);
    if (!field.empty()) hosts += 1 + std::count(field.begin(), field.end(), ';');
  }
  EXPECT_EQ(hosts, r.alerts.size() + r.report.skipped_host_alerts);
}

TEST(ParseEdr, IdsShapedInputIsSchemaError) {
  std::istringstream in(testing::read_file(testing::fixture_path("ids_small.csv")));
  EXPECT_THROW(parse_edr(in), SchemaError);
}

TEST(HostAnonymizer, StableAndKeyed) {
  HostAnonymizer a("k1"), b("k1"), c("k2");
  EXPECT_EQ(a("WS01"), b("WS01"));
  EXPECT_NE(a("WS01"), c("WS01"));
  EXPECT_EQ(a("WS01").size(), 8u);
  EXPECT_EQ(a("WS01"), hmac_sha256_hex("k1", "WS01").substr(0, 8));
  std::set<std::string> seen;
  for (int i = 0; i < 500; ++i) seen.insert(a("host-" + std::to_string(i)));
  EXPECT_EQ(seen.size(), 500u);
}

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  // RFC 4231 test case 2.
  EXPECT_EQ(hmac_sha256_hex("Jefe", "what do ya want for nothing?"),
            "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(AlertJson, RoundTrip) {
  std::istringstream in(testing::read_file(testing::fixture_path("edr_20.csv")));
  const auto alerts = parse_edr(in).alerts;
  std::ostringstream out;
  write_alerts(out, alerts);
  std::istringstream back(out.str());
  EXPECT_EQ(read_alerts(back), alerts);
}

TEST(Timestamps, OffsetsAndFractions) {
  const auto z = parse_timestamp("2018-11-03T10:00:00Z");
  ASSERT_TRUE(z);
  EXPECT_EQ(parse_timestamp("2018-11-03 12:00:00+02:00"), z);
  EXPECT_EQ(parse_timestamp("2018-11-03T09:30:00.975-00:30"), z);
  EXPECT_FALSE(parse_timestamp("not-a-time"));
  EXPECT_FALSE(parse_timestamp("2018-13-03T10:00:00Z"));
  EXPECT_EQ(parse_duration("1h"), std::optional<Seconds>(Seconds{3600}));
  EXPECT_EQ(parse_duration("90"), std::optional<Seconds>(Seconds{90}));
  EXPECT_FALSE(parse_duration("1w"));
}

}  // namespace
}  // namespace agf
