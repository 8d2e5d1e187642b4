#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "fixtures.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using agf::testing::fixture_path;
using agf::testing::read_file;

namespace {

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("agf-cli-" + std::to_string(::getpid()) + "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result agf(const std::string& args, const std::string& env = "") const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const auto cmd = env + " '" + std::string(AGF_CLI_PATH) + "' " + args + " >'" + out.string() + "' 2>'" +
                     err.string() + "'";
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out.string());
    r.err = read_file(err.string());
    return r;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // Small synthetic corpus plus its stage map.
  void synth(std::uint64_t seed = 0) const {
    std::ofstream(path("spec.json")) << R"({"attackers": 2, "victims": 6})";
    const auto r = agf("--seed " + std::to_string(seed) + " synth --spec " + path("spec.json") + " -o " +
                       path("alerts.csv") + " --map-out " + path("stages.map"));
    ASSERT_EQ(r.code, 0) << r.err;
  }

  fs::path dir_;
};

TEST_F(Cli, IngestIdsWritesAlertsAndReport) {
  const auto r = agf("ingest --kind ids --map " + fixture_path("stage_map.tsv") + " " + fixture_path("ids_small.csv") +
                     " -o " + path("alerts.jsonl") + " --report " + path("report.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("skipped 2"), std::string::npos) << r.err;
  std::ifstream in(path("alerts.jsonl"));
  std::size_t lines = 0;
  for (std::string l; std::getline(in, l);) ++lines;
  EXPECT_EQ(lines, 6u);
  EXPECT_TRUE(fs::exists(path("report.json")));
  const auto m = nlohmann::json::parse(read_file(path("alerts.jsonl.manifest.json")));
  EXPECT_EQ(m["command"], "ingest");
  EXPECT_EQ(m["seed"], 0);
  EXPECT_FALSE(m["inputs"].empty());
}

TEST_F(Cli, MissingMapFileIsUsageError) {
  const auto r = agf("ingest --kind ids --map " + path("nope.map") + " " + fixture_path("ids_small.csv") + " -o " +
                     path("a.jsonl"));
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("nope.map"), std::string::npos);
}

TEST_F(Cli, EdrKindOnIdsFileNamesBadField) {
  const auto r = agf("ingest --kind edr " + fixture_path("ids_small.csv") + " -o " + path("a.jsonl"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("severity"), std::string::npos) << r.err;
}

TEST_F(Cli, RunIsDeterministic) {
  synth();
  const auto base = "run --kind ids --map " + path("stages.map") + " " + path("alerts.csv");
  ASSERT_EQ(agf(base + " -o " + path("r1")).code, 0);
  ASSERT_EQ(agf(base + " -o " + path("r2") + " --jobs 2").code, 0);
  std::size_t dots = 0;
  for (const auto& e : fs::directory_iterator(path("r1"))) {
    const auto name = e.path().filename().string();
    dots += e.path().extension() == ".dot";
    if (name == "manifest.json") continue;
    EXPECT_EQ(read_file(e.path().string()), read_file((fs::path(path("r2")) / name).string())) << name;
  }
  EXPECT_GT(dots, 0u);
  const auto m = nlohmann::json::parse(read_file(path("r1") + "/manifest.json"));
  EXPECT_EQ(m["config"]["strategy"], "HC");
  EXPECT_EQ(m["config"]["factor"], 55.0);
  EXPECT_EQ(m["config"]["window"], 5);
  const auto m2 = nlohmann::json::parse(read_file(path("r2") + "/manifest.json"));
  ASSERT_EQ(m["outputs"].size(), m2["outputs"].size());
  for (std::size_t i = 0; i < m["outputs"].size(); ++i) EXPECT_EQ(m["outputs"][i]["sha256"], m2["outputs"][i]["sha256"]);
}

TEST_F(Cli, SeedFromEnvironment) {
  EXPECT_EQ(agf("synth -o " + path("a.csv")).code, 0);
  EXPECT_EQ(agf("synth -o " + path("b.csv"), "AGF_SEED=0").code, 0);
  EXPECT_EQ(agf("synth -o " + path("c.csv"), "AGF_SEED=5").code, 0);
  EXPECT_EQ(read_file(path("a.csv")), read_file(path("b.csv")));
  EXPECT_NE(read_file(path("a.csv")), read_file(path("c.csv")));
  EXPECT_EQ(agf("synth -o " + path("d.csv"), "AGF_SEED=nope").code, 2);
}

TEST_F(Cli, ReplaySnapshots) {
  synth();
  const auto r = agf("replay --kind ids --map " + path("stages.map") + " " + path("alerts.csv") +
                     " --interval 1h -o " + path("rep"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto windows = nlohmann::json::parse(read_file(path("rep") + "/replay.json")).size();
  EXPECT_GT(windows, 1u);
  EXPECT_TRUE(fs::is_directory(path("rep") + "/t" + std::to_string(windows)));
  EXPECT_FALSE(fs::exists(path("rep") + "/t" + std::to_string(windows + 1)));
  const auto one = agf("replay --kind ids --map " + path("stages.map") + " " + path("alerts.csv") +
                       " --interval 2d --history sliding:24h -o " + path("one"));
  ASSERT_EQ(one.code, 0) << one.err;
  EXPECT_TRUE(fs::is_directory(path("one") + "/t1"));
  EXPECT_FALSE(fs::exists(path("one") + "/t2"));
  EXPECT_EQ(agf("replay --kind ids --map " + path("stages.map") + " " + path("alerts.csv") +
                " --history sometimes -o " + path("bad")).code,
            2);
}

TEST_F(Cli, EvalWritesReportAndSweep) {
  synth();
  const auto in = "--kind ids --map " + path("stages.map") + " " + path("alerts.csv");
  const auto r = agf("eval " + in + " --k 5 --methods all -o " + path("ev"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(path("ev") + "/eval.csv"));
  EXPECT_TRUE(fs::exists(path("ev") + "/eval.json"));
  const auto s = agf("eval " + in + " --sweep f --values 1,55 --methods as,hc -o " + path("sw"));
  ASSERT_EQ(s.code, 0) << s.err;
  const auto csv = read_file(path("sw") + "/sweep_f.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}

TEST_F(Cli, InvalidMethodListsValidNames) {
  synth();
  const auto r = agf("eval --kind ids --map " + path("stages.map") + " " + path("alerts.csv") +
                     " --methods hc,oracle -o " + path("ev"));
  EXPECT_EQ(r.code, 2);
  for (const auto* name : {"random", "frequency", "pdfa", "fs", "as", "hc"})
    EXPECT_NE(r.err.find(name), std::string::npos) << r.err;
}

TEST_F(Cli, ModelExportImportRoundTrip) {
  synth();
  ASSERT_EQ(agf("export-model --kind ids --map " + path("stages.map") + " " + path("alerts.csv") + " -o " +
                path("model.json") + " --dot " + path("model.dot"))
                .code,
            0);
  const auto r = agf("import-model " + path("model.json") + " -o " + path("again.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file(path("model.json")), read_file(path("again.json")));
  EXPECT_NE(r.out.find("suffix model"), std::string::npos);

  std::ofstream(path("bad.json"))
      << R"({"direction":"suffix","root":0,"states":[{"id":0,"total":2,"continue":2,"final":0,"sink":false},
            {"id":1,"total":2,"continue":0,"final":2,"sink":false}],
            "transitions":[{"from":0,"to":1,"symbol":"a|x","count":1},{"from":0,"to":1,"symbol":"b|x","count":1}]})";
  const auto bad = agf("import-model " + path("bad.json"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("incoming"), std::string::npos) << bad.err;
}

TEST_F(Cli, ConfigFileWithFlagPrecedence) {
  synth();
  std::ofstream(path("agf.ini")) << "[run]\nstrategy=as\nwindow=3\n";
  const auto base = "--config " + path("agf.ini") + " run --kind ids --map " + path("stages.map") + " " +
                    path("alerts.csv") + " -o ";
  ASSERT_EQ(agf(base + path("c1")).code, 0);
  ASSERT_EQ(agf(base + path("c2") + " --window 4").code, 0);
  const auto a = nlohmann::json::parse(read_file(path("c1") + "/manifest.json"));
  const auto b = nlohmann::json::parse(read_file(path("c2") + "/manifest.json"));
  EXPECT_EQ(a["config"]["strategy"], "AS");
  EXPECT_EQ(a["config"]["window"], 3);
  EXPECT_EQ(b["config"]["window"], 4);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(agf("").code, 2);
  EXPECT_EQ(agf("frobnicate").code, 2);
  EXPECT_EQ(agf("run --kind ids x.csv").code, 2);
  EXPECT_EQ(agf("--version").code, 0);
}

}  // namespace
