#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "actbe/cli.hpp"

using namespace actbe;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("actbe_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  void write(const std::string& name, const std::string& text) const { std::ofstream(path(name)) << text; }

  fs::path dir_;
};

}  // namespace

TEST_F(CliTest, ConstructThenReloadKeepsSVector) {
  const auto r = run({"construct", "--example", "I", "--n", "8", "--j", "3", "-o", path("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const RhoN loaded = io::load_state(path("s.json"));
  EXPECT_EQ(s_vector(loaded), s_vector(example_state(ExampleId::I, 8, {.j = 3})));
}

TEST_F(CliTest, AnalyzeExampleOnePair) {
  ASSERT_EQ(run({"construct", "--example", "I", "--n", "8", "--j", "3", "-o", path("s.json")}).code, 0);
  const auto r = run({"analyze", "--state", path("s.json"), "--grouping", "1,2,3|4,5,6,7,8", "--pair", "1", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["schema"], 1);
  EXPECT_EQ(doc["distillable"], true);

  const auto bad = run({"analyze", "--state", path("s.json"), "--grouping", "1,2,3,4|5,6,7,8", "--pair", "1", "2", "--assert"});
  EXPECT_EQ(bad.code, 1);
  EXPECT_EQ(nlohmann::json::parse(bad.out)["distillable"], false);
}

TEST_F(CliTest, AnalyzeAllGroupingsReport) {
  ASSERT_EQ(run({"construct", "--example", "III", "--n", "5", "--members", "1,3,5", "-o", path("s.json")}).code, 0);
  const auto r = run({"analyze", "--state", path("s.json"), "--all-groupings", "--two-groups"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["reports"].size(), 15u);
  int hits = 0;
  for (const auto& rep : doc["reports"]) hits += rep["pairs"][0]["distillable"].get<bool>();
  EXPECT_EQ(hits, 1);
  EXPECT_EQ(run({"analyze", "--state", path("s.json"), "--all-groupings", "--guard", "4"}).code, 2);
}

TEST_F(CliTest, VerifyFourParties) {
  ASSERT_EQ(run({"construct", "--example", "VI", "--n", "4", "-o", path("s.json")}).code, 0);
  const auto r = run({"verify", "--state", path("s.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc["passed"], true);
  EXPECT_EQ(doc["splittings"].size(), 7u);
}

TEST_F(CliTest, ProtocolTrace) {
  ASSERT_EQ(run({"construct", "--example", "VI", "--n", "4", "-o", path("s.json")}).code, 0);
  const auto ok = run({"protocol", "--state", path("s.json"), "--grouping", "1|2|3,4", "--pair", "1", "2", "--json-trace"});
  ASSERT_EQ(ok.code, 0) << ok.err;
  const auto doc = nlohmann::json::parse(ok.out);
  EXPECT_EQ(doc["succeeded"], true);
  EXPECT_GE(doc["steps"].size(), 3u);
  const auto fail = run({"protocol", "--state", path("s.json"), "--grouping", "1,3|2|4", "--pair", "1", "2", "--assert"});
  EXPECT_EQ(fail.code, 1);
  EXPECT_FALSE(nlohmann::json::parse(fail.out)["witness"].is_null());
}

TEST_F(CliTest, SpecFileAndRandom) {
  write("spec.json", R"({"n": 3, "bits": {"3": 1}})");
  ASSERT_EQ(run({"construct", "--spec", path("spec.json"), "-o", path("s.json")}).code, 0);
  EXPECT_EQ(s_string(s_vector(io::load_state(path("s.json")))), "001");
  const auto a = run({"construct", "--random", "--n", "4", "--seed", "7"});
  const auto b = run({"construct", "--random", "--n", "4", "--seed", "7"});
  EXPECT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(run({"construct", "--random", "--n", "4"}).code, 2);
}

TEST_F(CliTest, SearchFourParties) {
  const auto r = run({"search", "--n", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["exhausted"], false);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  const auto r = run({"analyze", "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
}

TEST_F(CliTest, SaveLoadIsBitIdentical) {
  const RhoN s = random_family_state(6, 99);
  io::save_state(s, path("s.json"));
  const RhoN t = io::load_state(path("s.json"));
  EXPECT_EQ(t.lam0_plus(), s.lam0_plus());
  EXPECT_EQ(t.lam0_minus(), s.lam0_minus());
  for (Mask k = 1; k <= splitting_count(6); ++k) EXPECT_EQ(t.lam(k), s.lam(k));
}

TEST_F(CliTest, RejectsBadStateFiles) {
  write("neg.json", R"({"schema": 1, "n": 2, "lam0_plus": 0.2, "lam0_minus": 0.4, "lam": [0.2]})");
  const auto r = run({"verify", "--state", path("neg.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Δ < 0"), std::string::npos);

  write("len.json", R"({"schema": 1, "n": 3, "lam0_plus": 1.0, "lam0_minus": 0.0, "lam": [0.0, 0.0]})");
  const auto l = run({"verify", "--state", path("len.json")});
  EXPECT_EQ(l.code, 2);
  EXPECT_NE(l.err.find("'lam'"), std::string::npos);

  write("bad.json", "{ not json");
  EXPECT_EQ(run({"verify", "--state", path("bad.json")}).code, 2);
  EXPECT_THROW(io::load_state(path("missing.json")), argument_error);
}
