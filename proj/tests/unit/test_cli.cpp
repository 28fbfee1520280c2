#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace incompat::cli;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    fs::create_directories(dir());
    for (const char* name : {"position", "momentum", "trivial", "identity", "depolarizing", "weyl-pair", "weyl-noise",
                             "identity-pair", "identity-noise", "vn-pair", "vn-noise"}) {
      const Result r = run_cli({"emit", name, "--d", "2", "--out", path(std::string(name) + ".json")});
      ASSERT_EQ(r.code, 0) << name << ": " << r.err;
    }
    fs::create_directories(dir() / "noise");
    fs::copy_file(dir() / "weyl-noise.json", dir() / "noise" / "a-weyl-noise.json", fs::copy_options::overwrite_existing);
    fs::copy_file(dir() / "weyl-pair.json", dir() / "noise" / "b-weyl-pair.json", fs::copy_options::overwrite_existing);
  }

  static fs::path dir() { return fs::path(INCOMPAT_TEST_SCRATCH); }
  static std::string path(const std::string& name) { return (dir() / name).string(); }
};

TEST_F(Cli, CheckExitCodesFollowTheVerdict) {
  const Result qp = run_cli({"check", "jm", path("position.json"), path("momentum.json")});
  EXPECT_EQ(qp.code, kExitInfeasible) << qp.err;
  const json j = json::parse(qp.out);
  EXPECT_EQ(j.at("kind"), "jm");
  EXPECT_EQ(j.at("verdict"), "Infeasible");
  EXPECT_FALSE(j.contains("witness"));

  EXPECT_EQ(run_cli({"check", "chan", path("identity.json"), path("identity.json")}).code, kExitInfeasible);

  const Result ok = run_cli({"check", "obschan", path("trivial.json"), path("identity.json")});
  EXPECT_EQ(ok.code, kExitFeasible) << ok.err;
  EXPECT_TRUE(json::parse(ok.out).contains("witness"));
}

TEST_F(Cli, CheckUndecidedWithTinyBudget) {
  const Result r = run_cli({"check", "jm", path("position.json"), path("momentum.json"), "--max-iters", "1"});
  EXPECT_EQ(r.code, kExitUndecided);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(run_cli({"check", "jm", path("missing.json"), path("momentum.json")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check", "jm", path("identity.json"), path("momentum.json")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check", "bogus", path("position.json"), path("momentum.json")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"nonsense"}).code, kExitUsage);
  EXPECT_EQ(run_cli({}).code, kExitUsage);
  EXPECT_EQ(run_cli({"verify-theorems", "--dims", "1"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"verify-theorems", "--dims", "2,x"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"verify-theorems", "--dims", "2", "--theorem", "nope"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"emit", "nothing"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"emit", "identity", "--d", "1"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"check", "jm", path("position.json"), path("momentum.json"), "--tol", "-1"}).code, kExitUsage);
  EXPECT_EQ(run_cli({"robustness", path("weyl-pair.json")}).code, kExitUsage);
  EXPECT_EQ(run_cli({"robustness", path("weyl-pair.json"), path("identity-noise.json")}).code, kExitUsage);

  std::ofstream(path("broken.json")) << "{ nope";
  const Result broken = run_cli({"check", "jm", path("broken.json"), path("momentum.json")});
  EXPECT_EQ(broken.code, kExitUsage);
  EXPECT_FALSE(broken.err.empty());
}

TEST_F(Cli, HelpExitsCleanly) { EXPECT_EQ(run_cli({"--help"}).code, 0); }

TEST_F(Cli, EmitWritesValidDevices) {
  const Result r = run_cli({"emit", "cloner", "--d", "2"});
  ASSERT_EQ(r.code, 0);
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("din"), 2);
  EXPECT_EQ(j.at("dout"), 4);
  const json pair = json::parse(std::ifstream(path("vn-noise.json")));
  EXPECT_EQ(pair.at("kind"), "obschan");
}

TEST_F(Cli, RobustnessOfTheWeylPair) {
  const Result r = run_cli({"robustness", path("weyl-pair.json"), path("weyl-noise.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j.at("value").get<double>(), 0.853553, 1e-3);
  EXPECT_EQ(j.at("mode"), "relative");
  EXPECT_EQ(j.at("lower_bound_only"), false);
  EXPECT_LE(j.at("hi").get<double>() - j.at("lo").get<double>(), 1e-3);
}

TEST_F(Cli, RobustnessOfTheIdentityPair) {
  const Result r = run_cli({"robustness", path("identity-pair.json"), path("identity-noise.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(json::parse(r.out).at("value").get<double>(), 0.75, 1e-3);
}

TEST_F(Cli, RobustnessPicksTheBestCandidateFromADirectory) {
  const Result r = run_cli({"robustness", path("weyl-pair.json"), "--noise-dir", path("noise")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("candidates").size(), 2u);
  EXPECT_EQ(j.at("witness"), "a-weyl-noise.json");
  EXPECT_EQ(j.at("mode"), "k_absolute_sampled");
  EXPECT_EQ(j.at("lower_bound_only"), true);
  EXPECT_NEAR(j.at("value").get<double>(), 0.853553, 1e-3);
}

TEST_F(Cli, CompatiblePairHasRobustnessOne) {
  std::ofstream(path("qq.json")) << json{{"kind", "jm"},
                                        {"first", json::parse(std::ifstream(path("position.json")))},
                                        {"second", json::parse(std::ifstream(path("position.json")))}}
                                        .dump();
  const Result r = run_cli({"robustness", path("qq.json"), path("weyl-noise.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j.at("value"), 1.0);
  EXPECT_EQ(j.at("R"), 0.0);
}

TEST_F(Cli, VerifyTheoremsTableAndJson) {
  const Result table = run_cli({"verify-theorems", "--dims", "2", "--no-monotonicity"});
  EXPECT_EQ(table.code, 0) << table.out << table.err;
  EXPECT_NE(table.out.find("weyl_pair"), std::string::npos);
  EXPECT_NE(table.out.find("PASS"), std::string::npos);

  const Result js = run_cli({"verify-theorems", "--dims", "4", "--theorem", "weyl", "--no-monotonicity", "--json"});
  ASSERT_EQ(js.code, 0) << js.err;
  const json j = json::parse(js.out);
  ASSERT_EQ(j.at("reports").size(), 1u);
  EXPECT_EQ(j.at("reports")[0].at("closed_form"), 0.75);
  EXPECT_EQ(j.at("pass"), true);
}

TEST_F(Cli, VerifyTheoremsSkipsDecodableAboveFour) {
  const Result r = run_cli({"verify-theorems", "--dims", "5", "--theorem", "decodable", "--no-monotonicity", "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.at("reports").empty());
  EXPECT_EQ(j.at("skipped").size(), 1u);
}

TEST_F(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args{"verify-theorems", "--dims", "2", "--theorem", "vn", "--seed", "5", "--json"};
  const Result a = run_cli(args);
  const Result b = run_cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(json::parse(a.out).at("seed"), 5);

  const Result c = run_cli({"check", "jm", path("position.json"), path("position.json"), "--out", path("c1.json")});
  const Result d = run_cli({"check", "jm", path("position.json"), path("position.json"), "--out", path("c2.json")});
  EXPECT_EQ(c.code, 0);
  EXPECT_EQ(c.out, d.out);
  std::stringstream f1, f2;
  f1 << std::ifstream(path("c1.json")).rdbuf();
  f2 << std::ifstream(path("c2.json")).rdbuf();
  EXPECT_EQ(f1.str(), f2.str());
}

}  // namespace
