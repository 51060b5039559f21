#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace {

struct Result {
  int code = -1;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + NFT_CLI + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(NFT_DATA_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json json_of(const Result& r) { return nlohmann::json::parse(r.out); }

TEST(Cli, DsepVerdictsAndExitCodes) {
  auto r = run("dsep " + data("bell_graph.json") + " --s1 A --s2 Y --z X");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "true\n");
  r = run("dsep " + data("collider.json") + " --s1 A --s2 C --z B");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "false\n");
  EXPECT_EQ(run("dsep " + data("collider.json") + " --s1 A --s2 C").out, "true\n");
  EXPECT_EQ(run("dsep " + data("collider.json") + " --s1 A,B --s2 B").code, 3);
  EXPECT_EQ(run("dsep " + data("collider.json") + " --s1 A --s2 Q").code, 4);
  EXPECT_EQ(run("dsep " + data("missing.json") + " --s1 A --s2 C").code, 2);
  EXPECT_EQ(run("dsep " + data("pr_box.json") + " --s1 A --s2 C").code, 2);
  EXPECT_EQ(run("dsep").code, 2);
  EXPECT_EQ(run("no-such-command").code, 2);
}

TEST(Cli, PolytopeTest) {
  auto j = json_of(run("polytope-test " + data("pr_box.json") + " --inequality " + data("chsh.json")));
  EXPECT_FALSE(j["inside"]);
  EXPECT_TRUE(j["certificate_checked"]);
  EXPECT_FALSE(j["witness"].is_null());
  EXPECT_EQ(j["inequality"]["value"], "4");
  j = json_of(run("polytope-test " + data("uniform_box.json")));
  EXPECT_TRUE(j["inside"]);
  EXPECT_FALSE(j["weights"].empty());
  j = json_of(run("polytope-test " + data("kcbs_anticorrelated.json") + " --vertices global"));
  EXPECT_FALSE(j["inside"]);
  j = json_of(run("polytope-test " + data("kcbs_anticorrelated.json") + " --vertices pairs"));
  EXPECT_TRUE(j["inside"]);
  EXPECT_EQ(run("polytope-test " + data("pr_box.json") + " --vertices sideways").code, 2);
}

TEST(Cli, ClassicalBound) {
  auto j = json_of(run("classical-bound " + data("chsh.json") + " " + data("chsh_scenario.json")));
  EXPECT_EQ(j["classical_bound"], "2");
  EXPECT_EQ(j["vertex_count"], 256);
  j = json_of(run("classical-bound " + data("kcbs.json") + " " + data("kcbs_scenario.json") +
                  " --vertices global --phenomenon " + data("kcbs_anticorrelated.json")));
  EXPECT_EQ(j["classical_bound"], "4");
  EXPECT_EQ(j["phenomenon"]["value"], "5");
  EXPECT_TRUE(j["phenomenon"]["violated"]);
}

TEST(Cli, FaithfulCheck) {
  auto r = run("faithful-check " + data("signalling_pr_model.json") + " " + data("pr_box.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = json_of(r);
  EXPECT_FALSE(j["faithful"]);
  EXPECT_NE(std::find(j["fine_tuned"].begin(), j["fine_tuned"].end(),
                      nlohmann::json::parse(R"({"s1":["B"],"s2":["X"],"z":["Y"]})")),
            j["fine_tuned"].end());
  EXPECT_EQ(run("faithful-check " + data("signalling_pr_model.json") + " " + data("uniform_box.json")).code, 4);
  EXPECT_TRUE(json_of(run("faithful-check " + data("bell_model.json") + " " + data("bell_phenomenon.json")))["faithful"]);
}

TEST(Cli, NdCheckAndCiScan) {
  EXPECT_TRUE(json_of(run("nd-check " + data("pr_box.json")))["holds"]);
  EXPECT_TRUE(json_of(run("--mode float nd-check " + data("tsirelson_box.json")))["holds"]);
  const auto j = json_of(run("ci-scan " + data("bell_phenomenon.json") + " --over A,B,X,Y --full"));
  EXPECT_FALSE(j["independences"].empty());
  EXPECT_NE(run("--format table ci-scan " + data("pr_box.json")).out.find("(B _||_ X | Y)"),
            std::string::npos);
}

TEST(Cli, VerifyTheorem1MatchesGoldenByteForByte) {
  const auto golden = slurp(NFT_GOLDEN);
  ASSERT_FALSE(golden.empty());
  const auto serial = run("verify-theorem1");
  ASSERT_EQ(serial.code, 0);
  EXPECT_EQ(serial.out, golden);
  EXPECT_EQ(run("verify-theorem1 --jobs 2").out, golden);
  EXPECT_TRUE(json_of(serial)["theorem_holds"]);
}

TEST(Cli, SeedFromEnvironment) {
  const std::string args = "verify-theorem1 --config " + data("theorem1_bell_only.json");
  const auto a = json_of(run(args, "NOFINETUNE_SEED=7"));
  EXPECT_EQ(a["config"]["seed"], 7);
  EXPECT_EQ(a["survivor_count"], json_of(run(args))["survivor_count"]);
  EXPECT_EQ(run(args, "NOFINETUNE_SEED=abc").code, 2);
}

}  // namespace
