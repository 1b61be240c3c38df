// Drives the built devsel binary end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "test_support.h"

namespace devsel {
namespace {

namespace fs = std::filesystem;
using testing::DataPath;
using testing::ReadText;

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun Cli(const std::string& args) {
  std::string cmd = std::string(DEVSEL_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string SmartHomeArgs() {
  return "--registry " + DataPath("smart_home/registry.json").string() + " --workflow " +
         DataPath("smart_home/workflow.json").string();
}

fs::path Scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("devsel_cli_test_" + std::to_string(getpid()));
  fs::create_directories(dir);
  return dir / name;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

TEST(Cli, SelectWorkedExample) {
  for (const char* solver : {"bf", "hc", "sa", "ga"}) {
    CliRun r = Cli("select " + SmartHomeArgs() + " --model " +
                DataPath("smart_home/model.json").string() + " --solver " + solver);
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out, "alarm: alarm_brand_A; make_coffee: cm_brand_B; score 0.6\n") << solver;
  }
}

TEST(Cli, ExitCodes) {
  const std::string model = " --model " + DataPath("smart_home/model.json").string();
  EXPECT_EQ(Cli("select --registry /does/not/exist --workflow x --model y").code, 2);

  fs::path wf = Scratch("teleport.json");
  WriteText(wf, R"({"functions":["alarm","teleport"],"edges":[]})");
  CliRun infeasible = Cli("select --registry " + DataPath("smart_home/registry.json").string() +
                       " --workflow " + wf.string() + model);
  EXPECT_EQ(infeasible.code, 3);
  EXPECT_NE(infeasible.out.find("teleport"), std::string::npos);

  EXPECT_EQ(Cli("select " + SmartHomeArgs() + model + " --solver bf --bf-cap 3").code, 4);

  fs::path reversed = Scratch("reversed.json");
  WriteText(reversed, R"({"functions":["alarm","make_coffee"],"edges":[["make_coffee","alarm"]]})");
  fs::path assignment = Scratch("assignment.json");
  WriteText(assignment, R"({"assignment":{"alarm":"alarm_brand_A","make_coffee":"cm_brand_B"}})");
  EXPECT_EQ(Cli("policy --registry " + DataPath("smart_home/registry.json").string() +
                " --workflow " + reversed.string() + " --assignment " + assignment.string() +
                " --out " + Scratch("p.json").string())
                .code,
            5);

  EXPECT_EQ(Cli("select " + SmartHomeArgs() + model + " --sa-steps 0").code, 2);
  EXPECT_EQ(Cli("select " + SmartHomeArgs() + model + " --solver gp9").code, 2);
  EXPECT_EQ(Cli("frobnicate").code, 2);
}

TEST(Cli, InconsistentAssignmentIsInvalidInput) {
  fs::path assignment = Scratch("bad_assignment.json");
  WriteText(assignment, R"({"assignment":{"alarm":"cm_brand_A","make_coffee":"cm_brand_B"}})");
  EXPECT_EQ(Cli("policy " + SmartHomeArgs() + " --assignment " + assignment.string() +
                " --out " + Scratch("bad.json").string())
                .code,
            2);
}

TEST(Cli, PolicyIsByteIdenticalOnRerun) {
  fs::path a = Scratch("policy_a.json"), b = Scratch("policy_b.json");
  const std::string args = "policy " + SmartHomeArgs() + " --model " +
                           DataPath("smart_home/model.json").string() + " --out ";
  CliRun first = Cli(args + a.string());
  CliRun second = Cli(args + b.string());
  ASSERT_EQ(first.code, 0) << first.out;
  ASSERT_EQ(second.code, 0);
  EXPECT_EQ(first.out, second.out);
  EXPECT_NE(first.out.find("rules: 2 allow (1 intra-network, 1 outbound) + default deny"),
            std::string::npos)
      << first.out;
  EXPECT_NE(first.out.find("completeness PASS, minimality PASS, closure PASS"),
            std::string::npos);
  EXPECT_EQ(ReadText(a), ReadText(b));
}

TEST(Cli, ValidateDetectsTamperedPolicy) {
  fs::path policy = Scratch("tamper.json");
  ASSERT_EQ(Cli("policy " + SmartHomeArgs() + " --model " +
                DataPath("smart_home/model.json").string() + " --timestamp T --out " +
                policy.string())
                .code,
            0);
  const std::string validate = "validate " + SmartHomeArgs() + " --model " +
                               DataPath("smart_home/model.json").string() + " --policy ";
  EXPECT_EQ(Cli(validate + policy.string()).code, 0);

  auto doc = nlohmann::ordered_json::parse(ReadText(policy));
  doc["rules"][0]["src_ip"] = "10.0.0.6";
  WriteText(policy, doc.dump(2));
  CliRun r = Cli(validate + policy.string());
  EXPECT_EQ(r.code, 6) << r.out;
  EXPECT_NE(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, SynthThenSelectRecoversPlanted) {
  fs::path dir = Scratch("synth");
  CliRun s = Cli("synth --f-count 4 --seed 7 --out-dir " + dir.string());
  ASSERT_EQ(s.code, 0) << s.out;
  for (const char* f : {"registry.json", "workflow.json", "model.json", "planted.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  CliRun sel = Cli("select --solver bf --registry " + (dir / "registry.json").string() +
                " --workflow " + (dir / "workflow.json").string() + " --model " +
                (dir / "model.json").string() + " --out " + (dir / "chosen.json").string());
  ASSERT_EQ(sel.code, 0) << sel.out;
  EXPECT_NE(sel.out.find("score 0.34"), std::string::npos) << sel.out;
  EXPECT_EQ(nlohmann::json::parse(ReadText(dir / "chosen.json")),
            nlohmann::json::parse(ReadText(dir / "planted.json")));
}

TEST(Cli, BenchCsvDeterministicApartFromWallTime) {
  const std::string args =
      "bench --f-counts 3,4 --planted-p 3:0.5 --runs 2 --ga-generations 10 "
      "--ga-population-per-function 10 --sa-steps 500 --format csv --seed 5";
  CliRun a = Cli(args), b = Cli(args + " --serial");
  ASSERT_EQ(a.code, 0) << a.out;
  ASSERT_EQ(b.code, 0) << b.out;
  auto strip = [](const std::string& csv) {
    std::string out, line;
    std::istringstream in(csv);
    while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
    return out;
  };
  EXPECT_EQ(strip(a.out), strip(b.out));
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')),
            "f_count,solver,run,seed,best_score,optimal_score,hit,evaluations,wall_time_s");
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 1 + 2 * 4 * 2);
}

TEST(Cli, ConfigFileWithFlagOverride) {
  fs::path cfg = Scratch("config.json");
  WriteText(cfg, R"({"sa":{"steps":0}})");
  const std::string base = "select " + SmartHomeArgs() + " --model " +
                           DataPath("smart_home/model.json").string() + " --solver sa --config " +
                           cfg.string();
  EXPECT_EQ(Cli(base).code, 2);
  EXPECT_EQ(Cli(base + " --sa-steps 50").code, 0);
}

}  // namespace
}  // namespace devsel
