#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nskqg/cli.hpp"
#include "nskqg/run_support.hpp"

using namespace nskqg;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto d = fs::temp_directory_path() / "nskqg_unit_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void put(const fs::path& p, const json& j) { std::ofstream(p) << j.dump(2); }

int run(std::vector<std::string> args) {
  std::vector<const char*> argv{"nskqg"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(int(argv.size()), argv.data());
}

RunConfig parse_args(std::vector<std::string> args) {
  std::vector<const char*> argv{"nskqg"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse(int(argv.size()), argv.data());
}

json small_simulate() {
  return json{{"Nh", 8}, {"Nv", 4}, {"Lh", 2 * M_PI}, {"T_final", 0.05}, {"dt_max", 0.01}, {"snapshots", 2}};
}

}  // namespace

TEST(Parse, SpectrumFlags) {
  RunConfig c = parse_args({"spectrum", "--eps", "1", "--alpha", "0"});
  EXPECT_EQ(c.subcommand, "spectrum");
  EXPECT_EQ(c.params["eps"].get<double>(), 1.0);
  EXPECT_EQ(c.params["alpha"].get<double>(), 0.0);
  EXPECT_EQ(c.hash.size(), 16u);
}

TEST(Parse, GammaFreeOnlyAtConstantCapillarity) {
  EXPECT_THROW(parse_args({"simulate", "--gamma", "1.5", "--alpha", "0.5"}), ConfigError);
  EXPECT_THROW(parse_args({"simulate", "--gamma", "1.5", "--alpha", "1"}), ConfigError);
  EXPECT_NO_THROW(parse_args({"simulate", "--gamma", "1.5", "--alpha", "0"}));
  EXPECT_THROW(parse_args({"simulate", "--eps", "1.5"}), ConfigError);
  EXPECT_EQ(run({"simulate", "--gamma", "1.5", "--alpha", "0.5"}), 2);
}

TEST(Parse, ListFlag) {
  RunConfig c = parse_args({"rage", "--eps_list", "0.2,0.1"});
  EXPECT_EQ(c.params["eps_list"], json::array({0.2, 0.1}));
}

TEST(Parse, UnknownAndMistypedKeys) {
  auto dir = scratch("keys");
  put(dir / "unknown.json", json{{"epsilon", 0.1}});
  put(dir / "typed.json", json{{"Nh", "thirty-two"}});
  put(dir / "intfloat.json", json{{"snapshots", 2.5}});
  EXPECT_THROW(parse_args({"simulate", "--config", (dir / "unknown.json").string()}), ConfigError);
  EXPECT_THROW(parse_args({"simulate", "--config", (dir / "typed.json").string()}), ConfigError);
  EXPECT_THROW(parse_args({"simulate", "--config", (dir / "intfloat.json").string()}), ConfigError);
  EXPECT_THROW(parse_args({"simulate", "--config", (dir / "missing.json").string()}), ConfigError);
  EXPECT_THROW(parse_args({"simulate", "--Nh", "abc"}), ConfigError);
  EXPECT_THROW(parse_args({"simulate", "--no-such-flag", "1"}), ConfigError);
  EXPECT_THROW(parse_args({"bogus"}), ConfigError);
}

TEST(Parse, GridAndRangeChecks) {
  EXPECT_THROW(parse_args({"simulate", "--Nh", "12"}), ConfigError);
  EXPECT_THROW(parse_args({"spectrum", "--alpha", "1.5"}), ConfigError);
  EXPECT_THROW(parse_args({"qg", "--regime", "weak"}), ConfigError);
  EXPECT_THROW(parse_args({"rage", "--window_radius", "40"}), ConfigError);
}

TEST(Parse, FlagOverridesFileAndIsRecorded) {
  auto dir = scratch("override");
  put(dir / "c.json", json{{"eps", 0.5}, {"xi1", 2.0}, {"seed", 11}});
  RunConfig c = parse_args({"spectrum", "--config", (dir / "c.json").string(), "--eps", "0.25"});
  EXPECT_EQ(c.params["eps"].get<double>(), 0.25);
  EXPECT_EQ(c.params["xi1"].get<double>(), 2.0);
  EXPECT_EQ(c.seed, 11u);
  ASSERT_EQ(c.overrides.size(), 1u);
  EXPECT_NE(c.overrides[0].find("eps"), std::string::npos);

  testing::internal::CaptureStderr();
  const int code =
      run({"spectrum", "--config", (dir / "c.json").string(), "--eps", "0.25", "--out", (dir / "o").string()});
  const std::string err = testing::internal::GetCapturedStderr();
  EXPECT_EQ(code, 0);
  EXPECT_NE(err.find("eps"), std::string::npos);
  EXPECT_NE(slurp(dir / "o" / "run.jsonl").find("\"override\""), std::string::npos);
}

TEST(Parse, HashDependsOnParamsAndSeed) {
  const std::string a = parse_args({"spectrum"}).hash;
  EXPECT_EQ(parse_args({"spectrum"}).hash, a);
  EXPECT_NE(parse_args({"spectrum", "--eps", "0.3"}).hash, a);
  EXPECT_NE(parse_args({"spectrum", "--seed", "9"}).hash, a);
}

TEST(Simulate, RestStateLogsZeroEnergy) {
  auto dir = scratch("rest");
  json cfg = small_simulate();
  cfg["initial_data"] = json{{"r0", json::array()}, {"u0", json::array()}};
  put(dir / "c.json", cfg);
  EXPECT_EQ(run({"simulate", "--config", (dir / "c.json").string(), "--out", (dir / "o").string()}), 0);
  const json s = json::parse(slurp(dir / "o" / "summary.json"));
  EXPECT_EQ(s["E0"].get<double>(), 0.0);
  EXPECT_EQ(s["E_final"].get<double>(), 0.0);
  EXPECT_TRUE(s["flags"]["energy_inequality"].get<bool>());
}

TEST(Simulate, VacuumIsAnError) {
  auto dir = scratch("vacuum");
  json cfg = small_simulate();
  cfg["eps"] = 1.0;
  cfg["initial_data"] =
      json{{"r0", json::array({json{{"profile", "gaussian"}, {"amplitude", -1.5}, {"width", 1.0}}})}, {"u0", json::array()}};
  put(dir / "c.json", cfg);
  testing::internal::CaptureStderr();
  EXPECT_EQ(run({"simulate", "--config", (dir / "c.json").string(), "--out", (dir / "o").string()}), 2);
  testing::internal::GetCapturedStderr();
  EXPECT_NE(slurp(dir / "o" / "run.jsonl").find("\"breakdown\""), std::string::npos);
}

TEST(Simulate, OutputsCarryConfigHash) {
  auto dir = scratch("hash");
  put(dir / "c.json", small_simulate());
  const RunConfig c = parse_args({"simulate", "--config", (dir / "c.json").string()});
  EXPECT_EQ(run({"simulate", "--config", (dir / "c.json").string(), "--out", (dir / "o").string(), "--write_snapshots",
                 "true"}),
            0);
  const json cfg = json::parse(slurp(dir / "o" / "config.json"));
  const std::string h = cfg["config_hash"];
  EXPECT_EQ(h.size(), 16u);
  EXPECT_NE(h, c.hash);  // write_snapshots is part of the hashed parameters
  EXPECT_EQ(json::parse(slurp(dir / "o" / "summary.json"))["config_hash"], h);

  std::istringstream csv(slurp(dir / "o" / "diagnostics.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line.rfind("config_hash,", 0), 0u);
  int rows = 0;
  while (std::getline(csv, line)) {
    EXPECT_EQ(line.rfind(h + ",", 0), 0u) << line;
    ++rows;
  }
  EXPECT_EQ(rows, 3);
  EXPECT_TRUE(fs::exists(dir / "o" / "rho_0000.bin"));
  EXPECT_TRUE(fs::exists(dir / "o" / "rho_0002.bin"));

  std::istringstream log(slurp(dir / "o" / "run.jsonl"));
  while (std::getline(log, line)) EXPECT_EQ(json::parse(line)["config_hash"], h);
}

TEST(Simulate, SameConfigAndSeedReproduce) {
  auto dir = scratch("repro");
  json cfg = small_simulate();
  cfg["initial_data"] = json{
      {"r0", json::array({json{{"profile", "noise"}, {"amplitude", 0.2}, {"band", 2}, {"seed", 5}}})},
      {"u0", json::array({json{{"profile", "noise"}, {"amplitude", 0.2}, {"band", 2}, {"seed", 6}}})}};
  put(dir / "c.json", cfg);
  for (const char* o : {"a", "b"})
    EXPECT_EQ(run({"simulate", "--config", (dir / "c.json").string(), "--out", (dir / o).string()}), 0);
  EXPECT_EQ(slurp(dir / "a" / "diagnostics.csv"), slurp(dir / "b" / "diagnostics.csv"));
  EXPECT_EQ(slurp(dir / "a" / "summary.json"), slurp(dir / "b" / "summary.json"));
}

TEST(Sweep, FailingLegExitsOne) {
  auto dir = scratch("sweep");
  json cfg{{"eps_list", {0.2, 0.05}},
           {"T_final", 0.05},
           {"grid", {{"Nh", 16}, {"Nv", 4}, {"Lh", 4 * M_PI}}},
           {"initial_data",
            {{"r0", json::array({json{{"profile", "mode"}, {"amplitude", 8.0}, {"mode", {1, 0, 0}}}})},
             {"u0", json::array()}}}};
  put(dir / "c.json", cfg);
  EXPECT_EQ(run({"sweep", "--config", (dir / "c.json").string(), "--out", (dir / "o").string()}), 1);
  const std::string csv = slurp(dir / "o" / "report.csv");
  EXPECT_NE(csv.find("vacuum"), std::string::npos);
  EXPECT_NE(csv.find(",ok,"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "o" / "report.json"));
}

TEST(Qg, WritesBudgetAndPasses) {
  auto dir = scratch("qg");
  EXPECT_EQ(run({"qg", "--Nh", "32", "--steps", "3", "--out", (dir / "o").string()}), 0);
  EXPECT_TRUE(fs::exists(dir / "o" / "qg_budget.csv"));
  EXPECT_TRUE(fs::exists(dir / "o" / "qg_final.bin"));
  EXPECT_TRUE(json::parse(slurp(dir / "o" / "qg.json"))["pass"].get<bool>());
}

TEST(Spectrum, SampledComparison) {
  auto dir = scratch("spectrum");
  EXPECT_EQ(run({"spectrum", "--samples", "200", "--out", (dir / "o").string()}), 0);
  const json j = json::parse(slurp(dir / "o" / "spectrum.json"));
  EXPECT_LT(j["sample_distance"].get<double>(), 1e-10);
  EXPECT_FALSE(j["zero_eigenvalue"].get<bool>());
}

TEST(Threads, EnvironmentCapsWorkers) {
  const char* old = std::getenv("NSKQG_THREADS");
  const std::string saved = old ? old : "";
  setenv("NSKQG_THREADS", "1", 1);
  EXPECT_EQ(thread_count(), 1u);
  setenv("NSKQG_THREADS", "junk", 1);
  EXPECT_GE(thread_count(), 1u);
  if (old)
    setenv("NSKQG_THREADS", saved.c_str(), 1);
  else
    unsetenv("NSKQG_THREADS");
}
