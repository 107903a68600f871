#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace
{
struct Outcome
{
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path &p)
{
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test
{
protected:
  fs::path dir;

  void SetUp() override
  {
    const auto *info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir = fs::temp_directory_path() / (std::string("docosim_cli_") + info->name());
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path write(const std::string &name, const json &doc)
  {
    const fs::path p = dir / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }

  Outcome cli(const std::string &args, const std::string &env = "")
  {
    const fs::path o = dir / "stdout.txt", e = dir / "stderr.txt";
    const std::string cmd = (env.empty() ? "" : env + " ") + std::string(DOCOSIM_CLI) + " " +
                            args + " >" + o.string() + " 2>" + e.string();
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(o);
    r.err = slurp(e);
    return r;
  }
};

json minimal()
{
  return json::parse(R"({
    "topology": {"kind": "cycle", "n": 8},
    "decision_set": {"kind": "ball", "R": 1.0, "d": 3},
    "schedule": {"kind": "random_linear", "G": 1.0},
    "algorithm": {"name": "adftgl"},
    "T": 300,
    "seed": 5,
    "output": {"trace_stride": 50}
  })");
}
}  // namespace

TEST_F(Cli, MinimalRunWritesTraceAndMetadata)
{
  const auto cfg = write("c.json", minimal());
  const Outcome r = cli("run --config " + cfg.string() + " --out " + (dir / "o").string());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string trace = slurp(dir / "o" / "trace.csv");
  EXPECT_EQ(trace.substr(0, trace.find('\n')),
            "round,learner,cum_loss,comparator,regret,comm_rounds,consensus_err");
  const json meta = json::parse(slurp(dir / "o" / "metadata.json"));
  EXPECT_EQ(meta["resolved"]["algorithm"], "adftgl");
  EXPECT_EQ(meta["invariant_violations"], 0);
  EXPECT_LE(meta["R_T_1"].get<double>(), meta["bound_value"].get<double>());
}

TEST_F(Cli, MissingFieldIsConfigError)
{
  json doc = minimal();
  doc.erase("T");
  const Outcome r = cli("run --config " + write("c.json", doc).string() + " --out " +
                        (dir / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("\"T\""), std::string::npos) << r.err;
}

TEST_F(Cli, UnknownFieldIsConfigError)
{
  json doc = minimal();
  doc["algorithm"]["step"] = 0.1;
  const Outcome r = cli("run --config " + write("c.json", doc).string() + " --out " +
                        (dir / "o").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("step"), std::string::npos) << r.err;
}

TEST_F(Cli, LowerBoundScheduleNeedsEvenCycle)
{
  json doc = minimal();
  doc["topology"] = {{"kind", "path"}, {"n", 7}};
  doc["decision_set"] = {{"kind", "centered_box"}, {"R", 1.0}, {"d", 1}};
  doc["schedule"] = {{"kind", "lower_convex"}, {"G", 1.0}};
  const Outcome r = cli("run --config " + write("c.json", doc).string() + " --out " +
                        (dir / "o").string());
  EXPECT_EQ(r.code, 2) << r.err;
}

TEST_F(Cli, UsageErrors)
{
  EXPECT_EQ(cli("run").code, 1);
  EXPECT_EQ(cli("frobnicate --config x").code, 1);
  EXPECT_EQ(cli("run --config " + (dir / "absent.json").string()).code, 1);
}

TEST_F(Cli, RunRejectsSweepAxes)
{
  json doc = minimal();
  doc["sweep"] = {{"n", {8, 16}}};
  const Outcome r = cli("run --config " + write("c.json", doc).string() + " --out " +
                        (dir / "o").string());
  EXPECT_EQ(r.code, 2);
}

TEST_F(Cli, OutputsAreByteIdenticalAcrossRuns)
{
  const auto cfg = write("c.json", minimal());
  ASSERT_EQ(cli("run --quiet --config " + cfg.string() + " --out " + (dir / "a").string()).code,
            0);
  ASSERT_EQ(cli("run --quiet --config " + cfg.string() + " --out " + (dir / "b").string()).code,
            0);
  EXPECT_EQ(slurp(dir / "a" / "trace.csv"), slurp(dir / "b" / "trace.csv"));
  EXPECT_EQ(slurp(dir / "a" / "metadata.json"), slurp(dir / "b" / "metadata.json"));
}

TEST_F(Cli, MetadataRoundTrip)
{
  const auto cfg = write("c.json", minimal());
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir / "a").string()).code, 0);
  const Outcome r =
    cli("run --config " + (dir / "a" / "metadata.json").string() + " --out " + (dir / "b").string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir / "a" / "trace.csv"), slurp(dir / "b" / "trace.csv"));
  EXPECT_EQ(slurp(dir / "a" / "metadata.json"), slurp(dir / "b" / "metadata.json"));
}

TEST_F(Cli, SeedEnvironmentOverride)
{
  json doc = minimal();
  doc["schedule"]["seed"] = 11;
  const auto cfg = write("c.json", doc);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir / "a").string()).code, 0);
  ASSERT_EQ(cli("run --config " + cfg.string() + " --out " + (dir / "b").string(),
                "DOCOSIM_SEED=4242")
              .code,
            0);
  const json a = json::parse(slurp(dir / "a" / "metadata.json"));
  const json b = json::parse(slurp(dir / "b" / "metadata.json"));
  EXPECT_EQ(a["resolved"]["schedule_seed"], 11);
  EXPECT_EQ(b["config"]["seed"], 4242);
  EXPECT_FALSE(b["config"]["schedule"].contains("seed"));
  EXPECT_NE(a["R_T_1"], b["R_T_1"]);
}

TEST_F(Cli, SinglePointSweepMatchesRun)
{
  json doc = minimal();
  const auto single = write("c.json", doc);
  doc["sweep"] = {{"n", {8}}};
  const auto sweep = write("s.json", doc);
  ASSERT_EQ(cli("run --config " + single.string() + " --out " + (dir / "r").string()).code, 0);
  ASSERT_EQ(cli("sweep --config " + sweep.string() + " --out " + (dir / "s").string()).code, 0);
  EXPECT_EQ(slurp(dir / "r" / "trace.csv"), slurp(dir / "s" / "point_000" / "trace.csv"));
}

TEST_F(Cli, SweepSummaryMatchesMetadata)
{
  json doc = minimal();
  doc["sweep"] = {{"n", {8, 16, 32}}};
  const Outcome r = cli("sweep --jobs 2 --config " + write("s.json", doc).string() + " --out " +
                        (dir / "s").string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(dir / "s" / "sweep_summary.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "point,n,R_T_1,bound_value,comm_rounds,status");
  int rows = 0;
  while (std::getline(csv, line))
  {
    std::vector<std::string> f;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');)
    {
      f.push_back(cell);
    }
    ASSERT_EQ(f.size(), 6u);
    char name[16];
    std::snprintf(name, sizeof name, "point_%03d", rows);
    const json meta = json::parse(slurp(dir / "s" / name / "metadata.json"));
    EXPECT_EQ(meta["config"]["topology"]["n"].get<int>(), std::stoi(f[1]));
    EXPECT_EQ(std::stod(f[2]), meta["R_T_1"].get<double>());
    EXPECT_EQ(std::stod(f[3]), meta["bound_value"].get<double>());
    EXPECT_EQ(std::stoi(f[4]), meta["comm_rounds"].get<int>());
    EXPECT_EQ(f[5], "ok");
    rows++;
  }
  EXPECT_EQ(rows, 3);
}

TEST_F(Cli, SweepPartialFailure)
{
  json doc = minimal();
  doc["sweep"] = {{"n", {8, 9}}};
  const Outcome r = cli("sweep --quiet --config " + write("s.json", doc).string() + " --out " +
                        (dir / "s").string());
  EXPECT_EQ(r.code, 4);
  const std::string csv = slurp(dir / "s" / "sweep_summary.csv");
  EXPECT_NE(csv.find(",ok\n"), std::string::npos);
  EXPECT_NE(csv.find(",config_error\n"), std::string::npos);
}

TEST_F(Cli, ValidateReportsPsd)
{
  json doc = minimal();
  doc["topology"]["n"] = 16;
  Outcome r = cli("validate --config " + write("a.json", doc).string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("is_psd=true"), std::string::npos);
  EXPECT_NE(r.out.find("cycle_spectral_bound=true"), std::string::npos);

  doc["topology"]["n"] = 4;
  doc["lazy"] = false;
  r = cli("validate --config " + write("b.json", doc).string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("is_psd=false"), std::string::npos);

  doc["topology"]["kind"] = "complete";
  r = cli("validate --config " + write("c.json", doc).string());
  ASSERT_EQ(r.code, 0) << r.err;
  const auto at = r.out.find("sigma2=");
  ASSERT_NE(at, std::string::npos);
  EXPECT_LE(std::abs(std::stod(r.out.substr(at + 7))), 1e-12) << r.out;
}

TEST_F(Cli, GossipBenchOnCompleteGraph)
{
  json doc = minimal();
  doc["topology"] = {{"kind", "complete"}, {"n", 6}};
  doc["lazy"] = false;
  const Outcome r = cli("gossip-bench --config " + write("c.json", doc).string() + " --out " +
                        (dir / "g").string());
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(slurp(dir / "g" / "gossip_bench.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "kernel,iteration,consensus_error");
  bool saw = false;
  while (std::getline(csv, line))
  {
    if (line.rfind("standard,1,", 0) == 0)
    {
      EXPECT_LE(std::stod(line.substr(11)), 1e-12);
      saw = true;
    }
  }
  EXPECT_TRUE(saw);
}

TEST_F(Cli, BoundsTableFollowsMode)
{
  json doc = minimal();
  doc["topology"]["n"] = 64;
  doc["decision_set"] = {{"kind", "centered_box"}, {"R", 1.0}, {"d", 1}};
  doc["schedule"] = {{"kind", "lower_convex"}, {"G", 1.0}, {"C", 1}};
  Outcome r = cli("bounds --config " + write("a.json", doc).string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find("strongly_convex"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("lower_convex"), std::string::npos);
  EXPECT_NE(r.out.find("adftgl_convex"), std::string::npos);
  EXPECT_NE(r.out.find("branch n > 8C+16"), std::string::npos);

  doc["schedule"] = {{"kind", "quadratic_tracking"}, {"alpha", 0.5}};
  r = cli("bounds --config " + write("b.json", doc).string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("adftgl_strongly_convex"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("lower_strongly_convex"), std::string::npos);
}

TEST_F(Cli, CustomEdgesAreOneBased)
{
  json doc = minimal();
  doc["topology"] = {{"kind", "custom"}, {"n", 3}, {"edges", {{1, 2}, {2, 3}}}};
  EXPECT_EQ(cli("validate --config " + write("a.json", doc).string()).code, 0);
  doc["topology"]["edges"] = {{0, 1}, {1, 2}};
  EXPECT_EQ(cli("validate --config " + write("b.json", doc).string()).code, 2);
}

TEST_F(Cli, ShippedConfigsValidate)
{
  int seen = 0;
  for (const auto &entry : fs::directory_iterator(DOCOSIM_CONFIG_DIR))
  {
    if (entry.path().extension() != ".json")
    {
      continue;
    }
    const Outcome r = cli("validate --config " + entry.path().string());
    EXPECT_EQ(r.code, 0) << entry.path() << "\n" << r.err;
    seen++;
  }
  EXPECT_GE(seen, 1);
}
