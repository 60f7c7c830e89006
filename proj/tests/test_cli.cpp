#include <gtest/gtest.h>

#include <sstream>

#include "csmpc_cli/cli.hpp"
#include "oracles.hpp"

using namespace csmpc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path write_config(const fs::path& dir, const std::string& body) {
  const fs::path p = dir / "config.json";
  write_file_atomic(p, body);
  return p;
}

// Small and fast pipeline settings.
const char* kConfig = R"({
  "counts": {"train": 40, "val": 60, "test": 3},
  "data_seed": 4,
  "predictor": {"kind": "ar", "q": 2},
  "solver": {"iterations_per_stage": 80, "random_starts": 1}
})";

}  // namespace

TEST(Cli, ParseErrorsExitWithOne) {
  EXPECT_EQ(run({}).code, cli::kExitValidation);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitValidation);
  EXPECT_EQ(run({"calibrate", "--delta", "abc"}).code, cli::kExitValidation);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
}

TEST(Cli, MissingInputIsAValidationError) {
  const auto dir = csmpc::testing::scratch_dir("cli_missing");
  const Outcome o = run({"fit", "--dir", dir.string()});
  EXPECT_NE(o.code, cli::kExitOk);
}

TEST(Cli, UnknownConfigFieldIsRejectedByName) {
  const auto dir = csmpc::testing::scratch_dir("cli_unknown");
  const auto cfg = write_config(dir, R"({"deltta": 0.1})");
  const Outcome o = run({"generate", "--config", cfg.string(), "--dir", dir.string()});
  EXPECT_EQ(o.code, cli::kExitValidation);
  EXPECT_NE(o.err.find("deltta"), std::string::npos);
}

TEST(Cli, InvalidValuesExitWithOne) {
  const auto dir = csmpc::testing::scratch_dir("cli_invalid");
  const auto cfg = write_config(dir, kConfig);
  ASSERT_EQ(run({"generate", "--config", cfg.string(), "--dir", dir.string()}).code, 0);
  ASSERT_EQ(run({"fit", "--config", cfg.string(), "--dir", dir.string()}).code, 0);
  EXPECT_EQ(run({"calibrate", "--config", cfg.string(), "--dir", dir.string(), "--delta", "1.5"}).code, 1);
  EXPECT_EQ(run({"calibrate", "--config", cfg.string(), "--dir", dir.string(), "--H", "99"}).code, 1);
  EXPECT_EQ(run({"simulate", "--config", cfg.string(), "--dir", dir.string(), "--mode", "replay"}).code, 1);
}

TEST(Cli, CommandLineOverridesConfigFile) {
  cli::RunConfig cfg;
  cli::apply_config(cfg, json::parse(R"({"delta": 0.2, "T": 10, "planner": {"H": 5}})"));
  EXPECT_EQ(cfg.delta, 0.2);
  EXPECT_EQ(cfg.T, 10);
  EXPECT_EQ(cfg.planner["H"], 5);
  const json echo = cli::config_echo(cfg);
  EXPECT_FALSE(echo.contains("dir"));

  const auto dir = csmpc::testing::scratch_dir("cli_precedence");
  const auto path = write_config(dir, kConfig);
  ASSERT_EQ(run({"generate", "--config", path.string(), "--dir", dir.string(), "--seed", "9"}).code, 0);
  const json d = read_json(dir / "dataset.json");
  EXPECT_EQ(d["seed"], 9);
  EXPECT_EQ(d["config"]["data_seed"], 9);
  EXPECT_EQ(d["config"]["counts"]["val"], 60);
}

TEST(Cli, PipelineArtifactsAndReport) {
  const auto dir = csmpc::testing::scratch_dir("cli_pipeline");
  const auto cfg = write_config(dir, kConfig);
  const std::string c = cfg.string(), d = dir.string();
  ASSERT_EQ(run({"generate", "--config", c, "--dir", d}).code, 0);
  ASSERT_EQ(run({"fit", "--config", c, "--dir", d}).code, 0);
  ASSERT_EQ(run({"calibrate", "--config", c, "--dir", d}).code, 0);
  ASSERT_EQ(run({"coverage", "--config", c, "--dir", d}).code, 0);
  ASSERT_EQ(run({"plan", "--config", c, "--dir", d}).code, 0);
  ASSERT_EQ(run({"simulate", "--config", c, "--dir", d, "--runs", "2"}).code, 0);
  ASSERT_EQ(run({"report", "--config", c, "--in", d}).code, 0);

  for (const char* f : {"dataset.json", "predictor.json", "calibration.json", "coverage.json", "scores.csv",
                        "plan.json", "plan.csv", "batch_report.json", "batch_summary.csv", "paired_cost.csv",
                        "report.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
  EXPECT_EQ(read_file(dir / "report.json"), read_file(dir / "batch_report.json"));
  EXPECT_EQ(read_file(dir / "scores.csv").rfind("# config {", 0), 0u);

  // The CLI report matches an in-process aggregation of the logged runs.
  std::vector<RunLog> logs;
  for (const auto& e : fs::directory_iterator(dir / "runs")) {
    if (e.path().extension() == ".json") logs.push_back(read_json(e.path()).get<RunLog>());
  }
  ASSERT_EQ(logs.size(), 4u);
  EXPECT_EQ(read_json(dir / "report.json")["report"], json(aggregate(logs)));

  // Same inputs, same bytes.
  const std::string first = read_file(dir / "calibration.json");
  ASSERT_EQ(run({"calibrate", "--config", c, "--dir", d}).code, 0);
  EXPECT_EQ(read_file(dir / "calibration.json"), first);

  // A rerun with fewer runs drops stale logs.
  ASSERT_EQ(run({"simulate", "--config", c, "--dir", d, "--runs", "1", "--mode", "mpc"}).code, 0);
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(dir / "runs")) count += e.path().extension() == ".json" ? 1 : 0;
  EXPECT_EQ(count, 1u);
}
