// Copyright 2026 The cclab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cclab/experiment.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "cclab/errors.hpp"

namespace cclab::exp {
namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.dataset.classes = 3;
  c.dataset.dim = 4;
  c.dataset.per_class = 120;
  c.parties = 5;
  c.queriers = 2;
  c.pool_size = 20;
  c.eval_size = 60;
  c.max_queries = 10;
  c.noise = dp::NoiseSpec::gaussian(4);
  c.epsilon_max = 20;
  c.seeds = {1, 2};
  c.hyper.epochs = 10;
  return c;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream os;
  write_reports_csv(os, r);
  write_queries_csv(os, r);
  return os.str();
}

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(CCLAB_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("cclab_exp_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

TEST(ConfigTest, MinimalAndDefaults) {
  const auto c = parse_config(R"({"version": 1})");
  EXPECT_EQ(c.parties, 25u);
  EXPECT_EQ(c.queriers, 3u);
  EXPECT_EQ(c.noise.scale, 40.0);
  EXPECT_EQ(c.epsilon_max, 2.0);
}

TEST(ConfigTest, RoundTripsThroughDump) {
  auto c = small_config();
  c.keep = {1, 1, 0.2};
  c.strategy = learn::Strategy::Margin;
  const auto back = parse_config(dump_config(c));
  EXPECT_EQ(dump_config(back), dump_config(c));
}

TEST(ConfigTest, Rejections) {
  EXPECT_THROW(parse_config("{}"), ConfigError);
  EXPECT_THROW(parse_config("not json"), ConfigError);
  EXPECT_THROW(parse_config(R"({"version": 1, "colour": 2})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"version": 2})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"version": 1, "transport": "udp"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"version": 1, "backend": "real", "models": "mlp"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"version": 1, "parties": "many"})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"version": 1, "dataset": {"kind": "blobs", "colour": 1}})"), ConfigError);
}

TEST(ExperimentTest, DeterministicAndAccountantConsistent) {
  const auto cfg = small_config();
  const auto a = run_experiment(cfg);
  const auto b = run_experiment(cfg);
  EXPECT_EQ(csv_of(a), csv_of(b));
  EXPECT_EQ(a.reports.size(), cfg.seeds.size() * cfg.queriers * 2);
  for (const auto& r : a.reports) {
    dp::RdpLedger ledger(dp::dense_orders(), cfg.delta, cfg.epsilon_max);
    for (std::size_t i = 0; i < r.queries; ++i) ledger.charge(cfg.noise);
    const double want = r.queries == 0 ? 0.0 : dp::rdp_to_dp(ledger);
    if (r.phase == "after") {
      EXPECT_NEAR(r.epsilon_spent, want, 1e-12);
    }
  }
  bool noted = false;
  for (const auto& line : a.audit) noted = noted || line.find("data-independent") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(ExperimentTest, MixedModelsRun) {
  auto cfg = small_config();
  cfg.models = "mixed";
  cfg.seeds = {3};
  const auto r = run_experiment(cfg);
  EXPECT_FALSE(r.queries.empty());
}

TEST(ExperimentTest, BudgetStopsQuerying) {
  auto cfg = small_config();
  cfg.seeds = {1};
  cfg.noise = dp::NoiseSpec::gaussian(40);
  cfg.epsilon_max = 2;
  cfg.max_queries = 1000;
  cfg.pool_size = 200;
  cfg.dataset.per_class = 400;
  const auto r = run_experiment(cfg);
  std::size_t labelled = 0;
  for (const auto& q : r.queries)
    if (q.party == 0 && q.label >= 0) ++labelled;
  EXPECT_EQ(labelled, 128u);
}

TEST(SweepTest, SigmaAgreementLimits) {
  auto cfg = small_config();
  cfg.seeds = {1};
  const auto rows = sweep_sigma(cfg, {1e-3, 1e6});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].agreement, 1.0);
  EXPECT_LT(rows[1].agreement, 0.8);
  EXPECT_GT(rows[0].epsilon_per_query, rows[1].epsilon_per_query);
}

TEST(SweepTest, TimingShape) {
  auto cfg = small_config();
  const auto rows = timing_report(cfg, 5);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].step, "1a");
  EXPECT_EQ(rows[1].step, "1b+1c");
  EXPECT_EQ(rows[2].step, "2+3");
  for (const auto& r : rows) EXPECT_EQ(r.runs, 5u);
}

TEST(CliTest, RunWritesOutputs) {
  const auto dir = temp_dir("run");
  write_file(dir / "cfg.json", dump_config(small_config()));
  EXPECT_EQ(run_cli("run --config " + (dir / "cfg.json").string() + " --out " + (dir / "out").string() +
                    " --seeds 4"),
            0);
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "results.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "queries.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "out" / "audit.log"));
}

TEST(CliTest, ConfigErrorExitsTwo) {
  const auto dir = temp_dir("bad");
  write_file(dir / "cfg.json", R"({"version": 1, "colour": 2})");
  EXPECT_EQ(run_cli("run --config " + (dir / "cfg.json").string() + " --out " + dir.string()), 2);
  EXPECT_EQ(run_cli("run --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(run_cli("run --config " + (dir / "cfg.json").string() + " --transport carrier-pigeon"), 2);
}

TEST(CliTest, AbortExhaustionExitsThree) {
  auto cfg = small_config();
  cfg.backend = "real";
  cfg.key_bits = 256;
  cfg.sec_bits = 250;
  cfg.seeds = {1};
  cfg.max_aborts = 2;
  const auto dir = temp_dir("abort");
  write_file(dir / "cfg.json", dump_config(cfg));
  EXPECT_EQ(run_cli("run --config " + (dir / "cfg.json").string() + " --out " + dir.string()), 3);
}

}  // namespace
}  // namespace cclab::exp
