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

// cclab: batch experiments over the private collaboration protocol.
//
//   cclab run            --config cfg.json --out results/
//   cclab sweep-parties  --config cfg.json --parties 10,25,50
//   cclab sweep-sigma    --config cfg.json --sigmas 1,5,40
//   cclab timing         --config cfg.json --runs 5
//
// Exit codes: 0 success, 2 configuration error, 3 a query kept aborting.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cclab/experiment.hpp"

namespace {

namespace fs = std::filesystem;
using cclab::exp::ExperimentConfig;

struct CommonFlags {
  std::string config;
  std::string out = "results";
  std::string transport;
  std::string backend;
  std::vector<std::uint64_t> seeds;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config, "experiment config (JSON)");
  cmd->add_option("--out", f.out, "output directory")->capture_default_str();
  cmd->add_option("--transport", f.transport, "inproc or tcp");
  cmd->add_option("--backend", f.backend, "ideal or real");
  cmd->add_option("--seeds", f.seeds, "comma separated seeds")->delimiter(',');
}

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig cfg = f.config.empty() ? ExperimentConfig{} : cclab::exp::load_config(f.config);
  if (!f.transport.empty()) cfg.transport = f.transport;
  if (!f.backend.empty()) cfg.backend = f.backend;
  if (!f.seeds.empty()) cfg.seeds = f.seeds;
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const CommonFlags& f, const std::string& name) {
  fs::create_directories(f.out);
  const fs::path p = fs::path(f.out) / name;
  std::ofstream out(p);
  if (!out) throw cclab::ConfigError("cannot write " + p.string());
  std::cerr << "wrote " << p.string() << '\n';
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cclab: private collaborative labelling experiments"};
  app.require_subcommand(1);

  CommonFlags run_f, parties_f, sigma_f, timing_f;
  std::vector<unsigned> party_list = {10, 25, 50};
  std::vector<double> sigma_list = {0.001, 1, 2, 5, 10, 20, 40, 100, 1000};
  std::size_t runs = 5;

  auto* run = app.add_subcommand("run", "train, query, retrain and evaluate");
  add_common(run, run_f);
  auto* sp = app.add_subcommand("sweep-parties", "accuracy gain and epsilon per party count");
  add_common(sp, parties_f);
  sp->add_option("--parties", party_list, "comma separated K values")->delimiter(',');
  auto* ss = app.add_subcommand("sweep-sigma", "label agreement with the noiseless plurality per sigma");
  add_common(ss, sigma_f);
  ss->add_option("--sigmas", sigma_list, "comma separated noise scales")->delimiter(',');
  auto* tm = app.add_subcommand("timing", "per-step wall clock of the protocol");
  add_common(tm, timing_f);
  tm->add_option("--runs", runs, "sessions to time")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      const auto cfg = resolve(run_f);
      const auto r = cclab::exp::run_experiment(cfg);
      auto a = open_out(run_f, "results.csv");
      cclab::exp::write_reports_csv(a, r);
      auto b = open_out(run_f, "queries.csv");
      cclab::exp::write_queries_csv(b, r);
      auto c = open_out(run_f, "audit.log");
      cclab::exp::write_audit(c, r);
    } else if (sp->parsed()) {
      const auto rows = cclab::exp::sweep_parties(resolve(parties_f), party_list);
      auto out = open_out(parties_f, "sweep_parties.csv");
      cclab::exp::write_party_sweep_csv(out, rows);
    } else if (ss->parsed()) {
      const auto rows = cclab::exp::sweep_sigma(resolve(sigma_f), sigma_list);
      auto out = open_out(sigma_f, "sweep_sigma.csv");
      cclab::exp::write_sigma_sweep_csv(out, rows);
    } else if (tm->parsed()) {
      const auto rows = cclab::exp::timing_report(resolve(timing_f), runs);
      auto out = open_out(timing_f, "timing.csv");
      cclab::exp::write_timing_csv(out, rows);
      cclab::exp::write_timing_csv(std::cout, rows);
    }
  } catch (const cclab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cclab::ParamError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cclab::InfeasiblePlan& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const cclab::exp::AbortExhausted& e) {
    std::cerr << "protocol aborted: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
