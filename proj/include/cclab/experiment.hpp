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
#pragma once

// Batch experiments behind the cclab command line tool.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cclab/dpcore.hpp"
#include "cclab/errors.hpp"
#include "cclab/evalkit.hpp"
#include "cclab/learn.hpp"
#include "cclab/protocol.hpp"

namespace cclab::exp {

inline constexpr int kConfigVersion = 1;

struct DatasetSpec {
  std::string kind = "blobs";  // or "csv"
  unsigned classes = 5;
  unsigned dim = 10;
  std::size_t per_class = 600;
  double spread = 2.0;
  std::string path;
  bool header = false;
};

struct ExperimentConfig {
  int version = kConfigVersion;
  DatasetSpec dataset;
  unsigned parties = 25;
  unsigned queriers = 3;
  std::string models = "linear";  // linear, mlp or mixed
  std::vector<double> keep;
  std::size_t pool_size = 100;
  std::size_t eval_size = 1000;
  std::size_t max_queries = 100;
  dp::NoiseSpec noise = dp::NoiseSpec::gaussian(40.0);
  double epsilon_max = 2.0;
  double delta = 1e-5;
  learn::Strategy strategy = learn::Strategy::Random;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::string transport = "inproc";
  std::string backend = "ideal";  // or "real"
  unsigned key_bits = 2048;
  unsigned width_bits = 32;
  unsigned frac_bits = 16;
  unsigned sec_bits = 40;
  learn::Hyper hyper{};
  unsigned max_aborts = 3;

  // ConfigError on anything inconsistent.
  void validate() const;
};

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string dump_config(const ExperimentConfig& cfg);

// Thrown when one query aborts max_aborts times in a row.
class AbortExhausted : public Error {
 public:
  using Error::Error;
};

struct QueryRecord {
  std::uint64_t seed = 0;
  unsigned party = 0;
  std::size_t pool_index = 0;
  int true_label = 0;
  int label = -1;  // -1 unless the session produced one
  std::string outcome;
  unsigned attempts = 0;
  double epsilon = 0;  // accountant value after this query
};

struct ExperimentResult {
  unsigned classes = 0;
  std::vector<eval::EvalReport> reports;
  std::vector<QueryRecord> queries;
  std::vector<std::string> audit;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_reports_csv(std::ostream& out, const ExperimentResult& r);
void write_queries_csv(std::ostream& out, const ExperimentResult& r);
void write_audit(std::ostream& out, const ExperimentResult& r);

struct PartySweepRow {
  unsigned parties;
  std::uint64_t seed;
  double accuracy_gain;
  double balanced_gain;
  double epsilon;
  double queries;
};
std::vector<PartySweepRow> sweep_parties(const ExperimentConfig& cfg, const std::vector<unsigned>& ks);
void write_party_sweep_csv(std::ostream& out, const std::vector<PartySweepRow>& rows);

struct SigmaSweepRow {
  double sigma;
  std::uint64_t seed;
  double agreement;
  double epsilon_per_query;
  std::size_t labels;
};
std::vector<SigmaSweepRow> sweep_sigma(const ExperimentConfig& cfg, const std::vector<double>& sigmas);
void write_sigma_sweep_csv(std::ostream& out, const std::vector<SigmaSweepRow>& rows);

struct TimingRow {
  std::string backend;
  std::string step;
  double mean_s;
  double std_s;
  std::size_t runs;
};
std::vector<TimingRow> timing_report(const ExperimentConfig& cfg, std::size_t runs = 5);
void write_timing_csv(std::ostream& out, const std::vector<TimingRow>& rows);

// What the answering side of the protocol runs for a trained model.
proto::AnsweringModel to_answering_model(const learn::Model& m, const learn::LabeledSet& training,
                                         ring::FixedPointParams fp);

proto::SessionConfig session_config(const ExperimentConfig& cfg);

}  // namespace cclab::exp
