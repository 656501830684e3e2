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

// Datasets, partitions and metrics for the collaboration experiments.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cclab/learn.hpp"

namespace cclab::eval {

using learn::LabeledSet;

// k Gaussian clusters in d dimensions, n rows per class, isotropic standard
// deviation `spread`. Centroids are pairwise at least max(6, 4 spread)
// apart. ParamError if k, d or n is zero.
LabeledSet make_blobs(unsigned k, unsigned d, std::size_t n_per_class, double spread,
                      std::uint64_t seed);

// Rows of d reals followed by an integer label. `classes` = 0 infers
// max label + 1. ParseError(line, column) on any malformed cell.
LabeledSet parse_csv(std::istream& in, bool header = false, unsigned classes = 0);
LabeledSet load_csv(const std::string& path, bool header = false, unsigned classes = 0);
void write_csv(std::ostream& out, const LabeledSet& data, bool header = false);
void write_csv(const std::string& path, const LabeledSet& data, bool header = false);

struct PartitionPlan {
  unsigned parties = 25;
  unsigned queriers = 3;     // parties [0, queriers) query
  // Fraction of each class a querying party keeps; empty keeps everything.
  std::vector<double> keep;
  std::size_t pool_size = 100;  // per querying party
  std::size_t eval_size = 500;
  std::uint64_t seed = 0;
};

struct Partition {
  std::vector<LabeledSet> parties;
  std::vector<LabeledSet> pools;  // labels retained for analysis only
  LabeledSet eval;
  LabeledSet discarded;  // rows no one holds; makes the union complete
};

// Shuffles, carves out the eval set and the pools, splits the rest into K
// equal parts and down-samples the querying parties by `keep`.
// InfeasiblePlan when the rows do not suffice or a fraction is outside
// (0, 1].
Partition partition(const LabeledSet& data, const PartitionPlan& plan);

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred);
// Recall per class; unset for classes absent from y_true.
std::vector<std::optional<double>> per_class_accuracy(const std::vector<int>& y_true,
                                                      const std::vector<int>& y_pred,
                                                      unsigned classes);
double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                         unsigned classes);

// Unset components are NotDefined (an empty group-outcome cell).
struct OddsGap {
  std::optional<double> tpr_gap;
  std::optional<double> fpr_gap;
};
OddsGap equalized_odds_gap(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                           const std::vector<int>& attr);
std::optional<double> equal_opportunity_gap(const std::vector<int>& y_true,
                                            const std::vector<int>& y_pred,
                                            const std::vector<int>& attr);

struct EvalReport {
  std::uint64_t seed = 0;
  std::string party;
  std::string phase;
  double accuracy = 0;
  double balanced_accuracy = 0;
  double epsilon_spent = 0;
  std::size_t queries = 0;
  std::vector<std::optional<double>> per_class;

  static std::string csv_header(unsigned classes);
  std::string csv_row() const;
};

EvalReport evaluate(const learn::Model& m, const LabeledSet& eval_set);

}  // namespace cclab::eval
