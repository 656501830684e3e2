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

// Local models of the parties and active-learning query selection.

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace cclab::learn {

struct LabeledSet {
  Eigen::MatrixXd x;        // one row per example
  std::vector<int> y;
  unsigned classes = 0;

  std::size_t rows() const { return static_cast<std::size_t>(x.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(x.cols()); }
  // Rows in the given order.
  LabeledSet subset(const std::vector<std::size_t>& idx) const;
  // Row-wise concatenation; DimensionMismatch on differing widths.
  static LabeledSet concat(const LabeledSet& a, const LabeledSet& b);
};

enum class ModelKind : std::uint8_t { MultinomialLinear, Mlp };

struct Hyper {
  int epochs = 40;
  double lr = 0.05;
  std::uint64_t seed = 0;
  double l2 = 1e-4;
  unsigned hidden = 32;
  std::size_t batch = 8;
};

struct Model {
  ModelKind kind = ModelKind::MultinomialLinear;
  unsigned classes = 0;
  std::size_t features = 0;
  // Linear: w1 is k x d. MLP: w1 is h x d, then tanh, then w2 (k x h).
  Eigen::MatrixXd w1;
  Eigen::VectorXd b1;
  Eigen::MatrixXd w2;
  Eigen::VectorXd b2;
  // Mean training cross-entropy after each epoch.
  std::vector<double> loss_history;

  std::size_t hidden() const { return kind == ModelKind::Mlp ? static_cast<std::size_t>(w1.rows()) : 0; }
};

// DegenerateData on zero rows, ParamError on labels outside [0, classes).
Model train(ModelKind kind, const LabeledSet& data, const Hyper& hyper);
// Fresh training on own ∪ acquired.
Model retrain_with_labels(ModelKind kind, const LabeledSet& own, const LabeledSet& acquired,
                          const Hyper& hyper);

Eigen::VectorXd predict_logits(const Model& m, const Eigen::Ref<const Eigen::VectorXd>& x);
Eigen::VectorXd predict_proba(const Model& m, const Eigen::Ref<const Eigen::VectorXd>& x);
unsigned predict(const Model& m, const Eigen::Ref<const Eigen::VectorXd>& x);
std::vector<int> predict_all(const Model& m, const Eigen::MatrixXd& x);

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits);
// Largest minus second-largest probability; ParamError if k < 2.
double margin_score(const Eigen::Ref<const Eigen::VectorXd>& proba);
// Natural-log entropy with 0 ln 0 = 0.
double entropy_score(const Eigen::Ref<const Eigen::VectorXd>& proba);

// Farthest-point traversal. Each step picks the unchosen pool row with the
// largest Euclidean distance to its nearest seed or chosen row, lowest index
// on ties. ParamError if n > pool rows.
std::vector<std::size_t> greedy_k_center_select(const Eigen::MatrixXd& pool,
                                                const Eigen::MatrixXd& seed_set, std::size_t n);

enum class Strategy : std::uint8_t { Random, Margin, Entropy, GreedyKCenter };
Strategy parse_strategy(const std::string& name);
std::string strategy_name(Strategy s);

// Random draws without replacement. Margin takes the n smallest margins,
// Entropy the n largest entropies, both stable by index. GreedyKCenter is
// seeded with `training_x`.
std::vector<std::size_t> select_queries(Strategy s, const Model& m, const Eigen::MatrixXd& pool,
                                        std::size_t n, std::uint64_t seed,
                                        const Eigen::MatrixXd& training_x);

// Text format, see README: header "cclab-model v1", then key/value lines
// and one "matrix NAME ROWS COLS" block per parameter.
void save_model(const Model& m, std::ostream& out);
Model load_model(std::istream& in);
void save_model(const Model& m, const std::string& path);
Model load_model(const std::string& path);

}  // namespace cclab::learn
