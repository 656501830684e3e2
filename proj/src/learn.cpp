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
#include "cclab/learn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cclab/errors.hpp"
#include "cclab/rng.hpp"

namespace cclab::learn {

LabeledSet LabeledSet::subset(const std::vector<std::size_t>& idx) const {
  LabeledSet out;
  out.classes = classes;
  out.x.resize(static_cast<Eigen::Index>(idx.size()), x.cols());
  out.y.reserve(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= rows()) throw RangeError("subset index out of range");
    out.x.row(static_cast<Eigen::Index>(i)) = x.row(static_cast<Eigen::Index>(idx[i]));
    out.y.push_back(y[idx[i]]);
  }
  return out;
}

LabeledSet LabeledSet::concat(const LabeledSet& a, const LabeledSet& b) {
  if (a.rows() == 0) return b;
  if (b.rows() == 0) return a;
  if (a.dim() != b.dim()) throw DimensionMismatch("concat: feature widths differ");
  LabeledSet out;
  out.classes = std::max(a.classes, b.classes);
  out.x.resize(a.x.rows() + b.x.rows(), a.x.cols());
  out.x << a.x, b.x;
  out.y = a.y;
  out.y.insert(out.y.end(), b.y.begin(), b.y.end());
  return out;
}

Eigen::VectorXd softmax(const Eigen::Ref<const Eigen::VectorXd>& logits) {
  const double mx = logits.maxCoeff();
  Eigen::VectorXd e = (logits.array() - mx).exp();
  return e / e.sum();
}

namespace {

void uniform_init(Eigen::MatrixXd& m, double a, Rng& rng) {
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = (2.0 * rng.uniform_open01() - 1.0) * a;
}

double mean_loss(const Model& m, const LabeledSet& data) {
  double total = 0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const Eigen::VectorXd p = predict_proba(m, data.x.row(static_cast<Eigen::Index>(i)).transpose());
    total -= std::log(std::max(p(data.y[i]), 1e-300));
  }
  return total / static_cast<double>(data.rows());
}

unsigned class_count(const LabeledSet& data) {
  int mx = -1;
  for (int v : data.y) mx = std::max(mx, v);
  const unsigned k = data.classes ? data.classes : static_cast<unsigned>(mx + 1);
  for (int v : data.y) {
    if (v < 0 || static_cast<unsigned>(v) >= k) throw ParamError("label outside [0, classes)");
  }
  return k;
}

}  // namespace

Model train(ModelKind kind, const LabeledSet& data, const Hyper& hyper) {
  if (data.rows() == 0) throw DegenerateData("train: no rows");
  if (data.y.size() != data.rows()) throw LengthMismatch("train: label count differs from rows");
  if (hyper.epochs < 1 || !(hyper.lr > 0) || hyper.batch == 0) throw ParamError("train: bad hyperparameters");
  const unsigned k = class_count(data);
  const auto d = static_cast<Eigen::Index>(data.dim());
  const auto kk = static_cast<Eigen::Index>(k);

  Rng rng = Rng::derive(hyper.seed, "cclab.learn.train");
  Model m;
  m.kind = kind;
  m.classes = k;
  m.features = data.dim();
  if (kind == ModelKind::MultinomialLinear) {
    m.w1 = Eigen::MatrixXd::Zero(kk, d);
    m.b1 = Eigen::VectorXd::Zero(kk);
  } else {
    if (hyper.hidden == 0) throw ParamError("train: hidden width must be positive");
    const auto h = static_cast<Eigen::Index>(hyper.hidden);
    m.w1.resize(h, d);
    m.w2.resize(kk, h);
    uniform_init(m.w1, std::sqrt(6.0 / static_cast<double>(d + h)), rng);
    uniform_init(m.w2, std::sqrt(6.0 / static_cast<double>(h + kk)), rng);
    m.b1 = Eigen::VectorXd::Zero(h);
    m.b2 = Eigen::VectorXd::Zero(kk);
  }

  // One observed class: only the output biases are fitted, so the model
  // predicts that class for every input.
  const bool single_class = std::all_of(data.y.begin(), data.y.end(), [&](int v) { return v == data.y[0]; });
  if (single_class) (kind == ModelKind::MultinomialLinear ? m.w1 : m.w2).setZero();

  std::vector<std::size_t> order(data.rows());
  std::iota(order.begin(), order.end(), 0);
  Eigen::MatrixXd g_w1 = Eigen::MatrixXd::Zero(m.w1.rows(), m.w1.cols());
  Eigen::VectorXd g_b1 = Eigen::VectorXd::Zero(m.b1.size());
  Eigen::MatrixXd g_w2 = Eigen::MatrixXd::Zero(m.w2.rows(), m.w2.cols());
  Eigen::VectorXd g_b2 = Eigen::VectorXd::Zero(m.b2.size());

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.uniform_below(i)]);
    const double lr = hyper.lr / (1.0 + 0.05 * epoch);
    for (std::size_t start = 0; start < order.size(); start += hyper.batch) {
      const std::size_t end = std::min(order.size(), start + hyper.batch);
      g_w1.setZero();
      g_b1.setZero();
      g_w2.setZero();
      g_b2.setZero();
      for (std::size_t t = start; t < end; ++t) {
        const auto row = static_cast<Eigen::Index>(order[t]);
        const Eigen::VectorXd x = data.x.row(row).transpose();
        const int label = data.y[order[t]];
        if (kind == ModelKind::MultinomialLinear) {
          Eigen::VectorXd g = softmax(m.w1 * x + m.b1);
          g(label) -= 1.0;
          g_w1.noalias() += g * x.transpose();
          g_b1 += g;
        } else {
          const Eigen::VectorXd hdn = (m.w1 * x + m.b1).array().tanh().matrix();
          Eigen::VectorXd g = softmax(m.w2 * hdn + m.b2);
          g(label) -= 1.0;
          g_w2.noalias() += g * hdn.transpose();
          g_b2 += g;
          const Eigen::VectorXd da = ((m.w2.transpose() * g).array() * (1.0 - hdn.array().square())).matrix();
          g_w1.noalias() += da * x.transpose();
          g_b1 += da;
        }
      }
      const double scale = lr / static_cast<double>(end - start);
      if (!(single_class && kind == ModelKind::MultinomialLinear)) m.w1 -= scale * g_w1 + lr * hyper.l2 * m.w1;
      m.b1 -= scale * g_b1;
      if (kind == ModelKind::Mlp) {
        if (!single_class) m.w2 -= scale * g_w2 + lr * hyper.l2 * m.w2;
        m.b2 -= scale * g_b2;
      }
    }
    m.loss_history.push_back(mean_loss(m, data));
  }
  return m;
}

Model retrain_with_labels(ModelKind kind, const LabeledSet& own, const LabeledSet& acquired,
                          const Hyper& hyper) {
  if (acquired.rows() && own.rows() && own.classes && acquired.classes && own.classes != acquired.classes) {
    throw ParamError("retrain: label domains differ");
  }
  return train(kind, LabeledSet::concat(own, acquired), hyper);
}

Eigen::VectorXd predict_logits(const Model& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (static_cast<std::size_t>(x.size()) != m.features) throw DimensionMismatch("predict: feature width");
  if (m.kind == ModelKind::MultinomialLinear) return m.w1 * x + m.b1;
  const Eigen::VectorXd hdn = (m.w1 * x + m.b1).array().tanh().matrix();
  return m.w2 * hdn + m.b2;
}

Eigen::VectorXd predict_proba(const Model& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return softmax(predict_logits(m, x));
}

unsigned predict(const Model& m, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Eigen::Index best;
  predict_logits(m, x).maxCoeff(&best);
  return static_cast<unsigned>(best);
}

std::vector<int> predict_all(const Model& m, const Eigen::MatrixXd& x) {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out[static_cast<std::size_t>(i)] = static_cast<int>(predict(m, x.row(i).transpose()));
  return out;
}

double margin_score(const Eigen::Ref<const Eigen::VectorXd>& proba) {
  if (proba.size() < 2) throw ParamError("margin needs k >= 2");
  double first = -1, second = -1;
  for (Eigen::Index i = 0; i < proba.size(); ++i) {
    const double p = proba(i);
    if (p > first) {
      second = first;
      first = p;
    } else if (p > second) {
      second = p;
    }
  }
  return first - second;
}

double entropy_score(const Eigen::Ref<const Eigen::VectorXd>& proba) {
  double h = 0;
  for (Eigen::Index i = 0; i < proba.size(); ++i) {
    if (proba(i) > 0) h -= proba(i) * std::log(proba(i));
  }
  return h;
}

std::vector<std::size_t> greedy_k_center_select(const Eigen::MatrixXd& pool,
                                                const Eigen::MatrixXd& seed_set, std::size_t n) {
  const auto rows = static_cast<std::size_t>(pool.rows());
  if (n > rows) throw ParamError("k-center: n exceeds pool size");
  if (seed_set.rows() > 0 && seed_set.cols() != pool.cols()) {
    throw DimensionMismatch("k-center: seed width differs from pool");
  }
  std::vector<double> nearest(rows, std::numeric_limits<double>::infinity());
  for (Eigen::Index s = 0; s < seed_set.rows(); ++s) {
    for (std::size_t i = 0; i < rows; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      nearest[i] = std::min(nearest[i], (pool.row(r) - seed_set.row(s)).norm());
    }
  }
  std::vector<bool> taken(rows, false);
  std::vector<std::size_t> out;
  out.reserve(n);
  while (out.size() < n) {
    std::size_t best = rows;
    for (std::size_t i = 0; i < rows; ++i) {
      if (!taken[i] && (best == rows || nearest[i] > nearest[best])) best = i;
    }
    taken[best] = true;
    out.push_back(best);
    const auto b = static_cast<Eigen::Index>(best);
    for (std::size_t i = 0; i < rows; ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      nearest[i] = std::min(nearest[i], (pool.row(r) - pool.row(b)).norm());
    }
  }
  return out;
}

Strategy parse_strategy(const std::string& name) {
  if (name == "random") return Strategy::Random;
  if (name == "margin") return Strategy::Margin;
  if (name == "entropy") return Strategy::Entropy;
  if (name == "greedy-k-center" || name == "kcenter") return Strategy::GreedyKCenter;
  throw ConfigError("unknown strategy '" + name + "'");
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::Random: return "random";
    case Strategy::Margin: return "margin";
    case Strategy::Entropy: return "entropy";
    case Strategy::GreedyKCenter: return "greedy-k-center";
  }
  return "?";
}

std::vector<std::size_t> select_queries(Strategy s, const Model& m, const Eigen::MatrixXd& pool,
                                        std::size_t n, std::uint64_t seed,
                                        const Eigen::MatrixXd& training_x) {
  const auto rows = static_cast<std::size_t>(pool.rows());
  if (n > rows) throw ParamError("select: n exceeds pool size");
  std::vector<std::size_t> idx(rows);
  std::iota(idx.begin(), idx.end(), 0);
  switch (s) {
    case Strategy::Random: {
      Rng rng = Rng::derive(seed, "cclab.learn.select");
      for (std::size_t i = 0; i < n; ++i) std::swap(idx[i], idx[i + rng.uniform_below(rows - i)]);
      idx.resize(n);
      return idx;
    }
    case Strategy::Margin:
    case Strategy::Entropy: {
      std::vector<double> score(rows);
      for (std::size_t i = 0; i < rows; ++i) {
        const Eigen::VectorXd p = predict_proba(m, pool.row(static_cast<Eigen::Index>(i)).transpose());
        // Margin: smaller is more uncertain. Entropy: larger is; negate it
        // so that both sort ascending.
        score[i] = s == Strategy::Margin ? margin_score(p) : -entropy_score(p);
      }
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
      idx.resize(n);
      return idx;
    }
    case Strategy::GreedyKCenter:
      return greedy_k_center_select(pool, training_x, n);
  }
  return {};
}

namespace {

constexpr const char* kMagic = "cclab-model v1";

void write_matrix(std::ostream& out, const char* name, const Eigen::MatrixXd& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& want) {
  std::string tag, name;
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> tag >> name >> rows >> cols) || tag != "matrix" || name != want || rows < 0 || cols < 0) {
    throw FrameError("model file: expected matrix " + want);
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(in >> m(r, c))) throw FrameError("model file: truncated matrix " + want);
    }
  }
  return m;
}

}  // namespace

void save_model(const Model& m, std::ostream& out) {
  out << kMagic << '\n';
  out << "kind " << (m.kind == ModelKind::Mlp ? "mlp" : "linear") << '\n';
  out << "classes " << m.classes << '\n';
  out << "features " << m.features << '\n';
  out << std::setprecision(17);
  write_matrix(out, "w1", m.w1);
  write_matrix(out, "b1", m.b1);
  if (m.kind == ModelKind::Mlp) {
    write_matrix(out, "w2", m.w2);
    write_matrix(out, "b2", m.b2);
  }
}

Model load_model(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw FrameError("model file: bad header");
  std::string key, kind;
  Model m;
  if (!(in >> key >> kind) || key != "kind" || (kind != "mlp" && kind != "linear")) {
    throw FrameError("model file: bad kind");
  }
  m.kind = kind == "mlp" ? ModelKind::Mlp : ModelKind::MultinomialLinear;
  if (!(in >> key >> m.classes) || key != "classes") throw FrameError("model file: bad classes");
  if (!(in >> key >> m.features) || key != "features") throw FrameError("model file: bad features");
  m.w1 = read_matrix(in, "w1");
  m.b1 = read_matrix(in, "b1");
  if (m.kind == ModelKind::Mlp) {
    m.w2 = read_matrix(in, "w2");
    m.b2 = read_matrix(in, "b2");
  }
  const auto out_rows = m.kind == ModelKind::Mlp ? m.w2.rows() : m.w1.rows();
  if (static_cast<std::size_t>(m.w1.cols()) != m.features || out_rows != static_cast<Eigen::Index>(m.classes)) {
    throw FrameError("model file: shapes disagree with header");
  }
  return m;
}

void save_model(const Model& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  save_model(m, out);
}

Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  return load_model(in);
}

}  // namespace cclab::learn
