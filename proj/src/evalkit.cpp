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
#include "cclab/evalkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "cclab/errors.hpp"
#include "cclab/rng.hpp"

namespace cclab::eval {

LabeledSet make_blobs(unsigned k, unsigned d, std::size_t n_per_class, double spread,
                      std::uint64_t seed) {
  if (k == 0 || d == 0 || n_per_class == 0) throw ParamError("blobs: k, d and n must be positive");
  if (!(spread > 0)) throw ParamError("blobs: spread must be positive");
  Rng rng = Rng::derive(seed, "cclab.eval.blobs");
  const double sep = std::max(6.0, 4.0 * spread);
  Eigen::MatrixXd centers(k, d);
  if (k <= d) {
    // Scaled, randomly rotated simplex: every pair exactly `sep` apart.
    Eigen::MatrixXd g(d, d);
    for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = std::sqrt(-2.0 * std::log(rng.uniform_open01())) *
                                                           std::cos(6.283185307179586 * rng.uniform_open01());
    const Eigen::MatrixXd rot = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
    centers = (sep / std::sqrt(2.0)) * rot.leftCols(k).transpose();
  } else {
    // Rejection sampling in a cube just large enough for k points at the
    // required spacing; the cube grows if placement keeps failing.
    double side = sep * std::pow(static_cast<double>(k), 1.0 / d);
    unsigned placed = 0;
    int failures = 0;
    while (placed < k) {
      Eigen::VectorXd c(d);
      for (unsigned j = 0; j < d; ++j) c(j) = (rng.uniform_open01() - 0.5) * side;
      bool ok = true;
      for (unsigned i = 0; i < placed && ok; ++i) ok = (centers.row(i).transpose() - c).norm() >= sep;
      if (ok) {
        centers.row(placed++) = c.transpose();
        failures = 0;
      } else if (++failures > 200) {
        side *= 1.1;
        failures = 0;
      }
    }
  }
  std::normal_distribution<double> noise(0.0, spread);
  LabeledSet out;
  out.classes = k;
  out.x.resize(static_cast<Eigen::Index>(k * n_per_class), d);
  out.y.reserve(k * n_per_class);
  Eigen::Index row = 0;
  for (unsigned c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n_per_class; ++i, ++row) {
      for (unsigned j = 0; j < d; ++j) out.x(row, j) = centers(c, j) + noise(rng);
      out.y.push_back(static_cast<int>(c));
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_cells(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

LabeledSet parse_csv(std::istream& in, bool header, unsigned classes) {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (header && line_no == 1) continue;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    if (cells.size() < 2) throw ParseError(line_no, 1, "need at least one feature and a label");
    if (width == 0) width = cells.size();
    if (cells.size() != width) {
      throw ParseError(line_no, std::min(cells.size(), width) + 1,
                       "expected " + std::to_string(width) + " cells, got " + std::to_string(cells.size()));
    }
    std::vector<double> feats(width - 1);
    for (std::size_t c = 0; c + 1 < width; ++c) {
      const std::string t = trim(cells[c]);
      double v = 0;
      const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(v)) {
        throw ParseError(line_no, c + 1, "not a number: '" + t + "'");
      }
      feats[c] = v;
    }
    const std::string t = trim(cells.back());
    int label = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), label);
    if (t.empty() || ec != std::errc() || p != t.data() + t.size() || label < 0 ||
        (classes && static_cast<unsigned>(label) >= classes)) {
      throw ParseError(line_no, width, "bad label: '" + t + "'");
    }
    rows.push_back(std::move(feats));
    labels.push_back(label);
  }
  LabeledSet out;
  out.x.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width ? width - 1 : 0));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      out.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  out.y = std::move(labels);
  int mx = -1;
  for (int v : out.y) mx = std::max(mx, v);
  out.classes = classes ? classes : static_cast<unsigned>(mx + 1);
  return out;
}

LabeledSet load_csv(const std::string& path, bool header, unsigned classes) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  return parse_csv(in, header, classes);
}

void write_csv(std::ostream& out, const LabeledSet& data, bool header) {
  if (header) {
    for (std::size_t c = 0; c < data.dim(); ++c) out << 'x' << c << ',';
    out << "label\n";
  }
  out << std::setprecision(17);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t c = 0; c < data.dim(); ++c) {
      out << data.x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) << ',';
    }
    out << data.y[r] << '\n';
  }
}

void write_csv(const std::string& path, const LabeledSet& data, bool header) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_csv(out, data, header);
}

Partition partition(const LabeledSet& data, const PartitionPlan& plan) {
  if (plan.parties < 1) throw InfeasiblePlan("partition: need at least one party");
  if (plan.queriers > plan.parties) throw InfeasiblePlan("partition: more queriers than parties");
  for (double f : plan.keep) {
    if (!(f > 0 && f <= 1)) throw InfeasiblePlan("partition: keep fractions must lie in (0, 1]");
  }
  const std::size_t n = data.rows();
  const std::size_t reserved = plan.eval_size + plan.queriers * plan.pool_size;
  if (reserved > n || (n - reserved) < plan.parties) {
    throw InfeasiblePlan("partition: " + std::to_string(n) + " rows cannot cover the plan");
  }
  Rng rng = Rng::derive(plan.seed, "cclab.eval.partition");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[rng.uniform_below(i)]);

  Partition out;
  auto take = [&](std::size_t from, std::size_t count) {
    return std::vector<std::size_t>(idx.begin() + static_cast<std::ptrdiff_t>(from),
                                    idx.begin() + static_cast<std::ptrdiff_t>(from + count));
  };
  std::size_t pos = 0;
  out.eval = data.subset(take(pos, plan.eval_size));
  pos += plan.eval_size;
  for (unsigned q = 0; q < plan.queriers; ++q) {
    out.pools.push_back(data.subset(take(pos, plan.pool_size)));
    pos += plan.pool_size;
  }
  const std::size_t share = (n - pos) / plan.parties;
  std::vector<std::size_t> dropped;
  for (unsigned p = 0; p < plan.parties; ++p) {
    std::vector<std::size_t> rows = take(pos, share);
    pos += share;
    if (p < plan.queriers && !plan.keep.empty()) {
      if (plan.keep.size() != data.classes) throw InfeasiblePlan("partition: one keep fraction per class");
      std::vector<std::size_t> per_class(data.classes, 0);
      for (std::size_t r : rows) ++per_class[static_cast<std::size_t>(data.y[r])];
      std::vector<std::size_t> quota(data.classes);
      for (unsigned c = 0; c < data.classes; ++c) {
        quota[c] = static_cast<std::size_t>(std::llround(plan.keep[c] * static_cast<double>(per_class[c])));
      }
      std::vector<std::size_t> kept;
      for (std::size_t r : rows) {
        auto& q = quota[static_cast<std::size_t>(data.y[r])];
        if (q > 0) {
          kept.push_back(r);
          --q;
        } else {
          dropped.push_back(r);
        }
      }
      rows = std::move(kept);
    }
    if (rows.empty()) throw InfeasiblePlan("partition: party " + std::to_string(p) + " ends up empty");
    out.parties.push_back(data.subset(rows));
  }
  std::vector<std::size_t> rest = take(pos, n - pos);
  dropped.insert(dropped.end(), rest.begin(), rest.end());
  out.discarded = data.subset(dropped);
  return out;
}

double accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred) {
  if (y_true.size() != y_pred.size()) throw LengthMismatch("accuracy: lengths differ");
  if (y_true.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hit += y_true[i] == y_pred[i];
  return static_cast<double>(hit) / static_cast<double>(y_true.size());
}

std::vector<std::optional<double>> per_class_accuracy(const std::vector<int>& y_true,
                                                      const std::vector<int>& y_pred,
                                                      unsigned classes) {
  if (y_true.size() != y_pred.size()) throw LengthMismatch("per-class accuracy: lengths differ");
  std::vector<std::size_t> total(classes, 0), hit(classes, 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] < 0 || static_cast<unsigned>(y_true[i]) >= classes) throw RangeError("label out of range");
    ++total[static_cast<std::size_t>(y_true[i])];
    hit[static_cast<std::size_t>(y_true[i])] += y_true[i] == y_pred[i];
  }
  std::vector<std::optional<double>> out(classes);
  for (unsigned c = 0; c < classes; ++c) {
    if (total[c]) out[c] = static_cast<double>(hit[c]) / static_cast<double>(total[c]);
  }
  return out;
}

double balanced_accuracy(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                         unsigned classes) {
  double sum = 0;
  int present = 0;
  for (const auto& r : per_class_accuracy(y_true, y_pred, classes)) {
    if (r) {
      sum += *r;
      ++present;
    }
  }
  return present ? sum / present : 0.0;
}

namespace {

// P(y_pred = 1 | y_true = outcome, attr = group)
std::optional<double> rate(const std::vector<int>& y, const std::vector<int>& yp,
                           const std::vector<int>& a, int outcome, int group) {
  std::size_t n = 0, pos = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == outcome && a[i] == group) {
      ++n;
      pos += yp[i] == 1;
    }
  }
  if (!n) return std::nullopt;
  return static_cast<double>(pos) / static_cast<double>(n);
}

std::optional<double> gap(std::optional<double> a, std::optional<double> b) {
  if (!a || !b) return std::nullopt;
  return std::fabs(*a - *b);
}

void check_binary(const std::vector<int>& y, const std::vector<int>& yp, const std::vector<int>& a) {
  if (y.size() != yp.size() || y.size() != a.size()) throw LengthMismatch("fairness: lengths differ");
  for (std::size_t i = 0; i < y.size(); ++i) {
    if ((y[i] | yp[i] | a[i]) & ~1) throw RangeError("fairness metrics need binary values");
  }
}

}  // namespace

OddsGap equalized_odds_gap(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                           const std::vector<int>& attr) {
  check_binary(y_true, y_pred, attr);
  return {gap(rate(y_true, y_pred, attr, 1, 0), rate(y_true, y_pred, attr, 1, 1)),
          gap(rate(y_true, y_pred, attr, 0, 0), rate(y_true, y_pred, attr, 0, 1))};
}

std::optional<double> equal_opportunity_gap(const std::vector<int>& y_true,
                                            const std::vector<int>& y_pred,
                                            const std::vector<int>& attr) {
  return equalized_odds_gap(y_true, y_pred, attr).tpr_gap;
}

std::string EvalReport::csv_header(unsigned classes) {
  std::string h = "seed,party,phase,accuracy,balanced_accuracy,epsilon_spent,queries";
  for (unsigned c = 0; c < classes; ++c) h += ",per_class_" + std::to_string(c);
  return h;
}

std::string EvalReport::csv_row() const {
  std::ostringstream os;
  os << std::setprecision(10);
  os << seed << ',' << party << ',' << phase << ',' << accuracy << ',' << balanced_accuracy << ','
     << epsilon_spent << ',' << queries;
  for (const auto& r : per_class) {
    os << ',';
    if (r) {
      os << *r;
    } else {
      os << "NA";
    }
  }
  return os.str();
}

EvalReport evaluate(const learn::Model& m, const LabeledSet& eval_set) {
  const auto pred = learn::predict_all(m, eval_set.x);
  EvalReport r;
  r.accuracy = accuracy(eval_set.y, pred);
  r.per_class = per_class_accuracy(eval_set.y, pred, m.classes);
  r.balanced_accuracy = balanced_accuracy(eval_set.y, pred, m.classes);
  return r;
}

}  // namespace cclab::eval
