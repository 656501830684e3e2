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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "cclab/errors.hpp"

namespace cclab::eval {
namespace {

// Multiset of rows as (label, features) tuples.
std::multiset<std::vector<double>> rows_of(const LabeledSet& s) {
  std::multiset<std::vector<double>> out;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    std::vector<double> r = {static_cast<double>(s.y[i])};
    for (std::size_t j = 0; j < s.dim(); ++j) r.push_back(s.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    out.insert(r);
  }
  return out;
}

std::size_t count_label(const LabeledSet& s, int c) {
  return static_cast<std::size_t>(std::count(s.y.begin(), s.y.end(), c));
}

TEST(BlobsTest, ShapeAndDeterminism) {
  const auto a = make_blobs(3, 4, 10, 2.0, 1);
  EXPECT_EQ(a.rows(), 30u);
  EXPECT_EQ(a.dim(), 4u);
  EXPECT_EQ(a.classes, 3u);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(count_label(a, c), 10u);
  EXPECT_EQ(make_blobs(3, 4, 10, 2.0, 1).x, a.x);
  EXPECT_NE(make_blobs(3, 4, 10, 2.0, 2).x, a.x);
  EXPECT_THROW(make_blobs(3, 4, 0, 2.0, 1), ParamError);
  EXPECT_THROW(make_blobs(0, 4, 1, 2.0, 1), ParamError);
}

TEST(BlobsTest, ManyClassesInFewDimensions) {
  const auto a = make_blobs(6, 2, 5, 1.0, 3);
  EXPECT_EQ(a.rows(), 30u);
}

TEST(CsvTest, ParsesOneRow) {
  std::istringstream in("1.0,2.0,1\n");
  const auto s = parse_csv(in);
  ASSERT_EQ(s.rows(), 1u);
  EXPECT_EQ(s.dim(), 2u);
  EXPECT_EQ(s.y[0], 1);
  EXPECT_EQ(s.x(0, 1), 2.0);
  EXPECT_EQ(s.classes, 2u);
}

TEST(CsvTest, ReportsPosition) {
  std::istringstream in("1.0,2.0,1\n1.0,abc,0\n");
  try {
    parse_csv(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 2u);
  }
  std::istringstream ragged("1,2,0\n1,0\n");
  EXPECT_THROW(parse_csv(ragged), ParseError);
  std::istringstream badlabel("1,2,0.5\n");
  EXPECT_THROW(parse_csv(badlabel), ParseError);
  std::istringstream toolarge("1,2,3\n");
  EXPECT_THROW(parse_csv(toolarge, false, 2), ParseError);
}

TEST(CsvTest, HeaderIsSkipped) {
  std::istringstream in("a,b,label\n0.5,0.25,0\n");
  EXPECT_EQ(parse_csv(in, true).rows(), 1u);
}

TEST(CsvTest, WriterRoundTrips) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto s = make_blobs(3, 2, 3, 1.5, seed);
    std::stringstream ss;
    write_csv(ss, s, seed % 2 == 0);
    const auto back = parse_csv(ss, seed % 2 == 0, 3);
    ASSERT_EQ(back.x, s.x);
    ASSERT_EQ(back.y, s.y);
  }
}

TEST(PartitionTest, TwoPartiesSplitEvenly) {
  const auto data = make_blobs(2, 2, 50, 1.0, 1);
  PartitionPlan plan;
  plan.parties = 2;
  plan.queriers = 0;
  plan.pool_size = 0;
  plan.eval_size = 0;
  const auto p = partition(data, plan);
  EXPECT_EQ(p.parties[0].rows(), 50u);
  EXPECT_EQ(p.parties[1].rows(), 50u);
  auto all = rows_of(p.parties[0]);
  for (const auto& r : rows_of(p.parties[1])) all.insert(r);
  EXPECT_EQ(all, rows_of(data));
}

TEST(PartitionTest, KeepFractionDownsamples) {
  const auto data = make_blobs(2, 2, 200, 1.0, 2);
  PartitionPlan plan;
  plan.parties = 2;
  plan.queriers = 1;
  plan.keep = {1.0, 0.2};
  plan.pool_size = 0;
  plan.eval_size = 0;
  const auto p = partition(data, plan);
  const std::size_t c1 = count_label(p.parties[0], 1);
  const std::size_t before = c1 + p.discarded.rows();
  EXPECT_EQ(c1, static_cast<std::size_t>(std::llround(0.2 * static_cast<double>(before))));
  EXPECT_EQ(count_label(p.discarded, 0), 0u);
}

TEST(PartitionTest, UnionIsOriginalMultiset) {
  const auto data = make_blobs(5, 3, 100, 2.0, 3);
  PartitionPlan plan;
  plan.parties = 7;
  plan.queriers = 2;
  plan.keep = {1, 1, 1, 0.2, 0.2};
  plan.pool_size = 30;
  plan.eval_size = 50;
  const auto p = partition(data, plan);
  std::multiset<std::vector<double>> all = rows_of(p.eval);
  for (const auto& s : p.parties)
    for (const auto& r : rows_of(s)) all.insert(r);
  for (const auto& s : p.pools)
    for (const auto& r : rows_of(s)) all.insert(r);
  for (const auto& r : rows_of(p.discarded)) all.insert(r);
  EXPECT_EQ(all, rows_of(data));
  EXPECT_EQ(p.pools.size(), 2u);
  EXPECT_EQ(p.eval.rows(), 50u);
  for (std::size_t i = 3; i < p.parties.size(); ++i) EXPECT_EQ(p.parties[i].rows(), p.parties[2].rows());
}

TEST(PartitionTest, Infeasible) {
  const auto data = make_blobs(2, 2, 10, 1.0, 4);
  PartitionPlan plan;
  plan.parties = 2;
  plan.eval_size = 100;
  EXPECT_THROW(partition(data, plan), InfeasiblePlan);
  plan.eval_size = 0;
  plan.pool_size = 0;
  plan.queriers = 1;
  plan.keep = {0.0, 1.0};
  EXPECT_THROW(partition(data, plan), InfeasiblePlan);
}

TEST(MetricsTest, Examples) {
  const std::vector<int> y = {0, 0, 1, 1}, p = {0, 0, 1, 0};
  EXPECT_DOUBLE_EQ(accuracy(y, p), 0.75);
  const auto r = per_class_accuracy(y, p, 2);
  EXPECT_DOUBLE_EQ(*r[0], 1.0);
  EXPECT_DOUBLE_EQ(*r[1], 0.5);
  EXPECT_DOUBLE_EQ(balanced_accuracy(y, p, 2), 0.75);
  EXPECT_DOUBLE_EQ(balanced_accuracy(y, y, 2), 1.0);
  EXPECT_DOUBLE_EQ(balanced_accuracy(y, {0, 0, 0, 0}, 2), 0.5);
  EXPECT_FALSE(per_class_accuracy(y, p, 3)[2].has_value());
  EXPECT_THROW(accuracy(y, {0}), LengthMismatch);
}

TEST(MetricsTest, BalancedAccuracyIgnoresDuplication) {
  const std::vector<int> y = {0, 0, 1, 1, 2}, p = {0, 1, 1, 1, 0};
  std::vector<int> y2 = y, p2 = p;
  for (int rep = 0; rep < 3; ++rep) {
    y2.push_back(2);
    p2.push_back(0);
  }
  EXPECT_DOUBLE_EQ(balanced_accuracy(y, p, 3), balanced_accuracy(y2, p2, 3));
}

TEST(MetricsTest, OddsGaps) {
  const std::vector<int> y = {1, 1, 0, 0}, a = {0, 1, 0, 1}, p = {1, 0, 0, 1};
  const auto g = equalized_odds_gap(y, p, a);
  EXPECT_DOUBLE_EQ(*g.tpr_gap, 1.0);
  EXPECT_DOUBLE_EQ(*g.fpr_gap, 1.0);
  EXPECT_DOUBLE_EQ(*equal_opportunity_gap(y, p, a), 1.0);
  const auto perfect = equalized_odds_gap(y, y, a);
  EXPECT_DOUBLE_EQ(*perfect.tpr_gap, 0.0);
  EXPECT_DOUBLE_EQ(*perfect.fpr_gap, 0.0);
  EXPECT_DOUBLE_EQ(*equal_opportunity_gap(y, y, a), 0.0);
  const std::vector<int> y3 = {1, 0, 0, 0};
  EXPECT_FALSE(equalized_odds_gap(y3, p, a).tpr_gap.has_value());
  EXPECT_TRUE(equalized_odds_gap(y3, p, a).fpr_gap.has_value());
  EXPECT_FALSE(equal_opportunity_gap(y3, p, a).has_value());
}

TEST(ReportTest, CsvRow) {
  EvalReport r;
  r.seed = 3;
  r.party = "p0";
  r.phase = "after";
  r.accuracy = 0.5;
  r.balanced_accuracy = 0.25;
  r.per_class = {1.0, std::nullopt};
  EXPECT_EQ(EvalReport::csv_header(2),
            "seed,party,phase,accuracy,balanced_accuracy,epsilon_spent,queries,per_class_0,per_class_1");
  const std::string row = r.csv_row();
  EXPECT_EQ(row.rfind("3,p0,after,0.5,0.25,", 0), 0u);
  EXPECT_EQ(row.substr(row.size() - 5), ",1,NA");
}

}  // namespace
}  // namespace cclab::eval
