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

#include "cclab/dpcore.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "cclab/errors.hpp"

namespace cclab::dp {
namespace {

struct Moments {
  double mean = 0;
  double std = 0;
};

Moments moments(const NoiseSpec& spec, std::size_t n) {
  Rng rng(99);
  double s = 0, s2 = 0;
  std::size_t count = 0;
  while (count < n) {
    for (auto v : sample_noise_vector(spec, 10, rng)) {
      s += static_cast<double>(v);
      s2 += static_cast<double>(v) * static_cast<double>(v);
      ++count;
    }
  }
  const double mean = s / static_cast<double>(count);
  return {mean, std::sqrt(s2 / static_cast<double>(count) - mean * mean)};
}

TEST(NoiseTest, TinySigmaIsZero) {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    for (auto v : sample_noise_vector(NoiseSpec::gaussian(1e-9), 5, rng)) EXPECT_EQ(v, 0);
  }
}

TEST(NoiseTest, GaussianMoments) {
  const auto m = moments(NoiseSpec::gaussian(40), 100000);
  EXPECT_NEAR(m.mean, 0.0, 0.5);
  EXPECT_NEAR(m.std, 40.0, 1.0);
}

TEST(NoiseTest, LaplaceMoments) {
  const auto m = moments(NoiseSpec::laplace(20), 100000);
  EXPECT_NEAR(m.std, 20.0 * std::sqrt(2.0), 0.05 * 20.0 * std::sqrt(2.0));
}

TEST(NoiseTest, ClampedToWidth) {
  Rng rng(2);
  for (auto v : sample_noise_vector(NoiseSpec::gaussian(1e6), 200, rng, 8)) {
    EXPECT_LE(v, 64);
    EXPECT_GE(v, -64);
  }
}

TEST(NoiseTest, SeedDeterminism) {
  Rng a(3), b(3);
  EXPECT_EQ(sample_noise_vector(NoiseSpec::gaussian(40), 10, a), sample_noise_vector(NoiseSpec::gaussian(40), 10, b));
}

TEST(NoiseTest, SpecValidation) {
  EXPECT_THROW(NoiseSpec::gaussian(0).validate(), ParamError);
  EXPECT_THROW(NoiseSpec::laplace(-1).validate(), ParamError);
  EXPECT_THROW(NoiseSpec::gaussian(1, 0.5).validate(), ParamError);
  EXPECT_NO_THROW(NoiseSpec::gaussian(40, 3).validate());
}

TEST(CostTest, ClosedForms) {
  EXPECT_EQ(gnmax_rdp_per_query(2, 40, 1), 0.00125);
  EXPECT_DOUBLE_EQ(gnmax_rdp_per_query(2, 40, 2), 0.005);
  EXPECT_DOUBLE_EQ(gnmax_rdp_per_query(20, 40, 1), 0.0125);
  EXPECT_DOUBLE_EQ(laplace_dp_per_query(20, 1), 0.1);
  EXPECT_DOUBLE_EQ(laplace_dp_per_query(2, 1), 1.0);
  EXPECT_DOUBLE_EQ(laplace_dp_per_query(20, 3), 0.3);
  EXPECT_DOUBLE_EQ(rdp_per_query(NoiseSpec::laplace(20), 2), 0.01);
  EXPECT_DOUBLE_EQ(rdp_per_query(NoiseSpec::laplace(2), 100), 1.0);
}

TEST(LedgerTest, ChargesAccumulate) {
  RdpLedger ledger({2, 20});
  for (int i = 0; i < 550; ++i) ledger = charge_query(ledger, NoiseSpec::gaussian(40));
  EXPECT_EQ(ledger.queries(), 550u);
  EXPECT_NEAR(ledger.rdp()[1], 6.875, 1e-12);
  const RdpLedger fresh;
  for (double e : fresh.rdp()) EXPECT_EQ(e, 0.0);
}

TEST(LedgerTest, ChargeIsLinear) {
  RdpLedger twice({2, 5}), doubled({2, 5});
  twice.charge(NoiseSpec::gaussian(40));
  twice.charge(NoiseSpec::gaussian(40));
  doubled.charge(NoiseSpec::gaussian(40 / std::sqrt(2.0)));
  EXPECT_NEAR(twice.rdp()[0], doubled.rdp()[0], 1e-15);
  EXPECT_NEAR(twice.rdp()[1], doubled.rdp()[1], 1e-15);
}

TEST(LedgerTest, ConversionClosedForm) {
  RdpLedger ledger({2});
  ledger.charge_rdp({1.0});
  EXPECT_NEAR(rdp_to_dp(ledger, 0.01), 1.0 + std::log(100.0), 1e-12);
  const RdpLedger empty;
  EXPECT_NEAR(rdp_to_dp(empty, 1e-5), std::log(1e5) / 255.0, 1e-12);
}

TEST(LedgerTest, DenseGridMatchesContinuousOptimum) {
  RdpLedger ledger;
  for (int i = 0; i < 550; ++i) ledger.charge(NoiseSpec::gaussian(40));
  const double q = 550, s2 = 1600, l = std::log(1e5);
  const double lambda = 1 + std::sqrt(l * s2 / q);
  const double want = q * lambda / s2 + l / (lambda - 1);
  EXPECT_NEAR(rdp_to_dp(ledger), want, 1e-6);
  EXPECT_NEAR(want, 4.33, 0.01);
}

TEST(LedgerTest, SnapshotListsOrders) {
  RdpLedger ledger({2, 3});
  ledger.charge(NoiseSpec::gaussian(10));
  const std::string s = ledger.snapshot();
  EXPECT_EQ(s.rfind("# rdp-ledger", 0), 0u);
  EXPECT_NE(s.find("\n2 0.02"), std::string::npos);
}

TEST(CompositionTest, HandEvaluation) {
  const auto c = strong_composition(0.1, 1e-6, 100, 1e-6);
  const double want = std::sqrt(200.0 * std::log(1e6)) * 0.1 + 100 * 0.1 * (std::exp(0.1) - 1);
  EXPECT_NEAR(c.epsilon, want, 1e-9);
  EXPECT_NEAR(c.epsilon, 6.308230950513409, 1e-9);
  EXPECT_NEAR(c.delta, 1.01e-4, 1e-15);
  EXPECT_EQ(strong_composition(0, 1e-6, 10, 1e-6).epsilon, 0.0);
  EXPECT_THROW(strong_composition(0.1, 1e-6, 1, 0), ParamError);
}

TEST(AdmissionTest, Extremes) {
  const RdpLedger ledger;
  EXPECT_EQ(admit_query(ledger, NoiseSpec::gaussian(40), 1e-5, 1e9), Admission::Admit);
  EXPECT_EQ(admit_query(ledger, NoiseSpec::gaussian(40), 1e-5, 0), Admission::Refuse);
}

TEST(AdmissionTest, StopsWhereBudgetWouldBeExceeded) {
  RdpLedger ledger;
  const auto spec = NoiseSpec::gaussian(40);
  while (admit_query(ledger, spec) == Admission::Admit) ledger.charge(spec);
  EXPECT_EQ(ledger.queries(), 128u);
  EXPECT_LE(rdp_to_dp(ledger), 2.0);
  EXPECT_GT(rdp_to_dp(charge_query(ledger, spec)), 2.0);
}

}  // namespace
}  // namespace cclab::dp
