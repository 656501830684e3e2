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

#include "cclab/ahe.hpp"

#include <gtest/gtest.h>

#include "cclab/errors.hpp"

namespace cclab::ahe {
namespace {

class AheTest : public ::testing::TestWithParam<Backend> {
 protected:
  void SetUp() override { keys_ = keygen(GetParam(), KeySize::Test, rng_); }
  const PublicKey& pk() const { return keys_.pk; }
  mpz_class round_trip(const mpz_class& m) { return dec(keys_.sk, enc(pk(), m, rng_)); }

  Rng rng_{11};
  KeyPair keys_;
};

TEST_P(AheTest, RoundTripsBoundaries) {
  EXPECT_EQ(round_trip(5), 5);
  EXPECT_EQ(round_trip(0), 0);
  EXPECT_EQ(round_trip(pk().n() - 1), pk().n() - 1);
  EXPECT_THROW(enc(pk(), pk().n(), rng_), RangeError);
  EXPECT_THROW(enc(pk(), -1, rng_), RangeError);
}

TEST_P(AheTest, RandomRoundTrips) {
  for (int i = 0; i < 1000; ++i) {
    const mpz_class m = uniform_mpz_below(pk().n(), rng_);
    ASSERT_EQ(round_trip(m), m);
  }
}

TEST_P(AheTest, HomomorphicIdentities) {
  const auto c = [&](long v) { return enc(pk(), mpz_class(v), rng_); };
  EXPECT_EQ(dec(keys_.sk, add_ct(pk(), c(2), c(3))), 5);
  EXPECT_EQ(dec(keys_.sk, scalar_mul(pk(), c(4), 3)), 12);
  EXPECT_EQ(dec(keys_.sk, sub_ct(pk(), c(10), c(4))), 6);
  EXPECT_EQ(dec(keys_.sk, sub_ct(pk(), c(0), c(1))), pk().n() - 1);
  EXPECT_EQ(dec(keys_.sk, scalar_mul(pk(), c(4), -1)), pk().n() - 4);
}

TEST_P(AheTest, ForeignCiphertextIsRejected) {
  Rng other_rng(12);
  const KeyPair other = keygen(GetParam(), KeySize::Test, other_rng);
  const Ciphertext a = enc(pk(), 1, rng_);
  const Ciphertext b = enc(other.pk, 1, rng_);
  EXPECT_THROW(add_ct(pk(), a, b), KeyMismatch);
  EXPECT_THROW(scalar_mul(pk(), b, 2), KeyMismatch);
}


TEST_P(AheTest, CiphertextSerializationRoundTrips) {
  std::vector<Ciphertext> cts;
  for (int i = 0; i < 5; ++i) cts.push_back(enc(pk(), mpz_class(i), rng_));
  const auto back = deserialize_ciphertexts(serialize_ciphertexts(cts), pk());
  ASSERT_EQ(back.size(), cts.size());
  for (std::size_t i = 0; i < cts.size(); ++i) EXPECT_EQ(dec(keys_.sk, back[i]), mpz_class(static_cast<long>(i)));
  EXPECT_EQ(PublicKey::deserialize(pk().serialize()), pk());
}

TEST_P(AheTest, IdentityWeightsInference) {
  const ring::FixedPointParams fp{};
  const long s = 1L << fp.frac_bits;
  const IntMatrix w{2, 2, {s, 0, 0, s}};
  const std::vector<std::int64_t> bias{0, 0};
  const std::vector<Ciphertext> x = {enc(pk(), mpz_class(5 * s), rng_), enc(pk(), mpz_class(7 * s), rng_)};
  const auto logits = encrypted_linear_infer(pk(), x, w, bias, fp);
  ASSERT_EQ(logits.size(), 2u);
  EXPECT_EQ(dec(keys_.sk, logits[0]), mpz_class(5) << 32);
  EXPECT_EQ(dec(keys_.sk, logits[1]), mpz_class(7) << 32);
}

TEST_P(AheTest, ZeroWeightsGiveBias) {
  const ring::FixedPointParams fp{};
  const IntMatrix w{1, 3, {0, 0, 0}};
  const std::vector<std::int64_t> bias{-12345};
  std::vector<Ciphertext> x;
  for (int j = 0; j < 3; ++j) x.push_back(enc(pk(), to_residue(mpz_class(-j * 99), pk().n()), rng_));
  const auto logits = encrypted_linear_infer(pk(), x, w, bias, fp);
  EXPECT_EQ(lift_centered(dec(keys_.sk, logits[0]), pk().n()), -12345);
}

TEST_P(AheTest, InferenceMatchesPlaintextLinearAlgebra) {
  const ring::FixedPointParams fp{};
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t rows = 1 + rng_.uniform_below(5), cols = 1 + rng_.uniform_below(8);
    IntMatrix w{rows, cols, {}};
    std::vector<std::int64_t> bias(rows), xs(cols);
    for (std::size_t i = 0; i < rows * cols; ++i) w.data.push_back(static_cast<std::int64_t>(rng_.uniform_bits(20)) - (1 << 19));
    for (auto& b : bias) b = static_cast<std::int64_t>(rng_.uniform_bits(36)) - (std::int64_t{1} << 35);
    std::vector<Ciphertext> x;
    for (auto& v : xs) {
      v = static_cast<std::int64_t>(rng_.uniform_bits(24)) - (1 << 23);
      x.push_back(enc(pk(), to_residue(mpz_class(static_cast<long>(v)), pk().n()), rng_));
    }
    const auto logits = encrypted_linear_infer(pk(), x, w, bias, fp);
    for (std::size_t r = 0; r < rows; ++r) {
      mpz_class expect = static_cast<long>(bias[r]);
      for (std::size_t c = 0; c < cols; ++c) expect += mpz_class(static_cast<long>(w.at(r, c))) * static_cast<long>(xs[c]);
      EXPECT_EQ(lift_centered(dec(keys_.sk, logits[r]), pk().n()), expect);
    }
  }
}

TEST_P(AheTest, InferenceRejectsWrongDimension) {
  const IntMatrix w{1, 2, {1, 1}};
  const std::vector<std::int64_t> bias{0};
  const std::vector<Ciphertext> x = {enc(pk(), 1, rng_)};
  EXPECT_THROW(encrypted_linear_infer(pk(), x, w, bias, {}), DimensionMismatch);
}

TEST_P(AheTest, DegenerateMaskDomain) {
  const std::vector<Ciphertext> logits = {enc(pk(), 0, rng_)};
  for (int i = 0; i < 50; ++i) {
    const auto m = mask_logits(pk(), logits, 1, 0, rng_);
    const mpz_class v = lift_centered(dec(keys_.sk, m.enc_masked[0]), pk().n());
    EXPECT_GT(v, -2);
    EXPECT_LE(v, 0);
    EXPECT_EQ(v, -m.mask[0]);
  }
}

TEST_P(AheTest, MaskedSharesReconstructFloorOfLogit) {
  const ring::FixedPointParams fp{};
  for (long logit : {0L, 1L, -1L, 5L << 16, -(3L << 16) + 7, (100L << 32) + 12345}) {
    const std::vector<Ciphertext> in = {enc(pk(), to_residue(logit, pk().n()), rng_)};
    const auto m = mask_logits(pk(), in, mpz_class(1) << 40, 40, rng_, mpz_class(1) << fp.frac_bits);
    const auto qp = masked_to_ring_share(dec(keys_.sk, m.enc_masked[0]), pk().n(), fp.frac_bits, fp);
    const auto ap = mask_to_ring_share(m.mask[0], fp.frac_bits, fp);
    mpz_class fl;
    mpz_fdiv_q_2exp(fl.get_mpz_t(), mpz_class(logit).get_mpz_t(), fp.frac_bits);
    EXPECT_EQ((qp + ap).to_signed(), static_cast<std::int64_t>(static_cast<std::int32_t>(fl.get_si())));
  }
}

TEST_P(AheTest, MaskRejectsSmallModulus) {
  const std::vector<Ciphertext> in = {enc(pk(), 0, rng_)};
  EXPECT_THROW(mask_logits(pk(), in, mpz_class(1) << 500, 40, rng_), OverflowBudgetExceeded);
}

INSTANTIATE_TEST_SUITE_P(Backends, AheTest, ::testing::Values(Backend::Ideal, Backend::Paillier),
                         [](const auto& info) { return info.param == Backend::Ideal ? "Ideal" : "Paillier"; });

TEST(PaillierTest, EncryptionIsRandomized) {
  Rng rng(13);
  const KeyPair keys = keygen(Backend::Paillier, KeySize::Test, rng);
  EXPECT_FALSE(enc(keys.pk, 7, rng) == enc(keys.pk, 7, rng));
}

TEST(ResidueTest, CentredLift) {
  const mpz_class n = 101;
  EXPECT_EQ(to_residue(-1, n), 100);
  EXPECT_EQ(lift_centered(100, n), -1);
  EXPECT_EQ(lift_centered(50, n), 50);
  EXPECT_EQ(lift_centered(51, n), -50);
}

}  // namespace
}  // namespace cclab::ahe
