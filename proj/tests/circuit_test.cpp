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

#include "cclab/circuit.hpp"

#include <gtest/gtest.h>

#include "cclab/builders.hpp"
#include "cclab/errors.hpp"
#include "cclab/ring.hpp"
#include "cclab/rng.hpp"

namespace cclab::gc {
namespace {

std::uint64_t wrap(std::int64_t v, unsigned w) {
  return static_cast<std::uint64_t>(v) & (w == 64 ? ~0ULL : ((1ULL << w) - 1));
}

std::vector<std::uint64_t> onehot(const std::vector<std::uint64_t>& shares_g,
                                  const std::vector<std::uint64_t>& shares_e,
                                  const std::vector<std::uint64_t>& out_mask, unsigned w) {
  const unsigned k = static_cast<unsigned>(shares_g.size());
  const auto c = build_onehot_argmax_circuit(k, w);
  Bits g = to_bits(shares_g, w);
  const Bits m = to_bits(out_mask, w);
  g.insert(g.end(), m.begin(), m.end());
  return from_bits(ideal_eval(c, g, to_bits(shares_e, w)), w);
}

std::uint64_t noisy_index(const std::vector<std::uint64_t>& s_hat, const std::vector<std::uint64_t>& s,
                          unsigned w) {
  const unsigned k = static_cast<unsigned>(s.size());
  const auto c = build_noisy_sum_argmax_circuit(k, w);
  return from_bits(ideal_eval(c, to_bits(s_hat, w), to_bits(s, w)), index_width(k))[0];
}

TEST(GateTest, Primitives) {
  CircuitBuilder b;
  const auto a = b.garbler_input(1);
  const auto e = b.evaluator_input(1);
  b.output({b.and_gate(a[0], e[0])}, Disclosure::Both);
  b.output({b.xor_gate(a[0], e[0])}, Disclosure::Both);
  b.output({b.not_gate(a[0])}, Disclosure::Both);
  const auto c = std::move(b).build();
  EXPECT_EQ(ideal_eval(c, {true}, {true}), (Bits{true, false, false}));
  EXPECT_EQ(ideal_eval(c, {false}, {true}), (Bits{false, true, true}));
}

TEST(AdderTest, WrapsModulo) {
  const auto c = build_adder_circuit(4);
  EXPECT_EQ(from_bits(ideal_eval(c, to_bits(std::vector<std::uint64_t>{5}, 4),
                                 to_bits(std::vector<std::uint64_t>{9}, 4)),
                      4)[0],
            14u);
  for (std::uint64_t a = 0; a < 16; ++a) {
    for (std::uint64_t e = 0; e < 16; ++e) {
      EXPECT_EQ(from_bits(ideal_eval(c, to_bits(std::vector<std::uint64_t>{a}, 4),
                                     to_bits(std::vector<std::uint64_t>{e}, 4)),
                          4)[0],
                (a + e) % 16);
    }
  }
}

TEST(OnehotTest, TieGoesToLowestIndex) {
  EXPECT_EQ(onehot({3, 7, 7, 1}, {0, 0, 0, 0}, {0, 0, 0, 0}, 32), (std::vector<std::uint64_t>{0, 1, 0, 0}));
  EXPECT_EQ(onehot({0, 0, 0}, {0, 0, 0}, {0, 0, 0}, 32), (std::vector<std::uint64_t>{1, 0, 0}));
}

TEST(OnehotTest, SignedComparison) {
  const ring::FixedPointParams fp{};
  const std::uint64_t neg = ring::encode_fixed(-1.0, fp).raw(), pos = ring::encode_fixed(1.0, fp).raw();
  EXPECT_EQ(onehot({neg, pos}, {0, 0}, {0, 0}, 32), (std::vector<std::uint64_t>{0, 1}));
  EXPECT_EQ(onehot({pos, neg}, {0, 0}, {0, 0}, 32), (std::vector<std::uint64_t>{1, 0}));
}

TEST(OnehotTest, SharesAndOutputMaskCompose) {
  const unsigned w = 32;
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const unsigned k = 2 + static_cast<unsigned>(rng.uniform_below(6));
    std::vector<std::int64_t> logits(k);
    std::vector<std::uint64_t> g(k), e(k), mask(k);
    std::size_t best = 0;
    for (unsigned j = 0; j < k; ++j) {
      logits[j] = static_cast<std::int64_t>(rng.uniform_below(20)) - 10;
      if (logits[j] > logits[best]) best = j;
      g[j] = rng.uniform_bits(w);
      e[j] = wrap(logits[j] - static_cast<std::int64_t>(g[j]), w);
      mask[j] = rng.uniform_bits(w);
    }
    const auto out = onehot(g, e, mask, w);
    for (unsigned j = 0; j < k; ++j) EXPECT_EQ((out[j] + mask[j]) % (1ULL << w), j == best ? 1u : 0u);
  }
}

TEST(NoisySumTest, Examples) {
  EXPECT_EQ(noisy_index({0, 0, 0}, {1, 0, 2}, 32), 2u);
  EXPECT_EQ(noisy_index({0, 0}, {wrap(-3, 32), 1}, 32), 1u);
  EXPECT_EQ(noisy_index({wrap(-5, 32), 0}, {2, 1}, 32), 1u);
  EXPECT_EQ(noisy_index({4, 4, 4, 4, 4}, {0, 0, 0, 0, 0}, 32), 0u);
}

TEST(NoisySumTest, ExhaustiveSmall) {
  const unsigned w = 4;
  for (std::uint64_t a0 = 0; a0 < 16; ++a0)
    for (std::uint64_t a1 = 0; a1 < 16; ++a1)
      for (std::uint64_t b0 = 0; b0 < 16; ++b0)
        for (std::uint64_t b1 = 0; b1 < 16; ++b1) {
          const auto sv = [](std::uint64_t v) { return static_cast<std::int64_t>(v >= 8 ? v - 16 : v); };
          const std::int64_t x0 = sv((a0 + b0) % 16), x1 = sv((a1 + b1) % 16);
          ASSERT_EQ(noisy_index({a0, a1}, {b0, b1}, w), x1 > x0 ? 1u : 0u);
        }
}

TEST(CircuitTest, ValidateRejectsMalformed) {
  BooleanCircuit c;
  c.wire_count = 3;
  c.gates.push_back({GateKind::And, 0, 5, 2});
  EXPECT_THROW(c.validate(), ParamError);
  BooleanCircuit d;
  d.wire_count = 3;
  d.garbler_inputs = {2};
  d.gates.push_back({GateKind::Xor, 0, 1, 2});
  EXPECT_THROW(d.validate(), ParamError);
  EXPECT_THROW(build_onehot_argmax_circuit(1, 32), ParamError);
  EXPECT_THROW(build_onehot_argmax_circuit(3, 2), ParamError);
}

TEST(CircuitTest, HashIsStructural) {
  EXPECT_EQ(build_onehot_argmax_circuit(3, 16).hash(), build_onehot_argmax_circuit(3, 16).hash());
  EXPECT_NE(build_onehot_argmax_circuit(3, 16).hash(), build_onehot_argmax_circuit(4, 16).hash());
  EXPECT_NE(build_noisy_sum_argmax_circuit(3, 16).hash(), build_onehot_argmax_circuit(3, 16).hash());
}

TEST(BitsTest, LittleEndianPacking) {
  const Bits b = to_bits(std::vector<std::uint64_t>{1, 2}, 4);
  EXPECT_EQ(b, (Bits{true, false, false, false, false, true, false, false}));
  EXPECT_EQ(from_bits(b, 4), (std::vector<std::uint64_t>{1, 2}));
  EXPECT_EQ(index_width(2), 1u);
  EXPECT_EQ(index_width(5), 3u);
  EXPECT_EQ(index_width(8), 3u);
}

}  // namespace
}  // namespace cclab::gc
