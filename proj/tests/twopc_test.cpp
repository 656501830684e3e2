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

#include "cclab/twopc.hpp"

#include <gtest/gtest.h>

#include <future>

#include "cclab/builders.hpp"
#include "cclab/errors.hpp"

namespace cclab::gc {
namespace {

const proto::SessionId kSid = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16};

struct Link {
  proto::EndpointPair eps = proto::InProcTransport().connect();
  proto::StepChannel a{*eps.first, kSid, proto::StepTag::Gc2pc, proto::Millis(10'000)};
  proto::StepChannel b{*eps.second, kSid, proto::StepTag::Gc2pc, proto::Millis(10'000)};
};

struct Run {
  Bits garbler;
  Bits evaluator;
};

Run run_both(const BooleanCircuit& gc, const BooleanCircuit& ec, const Bits& g, const Bits& e,
             TwoPcOptions opt, std::uint64_t seed) {
  Link link;
  auto garbler = std::async(std::launch::async, [&] {
    Rng rng = Rng::derive(seed, "garbler");
    return run_2pc(Role::Garbler, gc, g, link.a, rng, opt);
  });
  Rng rng = Rng::derive(seed, "evaluator");
  Run r;
  try {
    r.evaluator = run_2pc(Role::Evaluator, ec, e, link.b, rng, opt);
  } catch (...) {
    link.eps.second->close();
    try {
      garbler.get();
    } catch (...) {
    }
    throw;
  }
  r.garbler = garbler.get();
  return r;
}

Bits random_bits(std::size_t n, Rng& rng) {
  Bits b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = rng.uniform_bits(1) != 0;
  return b;
}

TEST(OtTest, ChosenMessage) {
  for (auto backend : {OtBackend::DiffieHellman, OtBackend::InsecureLoopback}) {
    Link link;
    const std::vector<OtMessagePair> pairs = {{{10}, {20}}, {{10}, {20}}};
    auto sender = std::async(std::launch::async, [&] {
      Rng rng(1);
      ot_send(pairs, link.a, backend, rng);
    });
    Rng rng(2);
    const auto got = ot_receive({true, false}, 1, link.b, backend, rng);
    sender.get();
    EXPECT_EQ(got[0], Bytes{20});
    EXPECT_EQ(got[1], Bytes{10});
  }
}

TEST(OtTest, ManyRandomTransfers) {
  Link link;
  Rng rng(3);
  std::vector<OtMessagePair> pairs(64);
  for (auto& p : pairs) {
    p.m0.resize(16);
    p.m1.resize(16);
    rng.fill(p.m0);
    rng.fill(p.m1);
  }
  const Bits choices = random_bits(pairs.size(), rng);
  auto sender = std::async(std::launch::async, [&] {
    Rng r(4);
    ot_send(pairs, link.a, OtBackend::DiffieHellman, r);
  });
  Rng r(5);
  const auto got = ot_receive(choices, 16, link.b, OtBackend::DiffieHellman, r);
  sender.get();
  for (std::size_t i = 0; i < pairs.size(); ++i) EXPECT_EQ(got[i], choices[i] ? pairs[i].m1 : pairs[i].m0);
}

TEST(OtTest, UnequalLengthsRejected) {
  Link link;
  const std::vector<OtMessagePair> pairs = {{{1, 2}, {3}}};
  Rng rng(6);
  EXPECT_THROW(ot_send(pairs, link.a, OtBackend::DiffieHellman, rng), LengthMismatch);
}

TEST(OtTest, MalformedPointAborts) {
  Link link;
  ByteWriter w;
  w.blob(Bytes(32, 0xff));
  link.a.send(proto::TwoPcKind::OtSenderSetup, w.bytes());
  Rng rng(7);
  try {
    ot_receive({true}, 4, link.b, OtBackend::DiffieHellman, rng);
    FAIL() << "expected abort";
  } catch (const ProtocolAbort& e) {
    EXPECT_EQ(e.reason(), "malformed group element");
  }
}

TEST(TwoPcTest, AdderRevealsToBoth) {
  const auto c = build_adder_circuit(8);
  for (auto backend : {TwoPcBackend::Garbled, TwoPcBackend::Ideal}) {
    const auto r = run_both(c, c, to_bits(std::vector<std::uint64_t>{200}, 8),
                            to_bits(std::vector<std::uint64_t>{100}, 8), {backend, OtBackend::DiffieHellman, true}, 1);
    EXPECT_EQ(from_bits(r.evaluator, 8)[0], 44u);
    EXPECT_EQ(from_bits(r.garbler, 8)[0], 44u);
  }
}

TEST(TwoPcTest, OnehotMatchesIdealOverSeeds) {
  const unsigned k = 4, w = 16;
  const auto c = build_onehot_argmax_circuit(k, w);
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Bits g = random_bits(c.garbler_inputs.size(), rng);
    const Bits e = random_bits(c.evaluator_inputs.size(), rng);
    const auto r = run_both(c, c, g, e, {}, 100 + trial);
    EXPECT_EQ(r.evaluator, ideal_eval(c, g, e));
    EXPECT_TRUE(r.garbler.empty());
  }
}

TEST(TwoPcTest, ExhaustiveNoisySumTinyWidth) {
  const auto c = build_noisy_sum_argmax_circuit(2, 4);
  Link link;
  for (std::uint64_t gv = 0; gv < 256; gv += 3) {
    for (std::uint64_t ev = 0; ev < 256; ev += 5) {
      const Bits g = to_bits(std::vector<std::uint64_t>{gv & 15, gv >> 4}, 4);
      const Bits e = to_bits(std::vector<std::uint64_t>{ev & 15, ev >> 4}, 4);
      auto garbler = std::async(std::launch::async, [&] {
        Rng r(gv * 1000 + ev);
        return run_2pc(Role::Garbler, c, g, link.a, r, {});
      });
      Rng r(ev * 1000 + gv + 7);
      ASSERT_EQ(run_2pc(Role::Evaluator, c, e, link.b, r, {}), ideal_eval(c, g, e));
      garbler.get();
    }
  }
}

TEST(TwoPcTest, CircuitMismatchIsSessionMismatch) {
  const auto gc = build_onehot_argmax_circuit(3, 8);
  const auto ec = build_onehot_argmax_circuit(4, 8);
  Rng rng(9);
  EXPECT_THROW(run_both(gc, ec, random_bits(gc.garbler_inputs.size(), rng),
                        random_bits(ec.evaluator_inputs.size(), rng), {}, 2),
               SessionMismatch);
}

TEST(TwoPcTest, BackendMismatchIsSessionMismatch) {
  const auto c = build_adder_circuit(4);
  Link link;
  auto garbler = std::async(std::launch::async, [&] {
    Rng r(1);
    try {
      run_2pc(Role::Garbler, c, Bits(4), link.a, r, {TwoPcBackend::Ideal});
    } catch (const Error&) {
    }
  });
  Rng r(2);
  EXPECT_THROW(run_2pc(Role::Evaluator, c, Bits(4), link.b, r, {TwoPcBackend::Garbled}), SessionMismatch);
  link.eps.second->close();
  garbler.get();
}

TEST(TwoPcTest, WrongInputSizeRejected) {
  const auto c = build_adder_circuit(4);
  Link link;
  Rng r(3);
  EXPECT_THROW(run_2pc(Role::Garbler, c, Bits(3), link.a, r), LengthMismatch);
}

}  // namespace
}  // namespace cclab::gc
