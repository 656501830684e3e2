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

#include "cclab/framing.hpp"

#include <gtest/gtest.h>

#include "cclab/errors.hpp"
#include "cclab/rng.hpp"

namespace cclab::proto {
namespace {

TEST(FramingTest, GoldenEmptyQuery) {
  const ProtocolMessage m{};
  Bytes want = {0x00, 0x00, 0x00, 0x11};
  want.resize(4 + 16, 0);
  want.push_back(0x01);
  EXPECT_EQ(frame(m), want);
  EXPECT_EQ(unframe(want), m);
}

TEST(FramingTest, GoldenAbort) {
  SessionId sid{};
  for (std::size_t i = 0; i < sid.size(); ++i) sid[i] = static_cast<std::uint8_t>(0xa0 + i);
  const Bytes got = frame(make_abort(sid, StepTag::Gc2pc, "timeout"));
  const Bytes want = {0x00, 0x00, 0x00, 0x19, 0xa0, 0xa1, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7,
                      0xa8, 0xa9, 0xaa, 0xab, 0xac, 0xad, 0xae, 0xaf, 0x06, 0x03, 't',  'i',
                      'm',  'e',  'o',  'u',  't'};
  EXPECT_EQ(got, want);
  const auto [step, reason] = parse_abort(unframe(got));
  EXPECT_EQ(step, StepTag::Gc2pc);
  EXPECT_EQ(reason, "timeout");
}

TEST(FramingTest, RandomRoundTrips) {
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    ProtocolMessage m;
    rng.fill(m.session);
    m.tag = static_cast<StepTag>(1 + rng.uniform_below(6));
    m.payload.resize(rng.uniform_below(300));
    rng.fill(m.payload);
    ASSERT_EQ(unframe(frame(m)), m);
  }
}

TEST(FramingTest, TruncationAndTrailingBytes) {
  ProtocolMessage m;
  m.payload = {1, 2, 3};
  const Bytes wire = frame(m);
  for (std::size_t n = 0; n < wire.size(); ++n) {
    EXPECT_THROW(unframe(std::span(wire).first(n)), FrameError) << n;
  }
  Bytes longer = wire;
  longer.push_back(0);
  EXPECT_THROW(unframe(longer), FrameError);
}

TEST(FramingTest, UnknownTagAndShortLength) {
  Bytes wire = frame(ProtocolMessage{});
  wire[20] = 0x07;
  EXPECT_THROW(unframe(wire), FrameError);
  wire[20] = 0x00;
  EXPECT_THROW(unframe(wire), FrameError);
  Bytes bad = frame(ProtocolMessage{});
  bad[3] = 0x10;
  EXPECT_THROW(unframe(std::span(bad).first(bad.size() - 1)), FrameError);
}

TEST(FrameDecoderTest, ReassemblesByteByByte) {
  Rng rng(2);
  std::vector<ProtocolMessage> msgs(20);
  Bytes stream;
  for (auto& m : msgs) {
    m.tag = StepTag::ShareToPG;
    m.payload.resize(rng.uniform_below(50));
    rng.fill(m.payload);
    const Bytes f = frame(m);
    stream.insert(stream.end(), f.begin(), f.end());
  }
  FrameDecoder d;
  std::vector<ProtocolMessage> got;
  for (std::uint8_t b : stream) {
    d.feed(std::span(&b, 1));
    while (auto m = d.next()) got.push_back(*m);
  }
  EXPECT_EQ(got, msgs);
  EXPECT_EQ(d.buffered(), 0u);
}

TEST(FramingTest, StepNames) {
  EXPECT_EQ(step_name(StepTag::Query), "Query");
  EXPECT_TRUE(is_known_tag(0x05));
  EXPECT_FALSE(is_known_tag(0x00));
}

}  // namespace
}  // namespace cclab::proto
