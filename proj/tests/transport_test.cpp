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

#include "cclab/transport.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "cclab/errors.hpp"
#include "cclab/rng.hpp"
#include "cclab/step_channel.hpp"

namespace cclab::proto {
namespace {

class TransportTest : public ::testing::TestWithParam<std::string> {};

TEST_P(TransportTest, DeliversInOrder) {
  auto t = make_transport(GetParam());
  auto link = t->connect();
  Rng rng(1);
  std::vector<ProtocolMessage> sent(50);
  for (auto& m : sent) {
    rng.fill(m.session);
    m.tag = StepTag::Gc2pc;
    m.payload.resize(rng.uniform_below(40000));
    rng.fill(m.payload);
  }
  std::thread writer([&] {
    for (const auto& m : sent) link.first->send(m);
  });
  for (const auto& m : sent) ASSERT_EQ(link.second->receive(Millis(5000)), m);
  writer.join();
  link.second->send(sent[0]);
  EXPECT_EQ(link.first->receive(Millis(5000)), sent[0]);
}

TEST_P(TransportTest, TimeoutAborts) {
  auto link = make_transport(GetParam())->connect();
  try {
    link.first->receive(Millis(20));
    FAIL() << "expected timeout";
  } catch (const ProtocolAbort& e) {
    EXPECT_EQ(e.reason(), "timeout");
  }
}

TEST_P(TransportTest, ClosedPeerIsTransportError) {
  auto link = make_transport(GetParam())->connect();
  link.first->close();
  EXPECT_THROW(link.second->receive(Millis(2000)), TransportError);
  EXPECT_THROW(link.first->send(ProtocolMessage{}), TransportError);
}

INSTANTIATE_TEST_SUITE_P(Kinds, TransportTest, ::testing::Values("inproc", "tcp"));

TEST(TransportFactoryTest, UnknownName) { EXPECT_THROW(make_transport("udp"), ConfigError); }

TEST(ExpectMessageTest, Classifies) {
  auto link = InProcTransport().connect();
  const SessionId sid = {1};
  const SessionId other = {2};
  link.first->send({other, StepTag::Query, {}});
  EXPECT_THROW(expect_message(*link.second, sid, StepTag::Query, Millis(100)), SessionMismatch);
  link.first->send({sid, StepTag::MaskedLogits, {}});
  try {
    expect_message(*link.second, sid, StepTag::Query, Millis(100));
    FAIL();
  } catch (const ProtocolAbort& e) {
    EXPECT_EQ(e.reason(), "unexpected step");
  }
  link.first->send(make_abort(sid, StepTag::Gc2pc, "2pc"));
  try {
    expect_message(*link.second, sid, StepTag::Query, Millis(100));
    FAIL();
  } catch (const ProtocolAbort& e) {
    EXPECT_EQ(e.reason(), "2pc");
  }
}

TEST(StepChannelTest, SubKindsAreChecked) {
  auto link = InProcTransport().connect();
  const SessionId sid = {3};
  StepChannel a(*link.first, sid, StepTag::Gc2pc), b(*link.second, sid, StepTag::Gc2pc);
  const Bytes body = {7, 8};
  a.send(TwoPcKind::GarbledTables, body);
  EXPECT_EQ(b.expect(TwoPcKind::GarbledTables), body);
  a.send(TwoPcKind::GarbledTables, body);
  EXPECT_THROW(b.expect(TwoPcKind::CircuitHash), ProtocolAbort);
}

TEST(RecordingEndpointTest, LogsBothDirections) {
  auto link = InProcTransport().connect();
  SessionTranscript log;
  RecordingEndpoint rec(std::move(link.first), &log, "peer");
  rec.send({SessionId{}, StepTag::Query, {1}});
  link.second->send({SessionId{}, StepTag::MaskedLogits, {2}});
  rec.receive(Millis(1000));
  ASSERT_EQ(log.entries.size(), 2u);
  EXPECT_EQ(log.outbound().size(), 1u);
  EXPECT_EQ(log.inbound().front()->message.tag, StepTag::MaskedLogits);
  EXPECT_EQ(log.entries[0].peer, "peer");
}

}  // namespace
}  // namespace cclab::proto
