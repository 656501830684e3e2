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

#include <cstdint>

#include "cclab/transport.hpp"

namespace cclab::proto {

// Sub-message kinds carried as the first payload byte of Gc2pc and
// FinalGc2pc frames.
enum class TwoPcKind : std::uint8_t {
  CircuitHash = 0x10,
  GarbledTables = 0x11,
  GarblerLabels = 0x12,
  IdealGarblerInputs = 0x13,
  OtSenderSetup = 0x20,
  OtReceiverKeys = 0x21,
  OtCiphertexts = 0x22,
  OtLoopbackPairs = 0x23,
  OutputDisclosure = 0x30,
};

// An endpoint pinned to one session and one step tag. expect() turns an
// inbound Abort into ProtocolAbort and any session or ordering surprise into
// SessionMismatch / ProtocolAbort.
class StepChannel {
 public:
  StepChannel(Endpoint& ep, SessionId session, StepTag tag, Millis timeout = kDefaultStepTimeout)
      : ep_(ep), session_(session), tag_(tag), timeout_(timeout) {}

  void send(Bytes payload);
  void send(TwoPcKind kind, std::span<const std::uint8_t> body);
  Bytes receive_payload();
  Bytes expect(TwoPcKind kind);
  void abort(std::string_view reason);

  const SessionId& session() const { return session_; }
  StepTag tag() const { return tag_; }
  Endpoint& endpoint() { return ep_; }

 private:
  Endpoint& ep_;
  SessionId session_;
  StepTag tag_;
  Millis timeout_;
};

// Receive one message on `ep` for `session` carrying `tag`.
ProtocolMessage expect_message(Endpoint& ep, const SessionId& session, StepTag tag, Millis timeout);

}  // namespace cclab::proto
