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

// Wire layout of every protocol message (WIRE.md has the full table):
//
//   u32 big-endian length L | 16-byte session id | 1-byte step tag | payload
//
// L counts everything after the length field, so L = 17 + payload size.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "cclab/bytes.hpp"

namespace cclab::proto {

using SessionId = std::array<std::uint8_t, 16>;

enum class StepTag : std::uint8_t {
  Query = 0x01,
  MaskedLogits = 0x02,
  Gc2pc = 0x03,
  ShareToPG = 0x04,
  FinalGc2pc = 0x05,
  Abort = 0x06,
};

std::string_view step_name(StepTag tag);
bool is_known_tag(std::uint8_t tag);

struct ProtocolMessage {
  SessionId session{};
  StepTag tag = StepTag::Query;
  Bytes payload;

  friend bool operator==(const ProtocolMessage&, const ProtocolMessage&) = default;
};

inline constexpr std::size_t kHeaderBytes = 4 + 16 + 1;
inline constexpr std::size_t kMaxPayload = std::size_t{1} << 31;

Bytes frame(const ProtocolMessage& msg);
// Exactly one frame; FrameError on truncation, trailing bytes or an unknown
// tag.
ProtocolMessage unframe(std::span<const std::uint8_t> bytes);

// Incremental decoder for byte streams.
class FrameDecoder {
 public:
  void feed(std::span<const std::uint8_t> data);
  // Next complete message, if one is buffered.
  std::optional<ProtocolMessage> next();
  std::size_t buffered() const { return buf_.size(); }

 private:
  Bytes buf_;
};

ProtocolMessage make_abort(const SessionId& session, StepTag failed_step, std::string_view reason);
// (failed step, reason) from an Abort payload.
std::pair<StepTag, std::string> parse_abort(const ProtocolMessage& msg);

}  // namespace cclab::proto
