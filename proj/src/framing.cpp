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

#include <algorithm>
#include <string>

#include "cclab/errors.hpp"

namespace cclab::proto {

std::string_view step_name(StepTag tag) {
  switch (tag) {
    case StepTag::Query: return "Query";
    case StepTag::MaskedLogits: return "MaskedLogits";
    case StepTag::Gc2pc: return "Gc2pc";
    case StepTag::ShareToPG: return "ShareToPG";
    case StepTag::FinalGc2pc: return "FinalGc2pc";
    case StepTag::Abort: return "Abort";
  }
  return "Unknown";
}

bool is_known_tag(std::uint8_t tag) { return tag >= 0x01 && tag <= 0x06; }

Bytes frame(const ProtocolMessage& msg) {
  if (msg.payload.size() > kMaxPayload) throw FrameError("payload exceeds 2^31 bytes");
  ByteWriter w;
  w.u32_be(static_cast<std::uint32_t>(17 + msg.payload.size()));
  w.raw(msg.session);
  w.u8(static_cast<std::uint8_t>(msg.tag));
  w.raw(msg.payload);
  return std::move(w).take();
}

namespace {

ProtocolMessage decode_body(std::span<const std::uint8_t> body) {
  ByteReader r(body);
  ProtocolMessage m;
  auto sid = r.raw(16);
  std::copy(sid.begin(), sid.end(), m.session.begin());
  const std::uint8_t tag = r.u8();
  if (!is_known_tag(tag)) throw FrameError("unknown step tag " + std::to_string(tag));
  m.tag = static_cast<StepTag>(tag);
  auto rest = r.raw(r.remaining());
  m.payload.assign(rest.begin(), rest.end());
  return m;
}

}  // namespace

ProtocolMessage unframe(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const std::uint32_t len = r.u32_be();
  if (len < 17) throw FrameError("frame length " + std::to_string(len) + " below header size");
  auto body = r.raw(len);
  r.expect_done();
  return decode_body(body);
}

void FrameDecoder::feed(std::span<const std::uint8_t> data) {
  buf_.insert(buf_.end(), data.begin(), data.end());
}

std::optional<ProtocolMessage> FrameDecoder::next() {
  if (buf_.size() < 4) return std::nullopt;
  const std::uint32_t len = (std::uint32_t{buf_[0]} << 24) | (std::uint32_t{buf_[1]} << 16) |
                            (std::uint32_t{buf_[2]} << 8) | std::uint32_t{buf_[3]};
  if (len < 17) throw FrameError("frame length " + std::to_string(len) + " below header size");
  if (buf_.size() < 4 + std::size_t{len}) return std::nullopt;
  ProtocolMessage m = decode_body(std::span(buf_).subspan(4, len));
  buf_.erase(buf_.begin(), buf_.begin() + 4 + len);
  return m;
}

ProtocolMessage make_abort(const SessionId& session, StepTag failed_step, std::string_view reason) {
  ProtocolMessage m;
  m.session = session;
  m.tag = StepTag::Abort;
  m.payload.push_back(static_cast<std::uint8_t>(failed_step));
  m.payload.insert(m.payload.end(), reason.begin(), reason.end());
  return m;
}

std::pair<StepTag, std::string> parse_abort(const ProtocolMessage& msg) {
  if (msg.tag != StepTag::Abort || msg.payload.empty()) throw FrameError("not an abort message");
  const std::uint8_t step = msg.payload[0];
  const StepTag tag = is_known_tag(step) ? static_cast<StepTag>(step) : StepTag::Abort;
  return {tag, std::string(msg.payload.begin() + 1, msg.payload.end())};
}

}  // namespace cclab::proto
