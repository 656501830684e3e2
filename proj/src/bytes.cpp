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
#include "cclab/bytes.hpp"

#include <sodium.h>

#include "cclab/errors.hpp"
#include "cclab/rng.hpp"

namespace cclab {

Digest sha256(std::span<const std::uint8_t> data) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.data(), data.data(), data.size());
  return d;
}

std::string to_hex(std::span<const std::uint8_t> data) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string s;
  s.reserve(data.size() * 2);
  for (auto b : data) {
    s.push_back(kDigits[b >> 4]);
    s.push_back(kDigits[b & 0xf]);
  }
  return s;
}

void ByteWriter::u32_be(std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out_.push_back(static_cast<std::uint8_t>(v >> shift));
}

void ByteWriter::u64_le(std::uint64_t v) { uint_le(v, 8); }

void ByteWriter::uint_le(std::uint64_t v, std::size_t width) {
  for (std::size_t i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::raw(std::span<const std::uint8_t> data) {
  out_.insert(out_.end(), data.begin(), data.end());
}

void ByteWriter::blob(std::span<const std::uint8_t> data) {
  u32_be(static_cast<std::uint32_t>(data.size()));
  raw(data);
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint32_t ByteReader::u32_be() {
  auto b = raw(4);
  return (std::uint32_t{b[0]} << 24) | (std::uint32_t{b[1]} << 16) |
         (std::uint32_t{b[2]} << 8) | std::uint32_t{b[3]};
}

std::uint64_t ByteReader::u64_le() { return uint_le(8); }

std::uint64_t ByteReader::uint_le(std::size_t width) {
  auto b = raw(width);
  std::uint64_t v = 0;
  for (std::size_t i = width; i-- > 0;) v = (v << 8) | b[i];
  return v;
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  if (n > remaining()) throw FrameError("truncated: wanted " + std::to_string(n) +
                                        " bytes, have " + std::to_string(remaining()));
  auto s = data_.subspan(pos_, n);
  pos_ += n;
  return s;
}

std::span<const std::uint8_t> ByteReader::blob() { return raw(u32_be()); }

void ByteReader::expect_done() const {
  if (!done()) throw FrameError(std::to_string(remaining()) + " trailing bytes");
}

}  // namespace cclab
