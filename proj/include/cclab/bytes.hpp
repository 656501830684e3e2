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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cclab {

using Bytes = std::vector<std::uint8_t>;
using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> data);
std::string to_hex(std::span<const std::uint8_t> data);

// Append-only encoder. Frame headers are big-endian; ring-value arrays are
// little-endian (see WIRE.md).
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32_be(std::uint32_t v);
  void u64_le(std::uint64_t v);
  void uint_le(std::uint64_t v, std::size_t width);
  void raw(std::span<const std::uint8_t> data);
  // u32 big-endian length, then the bytes.
  void blob(std::span<const std::uint8_t> data);

  const Bytes& bytes() const& { return out_; }
  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

// Cursor over a byte span. Every read past the end throws FrameError.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

  std::uint8_t u8();
  std::uint32_t u32_be();
  std::uint64_t u64_le();
  std::uint64_t uint_le(std::size_t width);
  std::span<const std::uint8_t> raw(std::size_t n);
  std::span<const std::uint8_t> blob();

  std::size_t remaining() const { return data_.size() - pos_; }
  bool done() const { return pos_ == data_.size(); }
  // Throws FrameError if bytes are left over.
  void expect_done() const;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

}  // namespace cclab
