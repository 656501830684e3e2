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
#include <limits>
#include <span>
#include <string_view>

namespace cclab {

// Deterministic ChaCha20 keystream generator. Satisfies
// UniformRandomBitGenerator so it plugs into <random> distributions.
// Every randomized operation in the library takes one explicitly.
class Rng {
 public:
  using result_type = std::uint64_t;
  using Key = std::array<std::uint8_t, 32>;

  explicit Rng(std::uint64_t seed);
  explicit Rng(const Key& key);

  // Independent child stream, keyed by hashing (seed, label).
  static Rng derive(std::uint64_t seed, std::span<const std::uint8_t> label);
  static Rng derive(std::uint64_t seed, std::string_view label);
  Rng fork(std::string_view label);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();
  void fill(std::span<std::uint8_t> out);

  // Uniform on [0, bound); bound must be nonzero.
  std::uint64_t uniform_below(std::uint64_t bound);
  // Uniform on [0, 2^bits), bits <= 64.
  std::uint64_t uniform_bits(unsigned bits);
  // Uniform on [0, 2^bits), bits <= 127.
  unsigned __int128 uniform_bits128(unsigned bits);
  // Uniform on the open interval (0, 1).
  double uniform_open01();

 private:
  void refill();

  Key key_{};
  std::uint64_t block_counter_ = 0;
  std::array<std::uint8_t, 512> buffer_{};
  std::size_t pos_ = 512;
};

// libsodium must be initialised before any primitive call; idempotent.
void ensure_sodium();

}  // namespace cclab
