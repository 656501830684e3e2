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
#include "cclab/rng.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace cclab {

void ensure_sodium() {
  static const bool ok = sodium_init() >= 0;
  if (!ok) throw std::runtime_error("libsodium initialisation failed");
}

namespace {

Rng::Key key_from_seed(std::uint64_t seed, std::span<const std::uint8_t> label) {
  ensure_sodium();
  std::uint8_t seed_bytes[8];
  for (int i = 0; i < 8; ++i) seed_bytes[i] = static_cast<std::uint8_t>(seed >> (8 * i));
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, 32);
  static constexpr char kDomain[] = "cclab.rng.v1";
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(kDomain),
                            sizeof(kDomain) - 1);
  crypto_generichash_update(&st, seed_bytes, sizeof(seed_bytes));
  crypto_generichash_update(&st, label.data(), label.size());
  Rng::Key key;
  crypto_generichash_final(&st, key.data(), key.size());
  return key;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : key_(key_from_seed(seed, {})) {}

Rng::Rng(const Key& key) : key_(key) { ensure_sodium(); }

Rng Rng::derive(std::uint64_t seed, std::span<const std::uint8_t> label) {
  return Rng(key_from_seed(seed, label));
}

Rng Rng::derive(std::uint64_t seed, std::string_view label) {
  return derive(seed, std::span(reinterpret_cast<const std::uint8_t*>(label.data()),
                                label.size()));
}

Rng Rng::fork(std::string_view label) {
  Key material;
  fill(material);
  std::vector<std::uint8_t> buf(material.begin(), material.end());
  buf.insert(buf.end(), label.begin(), label.end());
  Key child;
  crypto_generichash(child.data(), child.size(), buf.data(), buf.size(), nullptr, 0);
  return Rng(child);
}

void Rng::refill() {
  static const std::uint8_t kNonce[crypto_stream_chacha20_NONCEBYTES] = {};
  std::memset(buffer_.data(), 0, buffer_.size());
  crypto_stream_chacha20_xor_ic(buffer_.data(), buffer_.data(), buffer_.size(), kNonce,
                                block_counter_, key_.data());
  block_counter_ += buffer_.size() / 64;
  pos_ = 0;
}

void Rng::fill(std::span<std::uint8_t> out) {
  std::size_t done = 0;
  while (done < out.size()) {
    if (pos_ == buffer_.size()) refill();
    const std::size_t n = std::min(out.size() - done, buffer_.size() - pos_);
    std::memcpy(out.data() + done, buffer_.data() + pos_, n);
    pos_ += n;
    done += n;
  }
}

std::uint64_t Rng::next_u64() {
  std::uint8_t b[8];
  fill(b);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t Rng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("uniform_below: zero bound");
  // Rejection on the largest multiple of bound.
  const std::uint64_t limit = max() - max() % bound;
  for (;;) {
    const std::uint64_t v = next_u64();
    if (v < limit) return v % bound;
  }
}

std::uint64_t Rng::uniform_bits(unsigned bits) {
  if (bits > 64) throw std::invalid_argument("uniform_bits: more than 64 bits");
  if (bits == 0) return 0;
  const std::uint64_t v = next_u64();
  return bits == 64 ? v : (v & ((std::uint64_t{1} << bits) - 1));
}

unsigned __int128 Rng::uniform_bits128(unsigned bits) {
  if (bits > 127) throw std::invalid_argument("uniform_bits128: more than 127 bits");
  const unsigned __int128 hi = next_u64();
  const unsigned __int128 lo = next_u64();
  const unsigned __int128 v = (hi << 64) | lo;
  if (bits == 0) return 0;
  return v & ((static_cast<unsigned __int128>(1) << bits) - 1);
}

double Rng::uniform_open01() {
  for (;;) {
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

}  // namespace cclab
