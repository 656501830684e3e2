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

// Fixed-point values in Z_{2^w} and additive secret sharing over them.
//
// Two sharing modes exist. Perfect sharing works modulo 2^w and each share
// alone is uniform. Statistical sharing works over the integers: the mask is
// drawn from [0, 2^(w+sec_bits)) and the holder's share is secret - mask, so
// two distinct secrets give share distributions within 2^-sec_bits of each
// other. Statistical mode is what survives a trip through a plaintext space
// whose modulus is not a power of two (the homomorphic-encryption path).

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "cclab/rng.hpp"

namespace cclab::ring {

using Int128 = __int128;

struct FixedPointParams {
  unsigned width_bits = 32;
  unsigned frac_bits = 16;

  // Throws ParamError unless 0 < frac_bits < width_bits <= 64.
  void validate() const;
  std::uint64_t modulus_mask() const;
  double max_value() const;  // 2^(w-1-f) - 2^-f
  double min_value() const;  // -2^(w-1-f)

  friend bool operator==(const FixedPointParams&, const FixedPointParams&) = default;
};

// Element of Z_{2^w}. raw() is always reduced; to_signed() reads it as
// two's complement.
class RingValue {
 public:
  RingValue() = default;
  RingValue(std::uint64_t raw, FixedPointParams params);
  static RingValue from_signed(std::int64_t v, FixedPointParams params);

  std::uint64_t raw() const { return raw_; }
  const FixedPointParams& params() const { return params_; }
  std::int64_t to_signed() const;

  RingValue operator+(const RingValue& o) const;
  RingValue operator-(const RingValue& o) const;
  RingValue operator-() const;

  friend bool operator==(const RingValue& a, const RingValue& b) {
    return a.raw_ == b.raw_ && a.params_ == b.params_;
  }

 private:
  std::uint64_t raw_ = 0;
  FixedPointParams params_{};
};

// Round half away from zero into w-bit two's complement. Throws RangeError
// outside [min_value, max_value] (after rounding) or on NaN.
RingValue encode_fixed(double x, FixedPointParams p);
double decode_fixed(const RingValue& v);

enum class ShareMode { Perfect, Statistical };

struct SharingMode {
  ShareMode kind = ShareMode::Perfect;
  unsigned sec_bits = 0;  // only meaningful for Statistical

  static SharingMode perfect() { return {ShareMode::Perfect, 0}; }
  static SharingMode statistical(unsigned sec_bits) {
    return {ShareMode::Statistical, sec_bits};
  }
  friend bool operator==(const SharingMode&, const SharingMode&) = default;
};

// One share. In Perfect mode value is in [0, 2^w); in Statistical mode it is
// an unbounded (128-bit) integer.
struct Share {
  Int128 value = 0;
  SharingMode mode{};
  FixedPointParams params{};
};

// holder = a, counterpart = b (the mask).
struct SharePair {
  Share holder;
  Share counterpart;
};

SharePair share(const RingValue& secret, SharingMode mode, Rng& rng);

// Deterministic form of share() given the mask; exposed so share
// distributions can be enumerated exactly.
SharePair share_with_mask(const RingValue& secret, SharingMode mode, Int128 mask);

// Throws ModeMismatch if the two shares disagree on mode or params, and
// RangeError if a statistical pair does not sum into [0, 2^w).
RingValue reconstruct(const Share& a, const Share& b);
inline RingValue reconstruct(const SharePair& p) { return reconstruct(p.holder, p.counterpart); }

// Element-wise sum mod 2^w. LengthMismatch on size mismatch, ParamError on
// params mismatch.
std::vector<RingValue> vec_add_mod(std::span<const RingValue> u, std::span<const RingValue> v);

std::vector<RingValue> uniform_vector(std::size_t k, FixedPointParams p, Rng& rng);

}  // namespace cclab::ring
