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
#include "cclab/ring.hpp"

#include <cmath>
#include <string>

#include "cclab/errors.hpp"

namespace cclab::ring {

void FixedPointParams::validate() const {
  if (frac_bits == 0 || frac_bits >= width_bits || width_bits > 64) {
    throw ParamError("fixed point: need 0 < f < w <= 64, got w=" + std::to_string(width_bits) +
                     " f=" + std::to_string(frac_bits));
  }
}

std::uint64_t FixedPointParams::modulus_mask() const {
  return width_bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width_bits) - 1;
}

double FixedPointParams::max_value() const {
  return std::ldexp(1.0, static_cast<int>(width_bits - 1 - frac_bits)) -
         std::ldexp(1.0, -static_cast<int>(frac_bits));
}

double FixedPointParams::min_value() const {
  return -std::ldexp(1.0, static_cast<int>(width_bits - 1 - frac_bits));
}

RingValue::RingValue(std::uint64_t raw, FixedPointParams params)
    : raw_(raw & params.modulus_mask()), params_(params) {}

RingValue RingValue::from_signed(std::int64_t v, FixedPointParams params) {
  return RingValue(static_cast<std::uint64_t>(v), params);
}

std::int64_t RingValue::to_signed() const {
  const unsigned w = params_.width_bits;
  if (w == 64) return static_cast<std::int64_t>(raw_);
  const std::uint64_t sign = std::uint64_t{1} << (w - 1);
  return (raw_ & sign) ? static_cast<std::int64_t>(raw_) - (std::int64_t{1} << w)
                       : static_cast<std::int64_t>(raw_);
}

RingValue RingValue::operator+(const RingValue& o) const {
  if (!(params_ == o.params_)) throw ParamError("ring add: params differ");
  return RingValue(raw_ + o.raw_, params_);
}

RingValue RingValue::operator-(const RingValue& o) const {
  if (!(params_ == o.params_)) throw ParamError("ring sub: params differ");
  return RingValue(raw_ - o.raw_, params_);
}

RingValue RingValue::operator-() const { return RingValue(0 - raw_, params_); }

RingValue encode_fixed(double x, FixedPointParams p) {
  p.validate();
  const double scaled = std::round(std::ldexp(x, static_cast<int>(p.frac_bits)));
  const double lim = std::ldexp(1.0, static_cast<int>(p.width_bits - 1));
  if (!(scaled >= -lim && scaled < lim)) {
    throw RangeError("encode_fixed: " + std::to_string(x) + " outside [" +
                     std::to_string(p.min_value()) + ", " + std::to_string(p.max_value()) + "]");
  }
  return RingValue::from_signed(static_cast<std::int64_t>(scaled), p);
}

double decode_fixed(const RingValue& v) {
  return std::ldexp(static_cast<double>(v.to_signed()), -static_cast<int>(v.params().frac_bits));
}

namespace {

void check_statistical(const FixedPointParams& p, unsigned sec_bits) {
  if (p.width_bits + sec_bits > 126) {
    throw ParamError("statistical sharing: w + sec_bits must be <= 126");
  }
}

}  // namespace

SharePair share_with_mask(const RingValue& secret, SharingMode mode, Int128 mask) {
  const auto& p = secret.params();
  if (mode.kind == ShareMode::Perfect) {
    const RingValue m(static_cast<std::uint64_t>(mask), p);
    const RingValue a = secret - m;
    return {Share{static_cast<Int128>(a.raw()), mode, p},
            Share{static_cast<Int128>(m.raw()), mode, p}};
  }
  check_statistical(p, mode.sec_bits);
  const Int128 s = static_cast<Int128>(secret.raw());
  return {Share{s - mask, mode, p}, Share{mask, mode, p}};
}

SharePair share(const RingValue& secret, SharingMode mode, Rng& rng) {
  const auto& p = secret.params();
  if (mode.kind == ShareMode::Perfect) {
    return share_with_mask(secret, mode, static_cast<Int128>(rng.uniform_bits(p.width_bits)));
  }
  check_statistical(p, mode.sec_bits);
  const unsigned bits = p.width_bits + mode.sec_bits;
  return share_with_mask(secret, mode, static_cast<Int128>(rng.uniform_bits128(bits)));
}

RingValue reconstruct(const Share& a, const Share& b) {
  if (!(a.mode == b.mode) || !(a.params == b.params)) {
    throw ModeMismatch("reconstruct: shares from different modes or params");
  }
  const Int128 sum = a.value + b.value;
  if (a.mode.kind == ShareMode::Perfect) {
    return RingValue(static_cast<std::uint64_t>(sum), a.params);
  }
  const Int128 modulus = static_cast<Int128>(1) << a.params.width_bits;
  if (sum < 0 || sum >= modulus) {
    throw RangeError("reconstruct: statistical shares do not sum into [0, 2^w)");
  }
  return RingValue(static_cast<std::uint64_t>(sum), a.params);
}

std::vector<RingValue> vec_add_mod(std::span<const RingValue> u, std::span<const RingValue> v) {
  if (u.size() != v.size()) {
    throw LengthMismatch("vec_add_mod: lengths " + std::to_string(u.size()) + " and " +
                         std::to_string(v.size()));
  }
  std::vector<RingValue> out;
  out.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out.push_back(u[i] + v[i]);
  return out;
}

std::vector<RingValue> uniform_vector(std::size_t k, FixedPointParams p, Rng& rng) {
  std::vector<RingValue> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.emplace_back(rng.uniform_bits(p.width_bits), p);
  return out;
}

}  // namespace cclab::ring
