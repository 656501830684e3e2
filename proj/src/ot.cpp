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
#include "cclab/ot.hpp"

#include <sodium.h>

#include <array>
#include <string>

#include "cclab/errors.hpp"

namespace cclab::gc {

namespace {

using Point = std::array<std::uint8_t, crypto_core_ristretto255_BYTES>;
using Scalar = std::array<std::uint8_t, crypto_core_ristretto255_SCALARBYTES>;

Scalar random_scalar(Rng& rng) {
  std::array<std::uint8_t, crypto_core_ristretto255_NONREDUCEDSCALARBYTES> wide;
  rng.fill(wide);
  Scalar s;
  crypto_core_ristretto255_scalar_reduce(s.data(), wide.data());
  return s;
}

Point read_point(ByteReader& r) {
  auto b = r.blob();
  if (b.size() != crypto_core_ristretto255_BYTES ||
      crypto_core_ristretto255_is_valid_point(b.data()) != 1) {
    throw ProtocolAbort("malformed group element");
  }
  Point p;
  std::copy(b.begin(), b.end(), p.begin());
  return p;
}

Point mul(const Scalar& s, const Point& p) {
  Point out;
  if (crypto_scalarmult_ristretto255(out.data(), s.data(), p.data()) != 0) {
    throw ProtocolAbort("malformed group element", "product is the identity");
  }
  return out;
}

Bytes pad(const proto::SessionId& session, std::uint32_t index, const Point& a, const Point& b,
          const Point& shared, std::size_t len) {
  crypto_generichash_state st;
  crypto_generichash_init(&st, nullptr, 0, crypto_stream_chacha20_KEYBYTES);
  static constexpr char kDomain[] = "cclab.ot.v1";
  crypto_generichash_update(&st, reinterpret_cast<const unsigned char*>(kDomain), sizeof(kDomain) - 1);
  crypto_generichash_update(&st, session.data(), session.size());
  std::uint8_t idx[4] = {static_cast<std::uint8_t>(index >> 24), static_cast<std::uint8_t>(index >> 16),
                         static_cast<std::uint8_t>(index >> 8), static_cast<std::uint8_t>(index)};
  crypto_generichash_update(&st, idx, sizeof(idx));
  crypto_generichash_update(&st, a.data(), a.size());
  crypto_generichash_update(&st, b.data(), b.size());
  crypto_generichash_update(&st, shared.data(), shared.size());
  std::uint8_t key[crypto_stream_chacha20_KEYBYTES];
  crypto_generichash_final(&st, key, sizeof(key));
  static const std::uint8_t kNonce[crypto_stream_chacha20_NONCEBYTES] = {};
  Bytes out(len);
  if (len) crypto_stream_chacha20(out.data(), len, kNonce, key);
  return out;
}

std::size_t common_length(std::span<const OtMessagePair> pairs) {
  if (pairs.empty()) return 0;
  const std::size_t len = pairs[0].m0.size();
  for (const auto& p : pairs) {
    if (p.m0.size() != len || p.m1.size() != len) throw LengthMismatch("ot: messages differ in length");
  }
  return len;
}

}  // namespace

void ot_send(std::span<const OtMessagePair> pairs, proto::StepChannel& ch, OtBackend backend,
             Rng& rng) {
  ensure_sodium();
  const std::size_t len = common_length(pairs);
  if (backend == OtBackend::InsecureLoopback) {
    ByteWriter w;
    w.u32_be(static_cast<std::uint32_t>(pairs.size()));
    w.u32_be(static_cast<std::uint32_t>(len));
    for (const auto& p : pairs) {
      w.raw(p.m0);
      w.raw(p.m1);
    }
    ch.send(proto::TwoPcKind::OtLoopbackPairs, w.bytes());
    return;
  }

  const Scalar a = random_scalar(rng);
  Point big_a;
  crypto_scalarmult_ristretto255_base(big_a.data(), a.data());
  {
    ByteWriter w;
    w.blob(big_a);
    ch.send(proto::TwoPcKind::OtSenderSetup, w.bytes());
  }

  const Bytes keys = ch.expect(proto::TwoPcKind::OtReceiverKeys);
  ByteReader r(keys);
  if (r.u32_be() != pairs.size()) throw ProtocolAbort("ot", "receiver key count mismatch");
  ByteWriter w;
  w.u32_be(static_cast<std::uint32_t>(pairs.size()));
  w.u32_be(static_cast<std::uint32_t>(len));
  for (std::uint32_t i = 0; i < pairs.size(); ++i) {
    const Point big_b = read_point(r);
    Point b_minus_a;
    crypto_core_ristretto255_sub(b_minus_a.data(), big_b.data(), big_a.data());
    const Bytes k0 = pad(ch.session(), i, big_a, big_b, mul(a, big_b), len);
    const Bytes k1 = pad(ch.session(), i, big_a, big_b, mul(a, b_minus_a), len);
    Bytes e0 = pairs[i].m0, e1 = pairs[i].m1;
    for (std::size_t j = 0; j < len; ++j) {
      e0[j] ^= k0[j];
      e1[j] ^= k1[j];
    }
    w.raw(e0);
    w.raw(e1);
  }
  r.expect_done();
  ch.send(proto::TwoPcKind::OtCiphertexts, w.bytes());
}

std::vector<Bytes> ot_receive(const Bits& choices, std::size_t msg_len, proto::StepChannel& ch,
                              OtBackend backend, Rng& rng) {
  ensure_sodium();
  std::vector<Bytes> out;
  out.reserve(choices.size());
  if (backend == OtBackend::InsecureLoopback) {
    const Bytes body = ch.expect(proto::TwoPcKind::OtLoopbackPairs);
    ByteReader r(body);
    if (r.u32_be() != choices.size() || r.u32_be() != msg_len) {
      throw ProtocolAbort("ot", "loopback pair shape mismatch");
    }
    for (bool c : choices) {
      auto m0 = r.raw(msg_len);
      auto m1 = r.raw(msg_len);
      const auto& m = c ? m1 : m0;
      out.emplace_back(m.begin(), m.end());
    }
    r.expect_done();
    return out;
  }

  const Bytes setup = ch.expect(proto::TwoPcKind::OtSenderSetup);
  ByteReader sr(setup);
  const Point big_a = read_point(sr);
  sr.expect_done();

  std::vector<Point> shared;
  std::vector<Point> sent;
  shared.reserve(choices.size());
  sent.reserve(choices.size());
  ByteWriter w;
  w.u32_be(static_cast<std::uint32_t>(choices.size()));
  for (bool c : choices) {
    const Scalar b = random_scalar(rng);
    Point big_b;
    crypto_scalarmult_ristretto255_base(big_b.data(), b.data());
    if (c) crypto_core_ristretto255_add(big_b.data(), big_a.data(), big_b.data());
    shared.push_back(mul(b, big_a));
    sent.push_back(big_b);
    w.blob(big_b);
  }
  ch.send(proto::TwoPcKind::OtReceiverKeys, w.bytes());

  const Bytes cts = ch.expect(proto::TwoPcKind::OtCiphertexts);
  ByteReader r(cts);
  if (r.u32_be() != choices.size() || r.u32_be() != msg_len) {
    throw ProtocolAbort("ot", "ciphertext shape mismatch");
  }
  for (std::uint32_t i = 0; i < choices.size(); ++i) {
    auto e0 = r.raw(msg_len);
    auto e1 = r.raw(msg_len);
    const auto& e = choices[i] ? e1 : e0;
    const Bytes k = pad(ch.session(), i, big_a, sent[i], shared[i], msg_len);
    Bytes m(e.begin(), e.end());
    for (std::size_t j = 0; j < msg_len; ++j) m[j] ^= k[j];
    out.push_back(std::move(m));
  }
  r.expect_done();
  return out;
}

}  // namespace cclab::gc
