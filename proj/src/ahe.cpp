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
#include "cclab/ahe.hpp"

#include <algorithm>
#include <string>

#include "cclab/errors.hpp"

namespace cclab::ahe {

namespace {

Bytes mpz_to_bytes(const mpz_class& v) {
  if (v < 0) throw RangeError("cannot serialise a negative integer");
  const std::size_t n = (mpz_sizeinbase(v.get_mpz_t(), 2) + 7) / 8;
  Bytes out(n);
  std::size_t written = 0;
  if (v != 0) mpz_export(out.data(), &written, 1, 1, 1, 0, v.get_mpz_t());
  out.resize(written);
  return out;
}

mpz_class mpz_from_bytes(std::span<const std::uint8_t> b) {
  mpz_class v;
  if (!b.empty()) mpz_import(v.get_mpz_t(), b.size(), 1, 1, 1, 0, b.data());
  return v;
}

mpz_class random_bits(unsigned bits, Rng& rng) {
  Bytes buf((bits + 7) / 8);
  rng.fill(buf);
  mpz_class v = mpz_from_bytes(buf);
  const unsigned excess = static_cast<unsigned>(buf.size() * 8 - bits);
  if (excess) mpz_fdiv_q_2exp(v.get_mpz_t(), v.get_mpz_t(), excess);
  return v;
}

mpz_class random_prime(unsigned bits, Rng& rng) {
  mpz_class start = random_bits(bits, rng);
  mpz_setbit(start.get_mpz_t(), bits - 1);
  mpz_setbit(start.get_mpz_t(), bits - 2);
  mpz_class p;
  mpz_nextprime(p.get_mpz_t(), start.get_mpz_t());
  return p;
}

// Ideal ciphertexts pack (m, tag) as m * 2^64 + tag.
constexpr unsigned kIdealTagBits = 64;

mpz_class ideal_plain(const Ciphertext& c) {
  mpz_class m;
  mpz_fdiv_q_2exp(m.get_mpz_t(), c.value().get_mpz_t(), kIdealTagBits);
  return m;
}

std::uint64_t ideal_tag(const Ciphertext& c) {
  mpz_class t;
  mpz_fdiv_r_2exp(t.get_mpz_t(), c.value().get_mpz_t(), kIdealTagBits);
  return t.get_ui();
}

Ciphertext ideal_pack(const PublicKey& pk, const mpz_class& m, std::uint64_t tag) {
  mpz_class v;
  mpz_mul_2exp(v.get_mpz_t(), m.get_mpz_t(), kIdealTagBits);
  v += mpz_class(static_cast<unsigned long>(tag));
  return Ciphertext(std::move(v), pk.fingerprint());
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t x = a * 0x9E3779B97F4A7C15ull ^ (b + 0x632BE59BD9B4E019ull);
  x ^= x >> 31;
  return x * 0xBF58476D1CE4E5B9ull;
}

void check_key(const PublicKey& pk, const Ciphertext& c) {
  if (c.fingerprint() != pk.fingerprint()) {
    throw KeyMismatch("ciphertext was produced under a different public key");
  }
}

mpz_class mod_n(const mpz_class& v, const mpz_class& n) {
  mpz_class r;
  mpz_mod(r.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  return r;
}

}  // namespace

PublicKey::PublicKey(Backend backend, mpz_class n)
    : backend_(backend), n_(std::move(n)), n2_(n_ * n_) {
  const Digest d = sha256(serialize());
  for (int i = 0; i < 8; ++i) fingerprint_ = (fingerprint_ << 8) | d[i];
}

Bytes PublicKey::serialize() const {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(backend_));
  w.blob(mpz_to_bytes(n_));
  return std::move(w).take();
}

PublicKey PublicKey::deserialize(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  const auto tag = r.u8();
  if (tag > 1) throw FrameError("unknown encryption backend " + std::to_string(tag));
  mpz_class n = mpz_from_bytes(r.blob());
  r.expect_done();
  if (n < 3) throw FrameError("public key modulus too small");
  return PublicKey(static_cast<Backend>(tag), std::move(n));
}

KeyPair keygen(Backend backend, KeySize size, Rng& rng) {
  return keygen(backend, static_cast<unsigned>(size), rng);
}

KeyPair keygen(Backend backend, unsigned modulus_bits, Rng& rng) {
  if (modulus_bits < 64) throw ParamError("keygen: modulus must have at least 64 bits");
  if (backend == Backend::Ideal) {
    mpz_class n = random_bits(modulus_bits, rng);
    mpz_setbit(n.get_mpz_t(), modulus_bits - 1);
    mpz_setbit(n.get_mpz_t(), 0);
    PublicKey pk(Backend::Ideal, n);
    return {pk, SecretKey(pk, 0, 0)};
  }
  const unsigned half = modulus_bits / 2;
  for (;;) {
    const mpz_class p = random_prime(half, rng);
    const mpz_class q = random_prime(modulus_bits - half, rng);
    if (p == q) continue;
    const mpz_class n = p * q;
    const mpz_class phi = (p - 1) * (q - 1);
    mpz_class g;
    mpz_gcd(g.get_mpz_t(), n.get_mpz_t(), phi.get_mpz_t());
    if (g != 1) continue;
    mpz_class lambda;
    const mpz_class pm1 = p - 1, qm1 = q - 1;
    mpz_lcm(lambda.get_mpz_t(), pm1.get_mpz_t(), qm1.get_mpz_t());
    mpz_class mu;
    if (mpz_invert(mu.get_mpz_t(), lambda.get_mpz_t(), n.get_mpz_t()) == 0) continue;
    PublicKey pk(Backend::Paillier, n);
    return {pk, SecretKey(pk, lambda, mu)};
  }
}

Ciphertext enc(const PublicKey& pk, const mpz_class& m, Rng& rng) {
  if (m < 0 || m >= pk.n()) throw RangeError("enc: plaintext outside [0, n)");
  if (pk.backend() == Backend::Ideal) return ideal_pack(pk, m, rng.next_u64());
  mpz_class r;
  do {
    r = uniform_mpz_below(pk.n(), rng);
  } while (r == 0);
  mpz_class rn;
  mpz_powm(rn.get_mpz_t(), r.get_mpz_t(), pk.n().get_mpz_t(), pk.n_squared().get_mpz_t());
  mpz_class c = (1 + m * pk.n()) * rn;
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared().get_mpz_t());
  return Ciphertext(std::move(c), pk.fingerprint());
}

Ciphertext trivial_enc(const PublicKey& pk, const mpz_class& m) {
  const mpz_class mm = mod_n(m, pk.n());
  if (pk.backend() == Backend::Ideal) return ideal_pack(pk, mm, 0);
  mpz_class c = 1 + mm * pk.n();
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared().get_mpz_t());
  return Ciphertext(std::move(c), pk.fingerprint());
}

mpz_class dec(const SecretKey& sk, const Ciphertext& c) {
  const PublicKey& pk = sk.public_key();
  check_key(pk, c);
  if (pk.backend() == Backend::Ideal) return ideal_plain(c);
  mpz_class u;
  mpz_powm(u.get_mpz_t(), c.value().get_mpz_t(), sk.lambda().get_mpz_t(),
           pk.n_squared().get_mpz_t());
  mpz_class l = (u - 1) / pk.n();
  return mod_n(l * sk.mu(), pk.n());
}

Ciphertext add_ct(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  check_key(pk, a);
  check_key(pk, b);
  if (pk.backend() == Backend::Ideal) {
    return ideal_pack(pk, mod_n(ideal_plain(a) + ideal_plain(b), pk.n()),
                      mix(ideal_tag(a), ideal_tag(b)));
  }
  mpz_class c = a.value() * b.value();
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared().get_mpz_t());
  return Ciphertext(std::move(c), pk.fingerprint());
}

Ciphertext sub_ct(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b) {
  check_key(pk, a);
  check_key(pk, b);
  if (pk.backend() == Backend::Ideal) {
    return ideal_pack(pk, mod_n(ideal_plain(a) - ideal_plain(b), pk.n()),
                      mix(ideal_tag(a), ~ideal_tag(b)));
  }
  mpz_class inv;
  if (mpz_invert(inv.get_mpz_t(), b.value().get_mpz_t(), pk.n_squared().get_mpz_t()) == 0) {
    throw DecryptionFailure("sub_ct: ciphertext not invertible");
  }
  mpz_class c = a.value() * inv;
  mpz_mod(c.get_mpz_t(), c.get_mpz_t(), pk.n_squared().get_mpz_t());
  return Ciphertext(std::move(c), pk.fingerprint());
}

Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const mpz_class& k) {
  check_key(pk, c);
  const mpz_class kk = mod_n(k, pk.n());
  if (pk.backend() == Backend::Ideal) {
    return ideal_pack(pk, mod_n(ideal_plain(c) * kk, pk.n()),
                      mix(ideal_tag(c), mpz_class(kk % mpz_class(1u << 30)).get_ui()));
  }
  mpz_class out;
  mpz_powm(out.get_mpz_t(), c.value().get_mpz_t(), kk.get_mpz_t(), pk.n_squared().get_mpz_t());
  return Ciphertext(std::move(out), pk.fingerprint());
}

mpz_class ideal_open(const PublicKey& pk, const Ciphertext& c) {
  check_key(pk, c);
  if (pk.backend() != Backend::Ideal) {
    throw KeyMismatch("ideal_open: only ideal-backend ciphertexts can be opened");
  }
  return ideal_plain(c);
}

void write_ciphertext(ByteWriter& w, const Ciphertext& c) { w.blob(mpz_to_bytes(c.value())); }

Ciphertext read_ciphertext(ByteReader& r, const PublicKey& pk) {
  mpz_class v = mpz_from_bytes(r.blob());
  const mpz_class limit =
      pk.backend() == Backend::Ideal ? mpz_class(pk.n() << kIdealTagBits) : pk.n_squared();
  if (v >= limit) throw FrameError("ciphertext out of range for key");
  return Ciphertext(std::move(v), pk.fingerprint());
}

Bytes serialize_ciphertexts(std::span<const Ciphertext> cts) {
  ByteWriter w;
  w.u32_be(static_cast<std::uint32_t>(cts.size()));
  for (const auto& c : cts) write_ciphertext(w, c);
  return std::move(w).take();
}

std::vector<Ciphertext> deserialize_ciphertexts(std::span<const std::uint8_t> bytes,
                                                const PublicKey& pk) {
  ByteReader r(bytes);
  const std::uint32_t count = r.u32_be();
  if (count > r.remaining() / 4) throw FrameError("ciphertext count exceeds payload");
  std::vector<Ciphertext> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) out.push_back(read_ciphertext(r, pk));
  r.expect_done();
  return out;
}

mpz_class to_residue(const mpz_class& v, const mpz_class& n) { return mod_n(v, n); }

mpz_class lift_centered(const mpz_class& v, const mpz_class& n) {
  mpz_class r = mod_n(v, n);
  if (2 * r > n) r -= n;
  return r;
}

mpz_class uniform_mpz_below(const mpz_class& bound, Rng& rng) {
  if (bound <= 0) throw ParamError("uniform_mpz_below: bound must be positive");
  const unsigned bits = static_cast<unsigned>(mpz_sizeinbase(bound.get_mpz_t(), 2));
  for (;;) {
    mpz_class v = random_bits(bits, rng);
    if (v < bound) return v;
  }
}

std::vector<Ciphertext> encrypted_linear_infer(const PublicKey& pk,
                                               std::span<const Ciphertext> enc_features,
                                               const IntMatrix& weights,
                                               std::span<const std::int64_t> bias,
                                               ring::FixedPointParams fp) {
  if (weights.cols != enc_features.size()) {
    throw DimensionMismatch("linear inference: " + std::to_string(enc_features.size()) +
                            " features for " + std::to_string(weights.cols) + " weight columns");
  }
  if (weights.rows != bias.size() || weights.data.size() != weights.rows * weights.cols) {
    throw DimensionMismatch("linear inference: weight and bias shapes disagree");
  }
  fp.validate();
  // Worst case |W x + b| with |x_j| < 2^(w-1).
  mpz_class max_w = 0, max_b = 0;
  for (auto v : weights.data) max_w = std::max(max_w, mpz_class(abs(mpz_class(static_cast<long>(v)))));
  for (auto v : bias) max_b = std::max(max_b, mpz_class(abs(mpz_class(static_cast<long>(v)))));
  mpz_class x_bound = 1;
  x_bound <<= (fp.width_bits - 1);
  const mpz_class worst = mpz_class(static_cast<unsigned long>(weights.cols)) * max_w * x_bound + max_b;
  if (2 * worst >= pk.n()) {
    throw OverflowBudgetExceeded("linear inference: worst-case logit does not fit the plaintext space");
  }
  std::vector<Ciphertext> out;
  out.reserve(weights.rows);
  for (std::size_t r = 0; r < weights.rows; ++r) {
    Ciphertext acc = trivial_enc(pk, mpz_class(static_cast<long>(bias[r])));
    for (std::size_t c = 0; c < weights.cols; ++c) {
      const std::int64_t wv = weights.at(r, c);
      if (wv == 0) continue;
      acc = add_ct(pk, acc, scalar_mul(pk, enc_features[c], mpz_class(static_cast<long>(wv))));
    }
    out.push_back(std::move(acc));
  }
  return out;
}

MaskedLogits mask_logits(const PublicKey& pk, std::span<const Ciphertext> enc_logits,
                         const mpz_class& max_logit_bound, unsigned sec_bits, Rng& rng,
                         const mpz_class& quantum) {
  if (max_logit_bound <= 0) throw ParamError("mask_logits: bound must be positive");
  if (quantum <= 0) throw ParamError("mask_logits: quantum must be positive");
  mpz_class upper = max_logit_bound;
  upper <<= (sec_bits + 1);
  mpz_class steps;
  mpz_cdiv_q(steps.get_mpz_t(), upper.get_mpz_t(), quantum.get_mpz_t());
  // logit - mask must stay within (-n/2, n/2) for the centred lift.
  if (2 * (steps * quantum + max_logit_bound) >= pk.n()) {
    throw OverflowBudgetExceeded("mask_logits: mask domain does not fit the plaintext space");
  }
  MaskedLogits out;
  out.enc_masked.reserve(enc_logits.size());
  out.mask.reserve(enc_logits.size());
  for (const auto& c : enc_logits) {
    mpz_class m = uniform_mpz_below(steps, rng) * quantum;
    out.enc_masked.push_back(sub_ct(pk, c, enc(pk, to_residue(m, pk.n()), rng)));
    out.mask.push_back(std::move(m));
  }
  return out;
}

ring::RingValue masked_to_ring_share(const mpz_class& decrypted, const mpz_class& n,
                                     unsigned shift, ring::FixedPointParams fp) {
  const mpz_class centred = lift_centered(decrypted, n);
  mpz_class q;
  mpz_fdiv_q_2exp(q.get_mpz_t(), centred.get_mpz_t(), shift);
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), q.get_mpz_t(), fp.width_bits);
  std::uint64_t raw = 0;
  mpz_export(&raw, nullptr, -1, sizeof(raw), 0, 0, r.get_mpz_t());
  return ring::RingValue(raw, fp);
}

ring::RingValue mask_to_ring_share(const mpz_class& mask, unsigned shift,
                                   ring::FixedPointParams fp) {
  mpz_class q;
  mpz_fdiv_q_2exp(q.get_mpz_t(), mask.get_mpz_t(), shift);
  mpz_class r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), q.get_mpz_t(), fp.width_bits);
  std::uint64_t raw = 0;
  mpz_export(&raw, nullptr, -1, sizeof(raw), 0, 0, r.get_mpz_t());
  return ring::RingValue(raw, fp);
}

}  // namespace cclab::ahe
