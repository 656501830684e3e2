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

// Additively homomorphic encryption over Z_n and the encrypted steps an
// answering party runs on a querying party's ciphertexts.
//
// Two backends share one interface:
//   Paillier  g = n + 1, c = (1 + m n) r^n mod n^2.
//   Ideal     the plaintext travels inside the ciphertext next to a random
//             tag. Not encryption at all; exists for fast differential tests
//             and desk-scale experiments.

#include <gmpxx.h>

#include <cstdint>
#include <span>
#include <vector>

#include "cclab/bytes.hpp"
#include "cclab/ring.hpp"
#include "cclab/rng.hpp"

namespace cclab::ahe {

enum class Backend : std::uint8_t { Ideal = 0, Paillier = 1 };

// Bit length of n. Test keys are for CI only.
enum class KeySize : unsigned { Test = 512, Standard = 2048 };

class PublicKey {
 public:
  PublicKey() = default;
  PublicKey(Backend backend, mpz_class n);

  Backend backend() const { return backend_; }
  const mpz_class& n() const { return n_; }
  const mpz_class& n_squared() const { return n2_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  Bytes serialize() const;
  static PublicKey deserialize(std::span<const std::uint8_t> bytes);

  friend bool operator==(const PublicKey& a, const PublicKey& b) {
    return a.backend_ == b.backend_ && a.n_ == b.n_;
  }

 private:
  Backend backend_ = Backend::Ideal;
  mpz_class n_;
  mpz_class n2_;
  std::uint64_t fingerprint_ = 0;
};

class SecretKey {
 public:
  SecretKey() = default;
  SecretKey(PublicKey pk, mpz_class lambda, mpz_class mu)
      : pk_(std::move(pk)), lambda_(std::move(lambda)), mu_(std::move(mu)) {}

  const PublicKey& public_key() const { return pk_; }
  const mpz_class& lambda() const { return lambda_; }
  const mpz_class& mu() const { return mu_; }

 private:
  PublicKey pk_;
  mpz_class lambda_;
  mpz_class mu_;
};

struct KeyPair {
  PublicKey pk;
  SecretKey sk;
  const mpz_class& plaintext_modulus() const { return pk.n(); }
};

// Opaque ciphertext bound to the fingerprint of the key that produced it.
class Ciphertext {
 public:
  Ciphertext() = default;
  Ciphertext(mpz_class value, std::uint64_t fingerprint)
      : value_(std::move(value)), fingerprint_(fingerprint) {}

  const mpz_class& value() const { return value_; }
  std::uint64_t fingerprint() const { return fingerprint_; }

  friend bool operator==(const Ciphertext& a, const Ciphertext& b) {
    return a.fingerprint_ == b.fingerprint_ && a.value_ == b.value_;
  }

 private:
  mpz_class value_;
  std::uint64_t fingerprint_ = 0;
};

KeyPair keygen(Backend backend, KeySize size, Rng& rng);
KeyPair keygen(Backend backend, unsigned modulus_bits, Rng& rng);

// RangeError unless 0 <= m < n.
Ciphertext enc(const PublicKey& pk, const mpz_class& m, Rng& rng);
mpz_class dec(const SecretKey& sk, const Ciphertext& c);

// KeyMismatch when a ciphertext was not produced under pk.
Ciphertext add_ct(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
Ciphertext sub_ct(const PublicKey& pk, const Ciphertext& a, const Ciphertext& b);
// k may be negative; it is reduced mod n.
Ciphertext scalar_mul(const PublicKey& pk, const Ciphertext& c, const mpz_class& k);
// Encryption with r = 1; only used for public constants folded into a
// ciphertext that is re-randomised afterwards.
Ciphertext trivial_enc(const PublicKey& pk, const mpz_class& m);

// Length-prefixed big-endian integer (u32 length, magnitude bytes).
void write_ciphertext(ByteWriter& w, const Ciphertext& c);
Ciphertext read_ciphertext(ByteReader& r, const PublicKey& pk);
Bytes serialize_ciphertexts(std::span<const Ciphertext> cts);
std::vector<Ciphertext> deserialize_ciphertexts(std::span<const std::uint8_t> bytes,
                                                const PublicKey& pk);

// Maps an integer (possibly negative) into Z_n and back into (-n/2, n/2].
mpz_class to_residue(const mpz_class& v, const mpz_class& n);
mpz_class lift_centered(const mpz_class& v, const mpz_class& n);

// Row-major integer matrix of fixed-point weights.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::int64_t> data;

  std::int64_t at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

// Enc(W x + b) where x arrives encrypted at scale 2^f, W is at scale 2^f and
// b at scale 2^2f, so logits come out at scale 2^2f. The static bound check
// assumes every |x_j| < 2^(w-1) and throws OverflowBudgetExceeded when the
// worst-case logit would not fit in (-n/2, n/2).
std::vector<Ciphertext> encrypted_linear_infer(const PublicKey& pk,
                                               std::span<const Ciphertext> enc_features,
                                               const IntMatrix& weights,
                                               std::span<const std::int64_t> bias,
                                               ring::FixedPointParams fp);

struct MaskedLogits {
  std::vector<Ciphertext> enc_masked;
  std::vector<mpz_class> mask;
};

// mask_j = quantum * U[0, ceil(bound 2^(sec_bits+1) / quantum)), so with
// quantum = 1 the mask is uniform on [0, bound 2^(sec_bits+1)).
// enc_masked_j = Enc(logit_j - mask_j mod n), which also re-randomises the
// ciphertext. Throws OverflowBudgetExceeded if n is too small for the mask
// domain to stay inside (-n/2, n/2).
MaskedLogits mask_logits(const PublicKey& pk, std::span<const Ciphertext> enc_logits,
                         const mpz_class& max_logit_bound, unsigned sec_bits, Rng& rng,
                         const mpz_class& quantum = 1);

// Querying-party side: centred value of dec(enc_masked), floor-divided by
// 2^shift, reduced into the ring.
ring::RingValue masked_to_ring_share(const mpz_class& decrypted, const mpz_class& n,
                                     unsigned shift, ring::FixedPointParams fp);
// Answering-party side: mask / 2^shift reduced into the ring. The masks
// drawn with quantum 2^shift divide exactly, so both shares agree with
// floor(logit / 2^shift) once added.
ring::RingValue mask_to_ring_share(const mpz_class& mask, unsigned shift,
                                   ring::FixedPointParams fp);

mpz_class uniform_mpz_below(const mpz_class& bound, Rng& rng);

// Only the ideal backend can be opened without the secret key; used by the
// ideal secure-classification functionality for non-linear models.
mpz_class ideal_open(const PublicKey& pk, const Ciphertext& c);

}  // namespace cclab::ahe
