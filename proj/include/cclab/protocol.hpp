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

// Role state machines for one labelling session.
//
//   1a  QP -> AP_i   Query          public key, Enc(x)
//   1b  AP_i -> QP   MaskedLogits   Enc(logits - mask)
//   1c  AP_i <-> QP  Gc2pc          AP garbles, QP evaluates; QP learns
//                                   s_i = onehot(argmax) - ŝ_i
//   2   AP_i -> PG   ShareToPG      ŝ_i
//   3   PG <-> QP    FinalGc2pc     PG garbles ŝ = Σ ŝ_i + noise, QP
//                                   evaluates with s = Σ s_i and learns
//                                   argmax(ŝ + s)
//
// Every role is a sequential function over its endpoints. run_session wires
// them together, one thread per answering party and one for the guardian.
// Any failure sends Abort to every peer of the failing role; nothing is
// charged to the querying party's ledger unless a label comes out.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cclab/ahe.hpp"
#include "cclab/dpcore.hpp"
#include "cclab/ring.hpp"
#include "cclab/step_channel.hpp"
#include "cclab/transport.hpp"
#include "cclab/twopc.hpp"

namespace cclab::proto {

struct SessionConfig {
  unsigned k = 5;
  ring::FixedPointParams fp{};
  unsigned sec_bits = 40;
  ahe::Backend ahe = ahe::Backend::Ideal;
  gc::TwoPcOptions twopc{gc::TwoPcBackend::Ideal, gc::OtBackend::DiffieHellman, true};
  Millis timeout = kDefaultStepTimeout;

  // ParamError on inconsistent settings.
  void validate() const;
};

// An answering party's model as the protocol sees it. Linear models run
// under encryption with W at scale 2^f and b at scale 2^2f. Any other model
// is an opaque function from encoded features to logits at scale 2^2f and
// therefore needs the ideal AHE backend.
struct AnsweringModel {
  enum class Kind : std::uint8_t { Linear, Opaque };
  Kind kind = Kind::Linear;
  ahe::IntMatrix weights;
  std::vector<std::int64_t> bias;
  std::function<std::vector<std::int64_t>(std::span<const std::int64_t>)> opaque;
  std::size_t input_dim = 0;
  std::size_t output_dim = 0;
  // Upper bound on |logit| at scale 2^2f; sizes the statistical mask.
  std::int64_t max_logit_bound = 1;

  static AnsweringModel linear(ahe::IntMatrix w, std::vector<std::int64_t> b,
                               std::int64_t max_logit_bound);
};

// Logits at scale 2^2f computed in the clear from encoded features.
std::vector<std::int64_t> plaintext_logits(const AnsweringModel& m,
                                           std::span<const std::int64_t> x_encoded);
// Vote the protocol produces for this model: argmax of floor(logit / 2^f),
// lowest index on ties.
unsigned plaintext_vote(const AnsweringModel& m, std::span<const std::int64_t> x_encoded,
                        ring::FixedPointParams fp);

std::vector<std::int64_t> encode_features(std::span<const double> x, ring::FixedPointParams fp);

struct QueryingParty {
  std::string id = "qp";
  ahe::KeyPair keys;
  dp::RdpLedger ledger;
  dp::NoiseSpec noise;  // what the guardian adds; the ledger charges for it
};

struct AnsweringParty {
  std::string id;
  AnsweringModel model;
  std::uint64_t seed = 0;
};

struct PrivacyGuardian {
  dp::NoiseSpec noise;
  std::uint64_t seed = 0;
};

// Noise stream the guardian uses for `session`; exposed for oracles.
Rng pg_noise_rng(std::uint64_t pg_seed, const SessionId& session);

struct SessionTimings {
  double query_s = 0;         // 1a
  double share_s = 0;         // 1b + 1c
  double aggregate_s = 0;     // 2 + 3
};

enum class Outcome : std::uint8_t { Label, Refused, Aborted };

struct SessionResult {
  Outcome outcome = Outcome::Aborted;
  unsigned label = 0;
  std::string abort_reason;
  std::optional<StepTag> failed_step;
  SessionId session{};
  SessionTimings timings;
  // qp, ap0..ap{K-2}, pg; empty when Refused.
  std::vector<SessionTranscript> transcripts;
};

// Ring vectors in ShareToPG payloads: u32 count, then ceil(w/8) bytes per
// value, little-endian.
Bytes encode_ring_vector(std::span<const ring::RingValue> v);
std::vector<ring::RingValue> decode_ring_vector(std::span<const std::uint8_t> bytes,
                                                ring::FixedPointParams fp);

// Answering party, steps 1a to 2. Learns the session id from the Query.
// Throws ProtocolAbort after notifying both peers on any failure
// ("dimension" for a malformed query).
void answer_query(const SessionConfig& cfg, const AnsweringParty& ap, Endpoint& qp, Endpoint& pg);

// Σ ŝ_i + noise mod 2^w; ProtocolAbort("missing shares") unless exactly
// `expected` vectors of length k arrive.
std::vector<ring::RingValue> pg_aggregate(std::span<const std::vector<ring::RingValue>> shares,
                                          std::size_t expected, const dp::NoiseSpec& noise,
                                          Rng& rng, ring::FixedPointParams fp, unsigned k);

// Privacy guardian, steps 2 and 3.
void guard_session(const SessionConfig& cfg, const PrivacyGuardian& pg,
                   std::span<Endpoint* const> aps, Endpoint& qp);

struct QueryResult {
  unsigned label = 0;
  SessionTimings timings;
};

// Querying party, steps 1a to 3, given open endpoints. Does not touch the
// ledger; run_session charges it.
QueryResult issue_query(const SessionConfig& cfg, const QueryingParty& qp, const SessionId& session,
                        std::span<const double> x, std::span<Endpoint* const> aps, Endpoint& pg,
                        Rng& rng);

// Full session. Refused (no traffic) when the ledger would exceed its
// budget; the ledger is charged once on Label.
SessionResult run_session(const SessionConfig& cfg, QueryingParty& qp,
                          std::span<const AnsweringParty> aps, const PrivacyGuardian& pg,
                          std::span<const double> x, TransportFactory& transport,
                          std::uint64_t session_seed);

}  // namespace cclab::proto
