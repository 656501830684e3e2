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
#include "cclab/protocol.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <initializer_list>
#include <memory>
#include <thread>

#include "cclab/builders.hpp"
#include "cclab/errors.hpp"

namespace cclab::proto {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::span<const std::uint8_t> as_bytes(const SessionId& s) { return {s.data(), s.size()}; }

// Short reason word for an abort caused by a local exception.
std::string reason_for(const std::exception& e) {
  if (auto* a = dynamic_cast<const ProtocolAbort*>(&e)) return a->reason();
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "dimension";
  if (dynamic_cast<const TransportError*>(&e)) return "transport";
  if (dynamic_cast<const SessionMismatch*>(&e)) return "session mismatch";
  if (dynamic_cast<const DecryptionFailure*>(&e)) return "2pc";
  if (dynamic_cast<const FrameError*>(&e)) return "malformed message";
  if (dynamic_cast<const KeyMismatch*>(&e)) return "key mismatch";
  if (dynamic_cast<const OverflowBudgetExceeded*>(&e)) return "overflow";
  return "internal";
}

void notify_abort(std::span<Endpoint* const> peers, const SessionId& sid, StepTag step,
                  const std::string& reason) {
  for (Endpoint* ep : peers) {
    try {
      ep->send(make_abort(sid, step, reason));
    } catch (const TransportError&) {
      // peer already gone
    }
  }
}

// Runs `body`; on any failure tells every peer and rethrows as
// ProtocolAbort.
template <typename F>
void guarded(std::span<Endpoint* const> peers, const SessionId& sid, const StepTag& step, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    const std::string reason = reason_for(e);
    notify_abort(peers, sid, step, reason);
    if (auto* a = dynamic_cast<const ProtocolAbort*>(&e)) throw *a;
    throw ProtocolAbort(reason, e.what());
  }
}

gc::Bits ring_bits(std::span<const ring::RingValue> v, unsigned w) {
  std::vector<std::uint64_t> raw(v.size());
  std::transform(v.begin(), v.end(), raw.begin(), [](const ring::RingValue& r) { return r.raw(); });
  return gc::to_bits(raw, w);
}

std::vector<ring::RingValue> ring_from_bits(const gc::Bits& bits, ring::FixedPointParams fp) {
  std::vector<ring::RingValue> out;
  for (std::uint64_t r : gc::from_bits(bits, fp.width_bits)) out.emplace_back(r, fp);
  return out;
}

std::vector<std::int64_t> argmax_input(std::span<const std::int64_t> logits, unsigned shift) {
  std::vector<std::int64_t> out(logits.size());
  for (std::size_t j = 0; j < logits.size(); ++j) {
    // floor division by 2^shift
    out[j] = logits[j] >> shift;
  }
  return out;
}

}  // namespace

void SessionConfig::validate() const {
  fp.validate();
  if (k < 2) throw ParamError("sessions need k >= 2");
  if (sec_bits < 1 || sec_bits > 256) throw ParamError("sec_bits out of range");
  if (timeout.count() <= 0) throw ParamError("timeout must be positive");
}

AnsweringModel AnsweringModel::linear(ahe::IntMatrix w, std::vector<std::int64_t> b,
                                      std::int64_t max_logit_bound) {
  if (b.size() != w.rows) throw DimensionMismatch("bias length differs from weight rows");
  AnsweringModel m;
  m.kind = Kind::Linear;
  m.input_dim = w.cols;
  m.output_dim = w.rows;
  m.weights = std::move(w);
  m.bias = std::move(b);
  m.max_logit_bound = std::max<std::int64_t>(1, max_logit_bound);
  return m;
}

std::vector<std::int64_t> plaintext_logits(const AnsweringModel& m,
                                           std::span<const std::int64_t> x) {
  if (x.size() != m.input_dim) throw DimensionMismatch("feature length differs from model input");
  if (m.kind == AnsweringModel::Kind::Opaque) return m.opaque(x);
  std::vector<std::int64_t> out(m.weights.rows);
  for (std::size_t r = 0; r < m.weights.rows; ++r) {
    __int128 acc = m.bias[r];
    for (std::size_t c = 0; c < m.weights.cols; ++c) acc += static_cast<__int128>(m.weights.at(r, c)) * x[c];
    out[r] = static_cast<std::int64_t>(acc);
  }
  return out;
}

unsigned plaintext_vote(const AnsweringModel& m, std::span<const std::int64_t> x,
                        ring::FixedPointParams fp) {
  const auto shifted = argmax_input(plaintext_logits(m, x), fp.frac_bits);
  // Wrap into w-bit two's complement, as the circuit sees it.
  unsigned best = 0;
  std::int64_t best_v = 0;
  for (std::size_t j = 0; j < shifted.size(); ++j) {
    const std::int64_t v = ring::RingValue::from_signed(shifted[j], fp).to_signed();
    if (j == 0 || v > best_v) {
      best = static_cast<unsigned>(j);
      best_v = v;
    }
  }
  return best;
}

std::vector<std::int64_t> encode_features(std::span<const double> x, ring::FixedPointParams fp) {
  std::vector<std::int64_t> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = ring::encode_fixed(x[i], fp).to_signed();
  return out;
}

Rng pg_noise_rng(std::uint64_t pg_seed, const SessionId& session) {
  return Rng::derive(pg_seed, as_bytes(session));
}

Bytes encode_ring_vector(std::span<const ring::RingValue> v) {
  ByteWriter w;
  w.u32_be(static_cast<std::uint32_t>(v.size()));
  if (!v.empty()) {
    const std::size_t width = (v.front().params().width_bits + 7) / 8;
    for (const auto& r : v) w.uint_le(r.raw(), width);
  }
  return std::move(w).take();
}

std::vector<ring::RingValue> decode_ring_vector(std::span<const std::uint8_t> bytes,
                                                ring::FixedPointParams fp) {
  ByteReader r(bytes);
  const std::uint32_t n = r.u32_be();
  const std::size_t width = (fp.width_bits + 7) / 8;
  if (static_cast<std::size_t>(n) * width != r.remaining()) throw FrameError("ring vector length");
  std::vector<ring::RingValue> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint64_t raw = r.uint_le(width);
    if (raw > fp.modulus_mask()) throw FrameError("ring value out of range");
    out.emplace_back(raw, fp);
  }
  return out;
}

void answer_query(const SessionConfig& cfg, const AnsweringParty& ap, Endpoint& qp, Endpoint& pg) {
  Endpoint* const peers[] = {&qp, &pg};
  SessionId sid{};
  StepTag step = StepTag::Query;
  guarded(peers, sid, step, [&] {
    ProtocolMessage q = qp.receive(cfg.timeout);
    if (q.tag == StepTag::Abort) throw ProtocolAbort(parse_abort(q).second, "querying party aborted");
    if (q.tag != StepTag::Query) throw ProtocolAbort("unexpected step");
    sid = q.session;
    Rng rng = Rng::derive(ap.seed, as_bytes(sid));

    ahe::PublicKey pk;
    std::vector<ahe::Ciphertext> features;
    try {
      ByteReader r(q.payload);
      pk = ahe::PublicKey::deserialize(r.blob());
      features = ahe::deserialize_ciphertexts(r.raw(r.remaining()), pk);
    } catch (const FrameError& e) {
      throw ProtocolAbort("malformed query", e.what());
    }
    if (pk.backend() != cfg.ahe) throw ProtocolAbort("backend mismatch");
    if (features.size() != ap.model.input_dim) {
      throw ProtocolAbort("dimension", "query has " + std::to_string(features.size()) + " features");
    }
    if (ap.model.output_dim != cfg.k) throw ProtocolAbort("dimension", "model output differs from k");

    step = StepTag::MaskedLogits;
    std::vector<ahe::Ciphertext> logits;
    if (ap.model.kind == AnsweringModel::Kind::Linear) {
      logits = ahe::encrypted_linear_infer(pk, features, ap.model.weights, ap.model.bias, cfg.fp);
    } else {
      if (pk.backend() != ahe::Backend::Ideal) throw ProtocolAbort("backend mismatch", "opaque model");
      std::vector<std::int64_t> x(features.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = ahe::lift_centered(ahe::ideal_open(pk, features[i]), pk.n()).get_si();
      }
      for (std::int64_t v : ap.model.opaque(x)) {
        logits.push_back(ahe::enc(pk, ahe::to_residue(mpz_class(static_cast<long>(v)), pk.n()), rng));
      }
    }
    const mpz_class quantum = mpz_class(1) << cfg.fp.frac_bits;
    const ahe::MaskedLogits masked = ahe::mask_logits(
        pk, logits, mpz_class(static_cast<long>(ap.model.max_logit_bound)), cfg.sec_bits, rng, quantum);
    qp.send({sid, StepTag::MaskedLogits, ahe::serialize_ciphertexts(masked.enc_masked)});

    step = StepTag::Gc2pc;
    std::vector<ring::RingValue> mine;
    for (const auto& m : masked.mask) mine.push_back(ahe::mask_to_ring_share(m, cfg.fp.frac_bits, cfg.fp));
    const auto out_mask = ring::uniform_vector(cfg.k, cfg.fp, rng);
    gc::Bits bits = ring_bits(mine, cfg.fp.width_bits);
    const gc::Bits mask_bits = ring_bits(out_mask, cfg.fp.width_bits);
    bits.insert(bits.end(), mask_bits.begin(), mask_bits.end());
    StepChannel ch(qp, sid, StepTag::Gc2pc, cfg.timeout);
    const auto circuit = gc::build_onehot_argmax_circuit(cfg.k, cfg.fp.width_bits);
    gc::run_2pc(gc::Role::Garbler, circuit, bits, ch, rng, cfg.twopc);

    step = StepTag::ShareToPG;
    pg.send({sid, StepTag::ShareToPG, encode_ring_vector(out_mask)});
  });
}

std::vector<ring::RingValue> pg_aggregate(std::span<const std::vector<ring::RingValue>> shares,
                                          std::size_t expected, const dp::NoiseSpec& noise,
                                          Rng& rng, ring::FixedPointParams fp, unsigned k) {
  if (shares.size() != expected) throw ProtocolAbort("missing shares");
  const auto draws = dp::sample_noise_vector(noise, k, rng, fp.width_bits);
  std::vector<ring::RingValue> acc(k, ring::RingValue(0, fp));
  for (std::size_t j = 0; j < k; ++j) acc[j] = ring::RingValue::from_signed(draws[j], fp);
  for (const auto& s : shares) {
    if (s.size() != k) throw ProtocolAbort("dimension", "share vector length");
    acc = ring::vec_add_mod(acc, s);
  }
  return acc;
}

void guard_session(const SessionConfig& cfg, const PrivacyGuardian& pg,
                   std::span<Endpoint* const> aps, Endpoint& qp) {
  std::vector<Endpoint*> peers(aps.begin(), aps.end());
  peers.push_back(&qp);
  SessionId sid{};
  StepTag step = StepTag::ShareToPG;
  guarded(peers, sid, step, [&] {
    std::vector<std::vector<ring::RingValue>> shares;
    for (std::size_t i = 0; i < aps.size(); ++i) {
      ProtocolMessage m;
      try {
        m = aps[i]->receive(cfg.timeout);
      } catch (const ProtocolAbort& e) {
        throw ProtocolAbort("missing shares", e.what());
      }
      if (m.tag == StepTag::Abort) throw ProtocolAbort(parse_abort(m).second, "answering party aborted");
      if (m.tag != StepTag::ShareToPG) throw ProtocolAbort("unexpected step");
      if (i == 0) {
        sid = m.session;
      } else if (m.session != sid) {
        throw SessionMismatch("share for a different session");
      }
      shares.push_back(decode_ring_vector(m.payload, cfg.fp));
    }
    Rng noise_rng = pg_noise_rng(pg.seed, sid);
    const auto noisy = pg_aggregate(shares, aps.size(), pg.noise, noise_rng, cfg.fp, cfg.k);

    step = StepTag::FinalGc2pc;
    Rng garble_rng = noise_rng.fork("garble");
    StepChannel ch(qp, sid, StepTag::FinalGc2pc, cfg.timeout);
    const auto circuit = gc::build_noisy_sum_argmax_circuit(cfg.k, cfg.fp.width_bits);
    gc::run_2pc(gc::Role::Garbler, circuit, ring_bits(noisy, cfg.fp.width_bits), ch, garble_rng,
                cfg.twopc);
  });
}

QueryResult issue_query(const SessionConfig& cfg, const QueryingParty& qp, const SessionId& sid,
                        std::span<const double> x, std::span<Endpoint* const> aps, Endpoint& pg,
                        Rng& rng) {
  std::vector<Endpoint*> peers(aps.begin(), aps.end());
  peers.push_back(&pg);
  QueryResult result;
  StepTag step = StepTag::Query;
  guarded(peers, sid, step, [&] {
    const ahe::PublicKey& pk = qp.keys.pk;
    if (pk.backend() != cfg.ahe) throw ConfigError("key backend differs from the session backend");
    const auto t0 = Clock::now();
    std::vector<ahe::Ciphertext> cts;
    for (std::int64_t v : encode_features(x, cfg.fp)) {
      cts.push_back(ahe::enc(pk, ahe::to_residue(mpz_class(static_cast<long>(v)), pk.n()), rng));
    }
    ByteWriter w;
    w.blob(pk.serialize());
    w.raw(ahe::serialize_ciphertexts(cts));
    const Bytes payload = std::move(w).take();
    for (Endpoint* ep : aps) ep->send({sid, StepTag::Query, payload});
    result.timings.query_s = seconds_since(t0);

    const auto t1 = Clock::now();
    const auto circuit = gc::build_onehot_argmax_circuit(cfg.k, cfg.fp.width_bits);
    std::vector<ring::RingValue> sum(cfg.k, ring::RingValue(0, cfg.fp));
    for (Endpoint* ep : aps) {
      step = StepTag::MaskedLogits;
      const ProtocolMessage m = expect_message(*ep, sid, StepTag::MaskedLogits, cfg.timeout);
      const auto masked = ahe::deserialize_ciphertexts(m.payload, pk);
      if (masked.size() != cfg.k) throw ProtocolAbort("dimension", "masked logit count");
      std::vector<ring::RingValue> mine;
      for (const auto& c : masked) {
        mine.push_back(ahe::masked_to_ring_share(ahe::dec(qp.keys.sk, c), pk.n(), cfg.fp.frac_bits, cfg.fp));
      }
      step = StepTag::Gc2pc;
      StepChannel ch(*ep, sid, StepTag::Gc2pc, cfg.timeout);
      const gc::Bits out = gc::run_2pc(gc::Role::Evaluator, circuit, ring_bits(mine, cfg.fp.width_bits),
                                       ch, rng, cfg.twopc);
      sum = ring::vec_add_mod(sum, ring_from_bits(out, cfg.fp));
    }
    result.timings.share_s = seconds_since(t1);

    const auto t2 = Clock::now();
    step = StepTag::FinalGc2pc;
    StepChannel ch(pg, sid, StepTag::FinalGc2pc, cfg.timeout);
    const auto final_circuit = gc::build_noisy_sum_argmax_circuit(cfg.k, cfg.fp.width_bits);
    const gc::Bits out = gc::run_2pc(gc::Role::Evaluator, final_circuit,
                                     ring_bits(sum, cfg.fp.width_bits), ch, rng, cfg.twopc);
    const auto idx = gc::from_bits(out, gc::index_width(cfg.k));
    if (idx.size() != 1 || idx[0] >= cfg.k) throw ProtocolAbort("2pc", "label out of range");
    result.label = static_cast<unsigned>(idx[0]);
    result.timings.aggregate_s = seconds_since(t2);
  });
  return result;
}

namespace {

std::string aborted(const std::string& reason) { return "Aborted(" + reason + ")"; }

std::unique_ptr<Endpoint> record(std::unique_ptr<Endpoint> ep, SessionTranscript* log,
                                 std::string peer) {
  return std::make_unique<RecordingEndpoint>(std::move(ep), log, std::move(peer));
}

}  // namespace

SessionResult run_session(const SessionConfig& cfg, QueryingParty& qp,
                          std::span<const AnsweringParty> aps, const PrivacyGuardian& pg,
                          std::span<const double> x, TransportFactory& transport,
                          std::uint64_t session_seed) {
  cfg.validate();
  if (aps.empty()) throw ConfigError("a session needs at least one answering party");
  if (qp.keys.pk.backend() != cfg.ahe) throw ConfigError("key backend differs from the session backend");
  for (const auto& ap : aps) {
    if (ap.model.output_dim != cfg.k) throw ConfigError("model '" + ap.id + "' has the wrong class count");
    if (ap.model.kind == AnsweringModel::Kind::Opaque && cfg.ahe != ahe::Backend::Ideal) {
      throw ConfigError("model '" + ap.id + "' is not linear and needs the ideal AHE backend");
    }
  }

  SessionResult res;
  if (dp::admit_query(qp.ledger, qp.noise) == dp::Admission::Refuse) {
    res.outcome = Outcome::Refused;
    return res;
  }

  Rng rng = Rng::derive(session_seed, "cclab.session.qp");
  rng.fill(res.session);
  const SessionId sid = res.session;

  const std::size_t n = aps.size();
  res.transcripts.resize(n + 2);
  SessionTranscript& t_qp = res.transcripts[0];
  SessionTranscript& t_pg = res.transcripts[n + 1];
  t_qp.owner = "qp";
  t_pg.owner = "pg";

  std::vector<std::unique_ptr<Endpoint>> qp_to_ap(n), ap_to_qp(n), ap_to_pg(n), pg_to_ap(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string name = "ap" + std::to_string(i);
    res.transcripts[i + 1].owner = name;
    auto a = transport.connect();
    qp_to_ap[i] = record(std::move(a.first), &t_qp, name);
    ap_to_qp[i] = record(std::move(a.second), &res.transcripts[i + 1], "qp");
    auto b = transport.connect();
    ap_to_pg[i] = record(std::move(b.first), &res.transcripts[i + 1], "pg");
    pg_to_ap[i] = record(std::move(b.second), &t_pg, name);
  }
  auto c = transport.connect();
  auto qp_to_pg = record(std::move(c.first), &t_qp, "pg");
  auto pg_to_qp = record(std::move(c.second), &t_pg, "qp");

  std::vector<std::thread> threads;
  threads.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    threads.emplace_back([&, i] {
      SessionTranscript& t = res.transcripts[i + 1];
      try {
        answer_query(cfg, aps[i], *ap_to_qp[i], *ap_to_pg[i]);
        t.outcome = "Completed";
      } catch (const ProtocolAbort& e) {
        t.outcome = aborted(e.reason());
      }
      ap_to_qp[i]->close();
      ap_to_pg[i]->close();
    });
  }
  threads.emplace_back([&] {
    std::vector<Endpoint*> eps;
    for (auto& e : pg_to_ap) eps.push_back(e.get());
    try {
      guard_session(cfg, pg, eps, *pg_to_qp);
      t_pg.outcome = "Completed";
    } catch (const ProtocolAbort& e) {
      t_pg.outcome = aborted(e.reason());
    }
    for (auto* e : eps) e->close();
    pg_to_qp->close();
  });

  std::vector<Endpoint*> qp_eps;
  for (auto& e : qp_to_ap) qp_eps.push_back(e.get());
  StepTag failed = StepTag::Query;
  try {
    const QueryResult q = issue_query(cfg, qp, sid, x, qp_eps, *qp_to_pg, rng);
    res.outcome = Outcome::Label;
    res.label = q.label;
    res.timings = q.timings;
    t_qp.outcome = "Label(" + std::to_string(q.label) + ")";
  } catch (const ProtocolAbort& e) {
    res.outcome = Outcome::Aborted;
    res.abort_reason = e.reason();
    t_qp.outcome = aborted(e.reason());
    for (const auto& entry : t_qp.entries) {
      if (entry.message.tag != StepTag::Abort) failed = entry.message.tag;
    }
    res.failed_step = failed;
  }
  for (auto* e : qp_eps) e->close();
  qp_to_pg->close();
  for (auto& t : threads) t.join();

  if (res.outcome == Outcome::Label) qp.ledger.charge(qp.noise);
  return res;
}

}  // namespace cclab::proto
