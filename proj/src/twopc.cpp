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
#include "cclab/twopc.hpp"

#include <algorithm>
#include <string>

#include "cclab/errors.hpp"
#include "cclab/garble.hpp"

namespace cclab::gc {

namespace {

using proto::TwoPcKind;

void write_bits(ByteWriter& w, const Bits& bits) {
  w.u32_be(static_cast<std::uint32_t>(bits.size()));
  for (bool b : bits) w.u8(b ? 1 : 0);
}

Bits read_bits(ByteReader& r) {
  const std::uint32_t n = r.u32_be();
  if (n > r.remaining()) throw FrameError("bit vector longer than payload");
  Bits out(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint8_t v = r.u8();
    if (v > 1) throw FrameError("bit value out of range");
    out[i] = v != 0;
  }
  return out;
}

void write_labels(ByteWriter& w, const std::vector<Label>& labels) {
  w.u32_be(static_cast<std::uint32_t>(labels.size()));
  for (const auto& l : labels) w.raw(l.bytes);
}

Label read_label(ByteReader& r) {
  Label l;
  auto s = r.raw(l.bytes.size());
  std::copy(s.begin(), s.end(), l.bytes.begin());
  return l;
}

std::vector<Label> read_labels(ByteReader& r) {
  const std::uint32_t n = r.u32_be();
  if (static_cast<std::size_t>(n) * 16 > r.remaining()) throw FrameError("label vector too long");
  std::vector<Label> out;
  out.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) out.push_back(read_label(r));
  return out;
}

bool has_shared_outputs(const BooleanCircuit& c) {
  return std::any_of(c.outputs.begin(), c.outputs.end(),
                     [](const OutputWire& o) { return o.policy == Disclosure::Both; });
}

Bits shared_subset(const BooleanCircuit& c, const Bits& all) {
  Bits out;
  for (std::size_t i = 0; i < c.outputs.size(); ++i) {
    if (c.outputs[i].policy == Disclosure::Both) out.push_back(all[i]);
  }
  return out;
}

Bits garbler_side(const BooleanCircuit& c, const Bits& bits, proto::StepChannel& ch, Rng& rng,
                  const TwoPcOptions& opt) {
  {
    ByteWriter w;
    const Digest h = c.hash();
    w.raw(h);
    w.u8(static_cast<std::uint8_t>(opt.backend));
    ch.send(TwoPcKind::CircuitHash, w.bytes());
  }

  if (opt.backend == TwoPcBackend::Ideal) {
    ByteWriter w;
    write_bits(w, bits);
    ch.send(TwoPcKind::IdealGarblerInputs, w.bytes());
  } else {
    Garbling g = garble(c, rng, GarbleOptions{opt.free_xor});
    {
      ByteWriter w;
      w.u8(g.circuit.free_xor ? 1 : 0);
      w.blob(g.circuit.tables);
      write_bits(w, g.circuit.output_decode);
      ch.send(TwoPcKind::GarbledTables, w.bytes());
    }
    {
      ByteWriter w;
      w.raw(g.circuit.constant_labels[0].bytes);
      w.raw(g.circuit.constant_labels[1].bytes);
      write_labels(w, g.inputs.encode_garbler(bits));
      ch.send(TwoPcKind::GarblerLabels, w.bytes());
    }
    std::vector<OtMessagePair> pairs;
    pairs.reserve(g.inputs.evaluator.size());
    for (const auto& lp : g.inputs.evaluator) {
      pairs.push_back({Bytes(lp[0].bytes.begin(), lp[0].bytes.end()),
                       Bytes(lp[1].bytes.begin(), lp[1].bytes.end())});
    }
    ot_send(pairs, ch, opt.ot, rng);
  }

  if (!has_shared_outputs(c)) return {};
  const Bytes body = ch.expect(TwoPcKind::OutputDisclosure);
  ByteReader r(body);
  Bits shared = read_bits(r);
  r.expect_done();
  const auto want = static_cast<std::size_t>(
      std::count_if(c.outputs.begin(), c.outputs.end(),
                    [](const OutputWire& o) { return o.policy == Disclosure::Both; }));
  if (shared.size() != want) throw ProtocolAbort("unexpected message", "disclosed output count");
  return shared;
}

Bits evaluator_side(const BooleanCircuit& c, const Bits& bits, proto::StepChannel& ch, Rng& rng,
                    const TwoPcOptions& opt) {
  {
    const Bytes body = ch.expect(TwoPcKind::CircuitHash);
    ByteReader r(body);
    auto peer_hash = r.raw(32);
    const std::uint8_t peer_backend = r.u8();
    r.expect_done();
    const Digest h = c.hash();
    if (!std::equal(h.begin(), h.end(), peer_hash.begin()) ||
        peer_backend != static_cast<std::uint8_t>(opt.backend)) {
      ch.abort("circuit mismatch");
      throw SessionMismatch("2pc: peer circuit hash or backend differs");
    }
  }

  Bits all;
  if (opt.backend == TwoPcBackend::Ideal) {
    const Bytes body = ch.expect(TwoPcKind::IdealGarblerInputs);
    ByteReader r(body);
    Bits g = read_bits(r);
    r.expect_done();
    if (g.size() != c.garbler_inputs.size()) throw ProtocolAbort("unexpected message", "garbler input count");
    all = ideal_eval(c, g, bits);
  } else {
    GarbledCircuit gcirc;
    gcirc.circuit_hash = c.hash();
    {
      const Bytes body = ch.expect(TwoPcKind::GarbledTables);
      ByteReader r(body);
      gcirc.free_xor = r.u8() != 0;
      auto t = r.blob();
      gcirc.tables.assign(t.begin(), t.end());
      gcirc.output_decode = read_bits(r);
      r.expect_done();
    }
    std::vector<Label> garbler_labels;
    {
      const Bytes body = ch.expect(TwoPcKind::GarblerLabels);
      ByteReader r(body);
      gcirc.constant_labels[0] = read_label(r);
      gcirc.constant_labels[1] = read_label(r);
      garbler_labels = read_labels(r);
      r.expect_done();
    }
    if (garbler_labels.size() != c.garbler_inputs.size() ||
        gcirc.output_decode.size() != c.outputs.size()) {
      throw ProtocolAbort("unexpected message", "garbled circuit shape");
    }
    const auto raw = ot_receive(bits, 16, ch, opt.ot, rng);
    std::vector<Label> evaluator_labels;
    evaluator_labels.reserve(raw.size());
    for (const auto& m : raw) {
      Label l;
      std::copy(m.begin(), m.end(), l.bytes.begin());
      evaluator_labels.push_back(l);
    }
    all = decode_outputs(gcirc, evaluate(c, gcirc, garbler_labels, evaluator_labels));
  }

  if (has_shared_outputs(c)) {
    ByteWriter w;
    write_bits(w, shared_subset(c, all));
    ch.send(TwoPcKind::OutputDisclosure, w.bytes());
  }
  return all;
}

}  // namespace

Bits run_2pc(Role role, const BooleanCircuit& circuit, const Bits& my_bits,
             proto::StepChannel& ch, Rng& rng, const TwoPcOptions& options) {
  const std::size_t want = role == Role::Garbler ? circuit.garbler_inputs.size()
                                                 : circuit.evaluator_inputs.size();
  if (my_bits.size() != want) {
    throw LengthMismatch("2pc: expected " + std::to_string(want) + " input bits, got " +
                         std::to_string(my_bits.size()));
  }
  return role == Role::Garbler ? garbler_side(circuit, my_bits, ch, rng, options)
                               : evaluator_side(circuit, my_bits, ch, rng, options);
}

}  // namespace cclab::gc
