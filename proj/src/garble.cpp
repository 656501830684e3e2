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
#include "cclab/garble.hpp"

#include <sodium.h>

#include <cstring>
#include <string>

#include "cclab/errors.hpp"

namespace cclab::gc {

namespace {

using Row = std::array<std::uint8_t, kRowBytes>;

Row row_pad(const Label& a, const Label& b, std::uint64_t gate_id) {
  std::uint8_t in[40];
  std::memcpy(in, a.bytes.data(), 16);
  std::memcpy(in + 16, b.bytes.data(), 16);
  for (int i = 0; i < 8; ++i) in[32 + i] = static_cast<std::uint8_t>(gate_id >> (8 * i));
  std::uint8_t digest[crypto_hash_sha256_BYTES];
  crypto_hash_sha256(digest, in, sizeof(in));
  Row r;
  std::memcpy(r.data(), digest, kRowBytes);
  return r;
}

Label random_label(Rng& rng) {
  Label l;
  rng.fill(l.bytes);
  return l;
}

bool needs_table(GateKind k, bool free_xor) { return k == GateKind::And || !free_xor; }

bool gate_fn(GateKind k, bool a, bool b) {
  return k == GateKind::And ? (a && b) : (a != b);
}

}  // namespace

std::size_t garbled_gate_count(const BooleanCircuit& c, bool free_xor) {
  std::size_t n = 0;
  for (const auto& g : c.gates) n += needs_table(g.kind, free_xor);
  return n;
}

std::vector<Label> InputEncoding::encode_garbler(const Bits& bits) const {
  if (bits.size() != garbler.size()) throw LengthMismatch("garbler input width mismatch");
  std::vector<Label> out;
  out.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out.push_back(garbler[i][bits[i] ? 1 : 0]);
  return out;
}

std::vector<Label> InputEncoding::encode_evaluator(const Bits& bits) const {
  if (bits.size() != evaluator.size()) throw LengthMismatch("evaluator input width mismatch");
  std::vector<Label> out;
  out.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) out.push_back(evaluator[i][bits[i] ? 1 : 0]);
  return out;
}

Garbling garble(const BooleanCircuit& c, Rng& rng, GarbleOptions options) {
  c.validate();
  ensure_sodium();
  const bool fx = options.free_xor;
  Label delta = random_label(rng);
  delta.bytes[0] |= 1;

  // zero[w] is the label for value 0; one label is zero ^ delta under
  // free-XOR and an independent label with the opposite permute bit otherwise.
  std::vector<Label> zero(c.wire_count), one(c.wire_count);
  auto fresh_pair = [&](WireId w) {
    zero[w] = random_label(rng);
    if (fx) {
      one[w] = zero[w] ^ delta;
    } else {
      one[w] = random_label(rng);
      one[w].bytes[0] = static_cast<std::uint8_t>((one[w].bytes[0] & 0xfe) |
                                                  (zero[w].permute_bit() ? 0 : 1));
    }
  };
  fresh_pair(BooleanCircuit::kZero);
  fresh_pair(BooleanCircuit::kOne);
  for (auto w : c.garbler_inputs) fresh_pair(w);
  for (auto w : c.evaluator_inputs) fresh_pair(w);

  Garbling out;
  out.circuit.circuit_hash = c.hash();
  out.circuit.free_xor = fx;
  out.circuit.tables.reserve(garbled_gate_count(c, fx) * 4 * kRowBytes);

  std::uint64_t gate_id = 0;
  for (const auto& g : c.gates) {
    const WireId in1 = g.kind == GateKind::Not ? BooleanCircuit::kOne : g.in1;
    const GateKind kind = g.kind == GateKind::Not ? GateKind::Xor : g.kind;
    if (!needs_table(kind, fx)) {
      zero[g.out] = zero[g.in0] ^ zero[in1];
      one[g.out] = zero[g.out] ^ delta;
      ++gate_id;
      continue;
    }
    fresh_pair(g.out);
    std::array<Row, 4> rows{};
    for (int va = 0; va < 2; ++va) {
      for (int vb = 0; vb < 2; ++vb) {
        const Label& la = va ? one[g.in0] : zero[g.in0];
        const Label& lb = vb ? one[in1] : zero[in1];
        const Label& lo = gate_fn(kind, va, vb) ? one[g.out] : zero[g.out];
        Row r = row_pad(la, lb, gate_id);
        for (std::size_t i = 0; i < 16; ++i) r[i] ^= lo.bytes[i];
        rows[2 * la.permute_bit() + lb.permute_bit()] = r;
      }
    }
    for (const auto& r : rows) out.circuit.tables.insert(out.circuit.tables.end(), r.begin(), r.end());
    ++gate_id;
  }

  out.circuit.constant_labels = {zero[BooleanCircuit::kZero], one[BooleanCircuit::kOne]};
  out.circuit.output_decode.reserve(c.outputs.size());
  for (const auto& o : c.outputs) out.circuit.output_decode.push_back(zero[o.wire].permute_bit());
  for (auto w : c.garbler_inputs) out.inputs.garbler.push_back({zero[w], one[w]});
  for (auto w : c.evaluator_inputs) out.inputs.evaluator.push_back({zero[w], one[w]});
  return out;
}

std::vector<Label> evaluate(const BooleanCircuit& c, const GarbledCircuit& gc,
                            const std::vector<Label>& garbler_labels,
                            const std::vector<Label>& evaluator_labels) {
  if (garbler_labels.size() != c.garbler_inputs.size() ||
      evaluator_labels.size() != c.evaluator_inputs.size()) {
    throw LengthMismatch("evaluate: label count does not match circuit inputs");
  }
  if (gc.tables.size() != garbled_gate_count(c, gc.free_xor) * 4 * kRowBytes) {
    throw DecryptionFailure("evaluate: garbled table size does not match circuit");
  }
  ensure_sodium();
  std::vector<Label> v(c.wire_count);
  v[BooleanCircuit::kZero] = gc.constant_labels[0];
  v[BooleanCircuit::kOne] = gc.constant_labels[1];
  for (std::size_t i = 0; i < garbler_labels.size(); ++i) v[c.garbler_inputs[i]] = garbler_labels[i];
  for (std::size_t i = 0; i < evaluator_labels.size(); ++i) {
    v[c.evaluator_inputs[i]] = evaluator_labels[i];
  }
  std::size_t table = 0;
  std::uint64_t gate_id = 0;
  for (const auto& g : c.gates) {
    const WireId in1 = g.kind == GateKind::Not ? BooleanCircuit::kOne : g.in1;
    const GateKind kind = g.kind == GateKind::Not ? GateKind::Xor : g.kind;
    const Label& la = v[g.in0];
    const Label& lb = v[in1];
    if (!needs_table(kind, gc.free_xor)) {
      v[g.out] = la ^ lb;
      ++gate_id;
      continue;
    }
    const std::size_t row = 2 * la.permute_bit() + lb.permute_bit();
    const std::uint8_t* cipher = gc.tables.data() + (table * 4 + row) * kRowBytes;
    const Row pad = row_pad(la, lb, gate_id);
    Label out;
    for (std::size_t i = 0; i < 16; ++i) out.bytes[i] = cipher[i] ^ pad[i];
    for (std::size_t i = 16; i < kRowBytes; ++i) {
      if ((cipher[i] ^ pad[i]) != 0) {
        throw DecryptionFailure("evaluate: gate " + std::to_string(gate_id) +
                                " row failed its redundancy check");
      }
    }
    v[g.out] = out;
    ++table;
    ++gate_id;
  }
  std::vector<Label> outputs;
  outputs.reserve(c.outputs.size());
  for (const auto& o : c.outputs) outputs.push_back(v[o.wire]);
  return outputs;
}

Bits decode_outputs(const GarbledCircuit& gc, const std::vector<Label>& output_labels) {
  if (output_labels.size() != gc.output_decode.size()) {
    throw LengthMismatch("decode_outputs: label count does not match decode table");
  }
  Bits out;
  out.reserve(output_labels.size());
  for (std::size_t i = 0; i < output_labels.size(); ++i) {
    out.push_back(output_labels[i].permute_bit() != gc.output_decode[i]);
  }
  return out;
}

}  // namespace cclab::gc
