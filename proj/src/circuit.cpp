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
#include "cclab/circuit.hpp"

#include <string>

#include "cclab/errors.hpp"

namespace cclab::gc {

void BooleanCircuit::validate() const {
  if (wire_count < 2) throw ParamError("circuit: constant wires missing");
  std::vector<bool> written(wire_count, false);
  written[kZero] = written[kOne] = true;
  auto write = [&](WireId w, const char* what) {
    if (w >= wire_count) throw ParamError(std::string("circuit: ") + what + " wire out of range");
    if (written[w]) throw ParamError("circuit: wire " + std::to_string(w) + " written twice");
    written[w] = true;
  };
  for (auto w : garbler_inputs) write(w, "garbler input");
  for (auto w : evaluator_inputs) write(w, "evaluator input");
  for (const auto& g : gates) {
    auto need = [&](WireId w) {
      if (w >= wire_count || !written[w]) {
        throw ParamError("circuit: gate reads wire " + std::to_string(w) + " before it is set");
      }
    };
    need(g.in0);
    if (g.kind != GateKind::Not) need(g.in1);
    write(g.out, "gate output");
  }
  for (const auto& o : outputs) {
    if (o.wire >= wire_count || !written[o.wire]) throw ParamError("circuit: output wire unset");
    if (o.policy != Disclosure::EvaluatorOnly && o.policy != Disclosure::Both) {
      throw ParamError("circuit: output without disclosure policy");
    }
  }
}

Digest BooleanCircuit::hash() const {
  ByteWriter w;
  static constexpr std::uint8_t kDomain[] = {'c', 'c', 'l', 'a', 'b', '.', 'c', 'i', 'r', 'c', 'u', 'i', 't'};
  w.raw(kDomain);
  w.u32_be(wire_count);
  w.u32_be(static_cast<std::uint32_t>(gates.size()));
  for (const auto& g : gates) {
    w.u8(static_cast<std::uint8_t>(g.kind));
    w.u32_be(g.in0);
    w.u32_be(g.kind == GateKind::Not ? 0 : g.in1);
    w.u32_be(g.out);
  }
  auto wires = [&](const std::vector<WireId>& v) {
    w.u32_be(static_cast<std::uint32_t>(v.size()));
    for (auto x : v) w.u32_be(x);
  };
  wires(garbler_inputs);
  wires(evaluator_inputs);
  w.u32_be(static_cast<std::uint32_t>(outputs.size()));
  for (const auto& o : outputs) {
    w.u32_be(o.wire);
    w.u8(static_cast<std::uint8_t>(o.policy));
  }
  return sha256(w.bytes());
}

std::size_t BooleanCircuit::and_count() const {
  std::size_t n = 0;
  for (const auto& g : gates) n += g.kind == GateKind::And;
  return n;
}

Bits ideal_eval(const BooleanCircuit& c, const Bits& garbler_bits,
                const Bits& evaluator_bits) {
  if (garbler_bits.size() != c.garbler_inputs.size() ||
      evaluator_bits.size() != c.evaluator_inputs.size()) {
    throw LengthMismatch("ideal_eval: input bit count does not match circuit");
  }
  std::vector<std::uint8_t> v(c.wire_count, 0);
  v[BooleanCircuit::kOne] = 1;
  for (std::size_t i = 0; i < garbler_bits.size(); ++i) v[c.garbler_inputs[i]] = garbler_bits[i];
  for (std::size_t i = 0; i < evaluator_bits.size(); ++i) {
    v[c.evaluator_inputs[i]] = evaluator_bits[i];
  }
  for (const auto& g : c.gates) {
    switch (g.kind) {
      case GateKind::And: v[g.out] = v[g.in0] & v[g.in1]; break;
      case GateKind::Xor: v[g.out] = v[g.in0] ^ v[g.in1]; break;
      case GateKind::Not: v[g.out] = v[g.in0] ^ 1; break;
    }
  }
  std::vector<bool> out;
  out.reserve(c.outputs.size());
  for (const auto& o : c.outputs) out.push_back(v[o.wire] != 0);
  return out;
}

Bits to_bits(std::span<const std::uint64_t> values, unsigned width) {
  std::vector<bool> bits;
  bits.reserve(values.size() * width);
  for (auto v : values) {
    for (unsigned b = 0; b < width; ++b) bits.push_back(((v >> b) & 1) != 0);
  }
  return bits;
}

std::vector<std::uint64_t> from_bits(const Bits& bits, unsigned width) {
  if (width == 0 || bits.size() % width != 0) {
    throw LengthMismatch("from_bits: bit count not a multiple of width");
  }
  std::vector<std::uint64_t> out(bits.size() / width, 0);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) out[i / width] |= std::uint64_t{1} << (i % width);
  }
  return out;
}

}  // namespace cclab::gc
