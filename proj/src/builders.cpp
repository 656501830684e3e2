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
#include "cclab/builders.hpp"

#include <string>

#include "cclab/errors.hpp"

namespace cclab::gc {

Bus CircuitBuilder::garbler_input(unsigned width) {
  Bus b;
  for (unsigned i = 0; i < width; ++i) {
    b.push_back(fresh());
    circuit_.garbler_inputs.push_back(b.back());
  }
  return b;
}

Bus CircuitBuilder::evaluator_input(unsigned width) {
  Bus b;
  for (unsigned i = 0; i < width; ++i) {
    b.push_back(fresh());
    circuit_.evaluator_inputs.push_back(b.back());
  }
  return b;
}

Bus CircuitBuilder::constant(std::uint64_t value, unsigned width) const {
  Bus b;
  for (unsigned i = 0; i < width; ++i) b.push_back(((value >> i) & 1) ? one() : zero());
  return b;
}

WireId CircuitBuilder::and_gate(WireId a, WireId b) {
  const WireId out = fresh();
  circuit_.gates.push_back({GateKind::And, a, b, out});
  return out;
}

WireId CircuitBuilder::xor_gate(WireId a, WireId b) {
  const WireId out = fresh();
  circuit_.gates.push_back({GateKind::Xor, a, b, out});
  return out;
}

WireId CircuitBuilder::not_gate(WireId a) {
  const WireId out = fresh();
  circuit_.gates.push_back({GateKind::Not, a, 0, out});
  return out;
}

Bus CircuitBuilder::add_with_carry(const Bus& a, const Bus& b, WireId carry_in) {
  if (a.size() != b.size()) throw ParamError("builder: bus widths differ");
  Bus sum;
  WireId carry = carry_in;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const WireId ac = xor_gate(a[i], carry);
    const WireId bc = xor_gate(b[i], carry);
    sum.push_back(xor_gate(ac, b[i]));
    if (i + 1 < a.size()) carry = xor_gate(carry, and_gate(ac, bc));
  }
  return sum;
}

Bus CircuitBuilder::add(const Bus& a, const Bus& b) { return add_with_carry(a, b, zero()); }

Bus CircuitBuilder::sub(const Bus& a, const Bus& b) {
  Bus nb;
  for (auto w : b) nb.push_back(not_gate(w));
  return add_with_carry(a, nb, one());
}

WireId CircuitBuilder::signed_greater(const Bus& a, const Bus& b) {
  Bus ax = a, bx = b;
  ax.push_back(a.back());
  bx.push_back(b.back());
  return sub(bx, ax).back();
}

Bus CircuitBuilder::mux(WireId sel, const Bus& if_true, const Bus& if_false) {
  if (if_true.size() != if_false.size()) throw ParamError("builder: mux widths differ");
  Bus out;
  for (std::size_t i = 0; i < if_true.size(); ++i) {
    out.push_back(xor_gate(if_false[i], and_gate(sel, xor_gate(if_true[i], if_false[i]))));
  }
  return out;
}

void CircuitBuilder::output(const Bus& bus, Disclosure policy) {
  for (auto w : bus) circuit_.outputs.push_back({w, policy});
}

BooleanCircuit CircuitBuilder::build() && {
  circuit_.validate();
  return std::move(circuit_);
}

unsigned index_width(unsigned k) {
  unsigned bits = 1;
  while ((1u << bits) < k) ++bits;
  return bits;
}

namespace {

void check_params(unsigned k, unsigned w) {
  if (k < 2) throw ParamError("argmax circuit: need k >= 2, got " + std::to_string(k));
  if (w < 4 || w > 64) throw ParamError("argmax circuit: need 4 <= w <= 64, got " + std::to_string(w));
}

}  // namespace

BooleanCircuit build_onehot_argmax_circuit(unsigned k, unsigned w) {
  check_params(k, w);
  CircuitBuilder b;
  std::vector<Bus> mask_share(k), out_mask(k), eval_share(k);
  for (auto& v : mask_share) v = b.garbler_input(w);
  for (auto& v : out_mask) v = b.garbler_input(w);
  for (auto& v : eval_share) v = b.evaluator_input(w);

  Bus best = b.add(eval_share[0], mask_share[0]);
  std::vector<WireId> hot(k, b.zero());
  hot[0] = b.one();
  for (unsigned j = 1; j < k; ++j) {
    const Bus r = b.add(eval_share[j], mask_share[j]);
    const WireId gt = b.signed_greater(r, best);
    if (j + 1 < k) best = b.mux(gt, r, best);
    const WireId keep = b.not_gate(gt);
    for (unsigned i = 0; i < j; ++i) hot[i] = b.and_gate(hot[i], keep);
    hot[j] = gt;
  }
  for (unsigned j = 0; j < k; ++j) {
    Bus h = b.constant(0, w);
    h[0] = hot[j];
    b.output(b.sub(h, out_mask[j]), Disclosure::EvaluatorOnly);
  }
  return std::move(b).build();
}

BooleanCircuit build_noisy_sum_argmax_circuit(unsigned k, unsigned w) {
  check_params(k, w);
  CircuitBuilder b;
  std::vector<Bus> noisy(k), share(k);
  for (auto& v : noisy) v = b.garbler_input(w);
  for (auto& v : share) v = b.evaluator_input(w);

  const unsigned iw = index_width(k);
  Bus best = b.add(share[0], noisy[0]);
  Bus index = b.constant(0, iw);
  for (unsigned j = 1; j < k; ++j) {
    const Bus r = b.add(share[j], noisy[j]);
    const WireId gt = b.signed_greater(r, best);
    if (j + 1 < k) best = b.mux(gt, r, best);
    index = b.mux(gt, b.constant(j, iw), index);
  }
  b.output(index, Disclosure::EvaluatorOnly);
  return std::move(b).build();
}

BooleanCircuit build_adder_circuit(unsigned w) {
  if (w == 0 || w > 64) throw ParamError("adder circuit: need 1 <= w <= 64");
  CircuitBuilder b;
  const Bus a = b.garbler_input(w);
  const Bus c = b.evaluator_input(w);
  b.output(b.add(a, c), Disclosure::Both);
  return std::move(b).build();
}

}  // namespace cclab::gc
