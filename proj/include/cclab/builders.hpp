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

#include <cstdint>
#include <vector>

#include "cclab/circuit.hpp"

namespace cclab::gc {

// Bit bus, least-significant bit first.
using Bus = std::vector<WireId>;

class CircuitBuilder {
 public:
  WireId zero() const { return BooleanCircuit::kZero; }
  WireId one() const { return BooleanCircuit::kOne; }

  Bus garbler_input(unsigned width);
  Bus evaluator_input(unsigned width);
  Bus constant(std::uint64_t value, unsigned width) const;

  WireId and_gate(WireId a, WireId b);
  WireId xor_gate(WireId a, WireId b);
  WireId not_gate(WireId a);

  // Ripple-carry arithmetic mod 2^width, one AND per bit.
  Bus add(const Bus& a, const Bus& b);
  Bus sub(const Bus& a, const Bus& b);
  // Two's complement a > b: sign bit of (b - a) after one-bit sign extension.
  WireId signed_greater(const Bus& a, const Bus& b);
  // sel ? if_true : if_false
  Bus mux(WireId sel, const Bus& if_true, const Bus& if_false);

  void output(const Bus& bus, Disclosure policy);

  BooleanCircuit build() &&;

 private:
  WireId fresh() { return circuit_.wire_count++; }
  Bus add_with_carry(const Bus& a, const Bus& b, WireId carry_in);

  BooleanCircuit circuit_;
};

// Evaluator supplies k w-bit shares; garbler supplies k w-bit shares then k
// w-bit output masks. The circuit adds the shares mod 2^w, takes the signed
// argmax (lowest index wins ties) and hands (onehot - mask) mod 2^w to the
// evaluator only. ParamError unless k >= 2 and 4 <= w <= 64.
BooleanCircuit build_onehot_argmax_circuit(unsigned k, unsigned w);

// Evaluator supplies k w-bit values, garbler k w-bit values. Output: the
// ceil(log2 k)-bit index of the signed argmax of their sum, to the
// evaluator only.
BooleanCircuit build_noisy_sum_argmax_circuit(unsigned k, unsigned w);

// Garbler a, evaluator b, both parties learn (a + b) mod 2^w.
BooleanCircuit build_adder_circuit(unsigned w);

unsigned index_width(unsigned k);

}  // namespace cclab::gc
