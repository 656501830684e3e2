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

// Boolean circuit IR shared by the garbled and the ideal 2PC backends.
//
// Wires 0 and 1 carry the constants 0 and 1. Gates are stored in
// topological order and each wire is written exactly once, either as an
// input or as a gate output.

#include <cstdint>
#include <span>
#include <vector>

#include "cclab/bytes.hpp"

namespace cclab::gc {

using WireId = std::uint32_t;
using Bits = std::vector<bool>;

enum class GateKind : std::uint8_t { And = 0, Xor = 1, Not = 2 };

struct Gate {
  GateKind kind;
  WireId in0;
  WireId in1;  // unused for Not
  WireId out;
};

enum class Disclosure : std::uint8_t { EvaluatorOnly = 0, Both = 1 };

struct OutputWire {
  WireId wire;
  Disclosure policy;
};

struct BooleanCircuit {
  static constexpr WireId kZero = 0;
  static constexpr WireId kOne = 1;

  std::uint32_t wire_count = 2;
  std::vector<Gate> gates;
  std::vector<WireId> garbler_inputs;
  std::vector<WireId> evaluator_inputs;
  std::vector<OutputWire> outputs;

  // Throws ParamError on dangling wires, double writes or ordering errors.
  void validate() const;
  // SHA-256 over a canonical encoding; both 2PC endpoints compare it.
  Digest hash() const;
  std::size_t and_count() const;
};

// Plain boolean simulation: the reference semantics for every builder and
// for the garbled backend. Returns every output in declaration order.
Bits ideal_eval(const BooleanCircuit& c, const Bits& garbler_bits,
                const Bits& evaluator_bits);

// Little-endian bit packing of w-bit values (bit 0 of value 0 first).
Bits to_bits(std::span<const std::uint64_t> values, unsigned width);
std::vector<std::uint64_t> from_bits(const Bits& bits, unsigned width);

}  // namespace cclab::gc
