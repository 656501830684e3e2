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

// Yao garbling with 128-bit labels and point-and-permute.
//
// The permute bit of a label is its least significant bit. Every garbled
// row is H(La || Lb || gate_id) XOR (Lout || 0^64), where H is SHA-256
// truncated to 24 bytes; the evaluator opens the row selected by the two
// permute bits and rejects it unless the trailing 8 bytes decrypt to zero.
// With free-XOR (the default) all label pairs differ by one global offset R
// with lsb(R) = 1, so XOR and NOT gates carry no table. NOT is XOR with the
// constant-one wire in both modes.

#include <array>
#include <cstdint>
#include <vector>

#include "cclab/circuit.hpp"
#include "cclab/rng.hpp"

namespace cclab::gc {

struct Label {
  std::array<std::uint8_t, 16> bytes{};

  bool permute_bit() const { return (bytes[0] & 1) != 0; }
  Label operator^(const Label& o) const {
    Label r;
    for (std::size_t i = 0; i < 16; ++i) r.bytes[i] = bytes[i] ^ o.bytes[i];
    return r;
  }
  friend bool operator==(const Label&, const Label&) = default;
};

inline constexpr std::size_t kRowBytes = 24;

struct GarbleOptions {
  bool free_xor = true;
};

struct GarbledCircuit {
  Digest circuit_hash{};
  bool free_xor = true;
  // Four rows per garbled gate, gate order; AND gates always, XOR/NOT only
  // without free-XOR.
  std::vector<std::uint8_t> tables;
  // Permute bit of the zero label of every output wire.
  std::vector<bool> output_decode;
  // Labels of the constant wires for their fixed values (0 and 1).
  std::array<Label, 2> constant_labels{};
};

// Zero/one labels of every input wire, kept by the garbler.
struct InputEncoding {
  std::vector<std::array<Label, 2>> garbler;
  std::vector<std::array<Label, 2>> evaluator;

  std::vector<Label> encode_garbler(const Bits& bits) const;
  std::vector<Label> encode_evaluator(const Bits& bits) const;
};

struct Garbling {
  GarbledCircuit circuit;
  InputEncoding inputs;
};

// Deterministic for a given rng state.
Garbling garble(const BooleanCircuit& c, Rng& rng, GarbleOptions options = {});

// Output labels in circuit output order. DecryptionFailure when a row fails
// its redundancy check (malformed tables or wrong labels).
std::vector<Label> evaluate(const BooleanCircuit& c, const GarbledCircuit& gc,
                            const std::vector<Label>& garbler_labels,
                            const std::vector<Label>& evaluator_labels);

Bits decode_outputs(const GarbledCircuit& gc, const std::vector<Label>& output_labels);

std::size_t garbled_gate_count(const BooleanCircuit& c, bool free_xor);

}  // namespace cclab::gc
