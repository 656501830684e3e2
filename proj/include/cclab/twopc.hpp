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

// Two-party evaluation of a BooleanCircuit over a StepChannel.
//
// Garbled: the garbler sends the circuit hash, the garbled tables and its
// own input labels, then transfers the evaluator's labels by OT. The
// evaluator learns every output; outputs marked Disclosure::Both are sent
// back to the garbler in clear.
//
// Ideal: the garbler sends its input bits in clear and the evaluator runs
// ideal_eval. Same message order and same outputs, no privacy for the
// garbler. Test use only.

#include "cclab/circuit.hpp"
#include "cclab/ot.hpp"
#include "cclab/rng.hpp"
#include "cclab/step_channel.hpp"

namespace cclab::gc {

enum class TwoPcBackend : std::uint8_t { Garbled = 0, Ideal = 1 };
enum class Role : std::uint8_t { Garbler, Evaluator };

struct TwoPcOptions {
  TwoPcBackend backend = TwoPcBackend::Garbled;
  OtBackend ot = OtBackend::DiffieHellman;
  bool free_xor = true;
};

// my_bits are this party's inputs in circuit order (LengthMismatch
// otherwise). The evaluator gets all outputs, the garbler only the Both
// outputs, each in declaration order. A circuit hash or backend mismatch
// sends Abort and throws SessionMismatch on the evaluator side.
Bits run_2pc(Role role, const BooleanCircuit& circuit, const Bits& my_bits,
             proto::StepChannel& ch, Rng& rng, const TwoPcOptions& options = {});

}  // namespace cclab::gc
