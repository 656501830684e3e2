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

// 1-out-of-2 oblivious transfer.
//
// DiffieHellman is the "simplest OT" construction over the prime-order
// ristretto255 group: the sender publishes A = aG, the receiver answers
// B = bG (choice 0) or A + bG (choice 1), and the two pads are derived from
// a·B and a·(B - A); the receiver can only compute the one matching b·A.
// Pads are ChaCha20 keystreams keyed by a BLAKE2b hash of the session id,
// the transfer index and the group elements.
//
// InsecureLoopback sends both messages in the clear. It exists only to test
// the plumbing around OT and must never be used where privacy matters.

#include <vector>

#include "cclab/circuit.hpp"
#include "cclab/rng.hpp"
#include "cclab/step_channel.hpp"

namespace cclab::gc {

enum class OtBackend : std::uint8_t { DiffieHellman = 0, InsecureLoopback = 1 };

struct OtMessagePair {
  Bytes m0;
  Bytes m1;
};

// All pairs must have the same length (LengthMismatch otherwise).
void ot_send(std::span<const OtMessagePair> pairs, proto::StepChannel& ch, OtBackend backend,
             Rng& rng);
// One message of msg_len bytes per choice bit. ProtocolAbort("malformed group
// element") on invalid points.
std::vector<Bytes> ot_receive(const Bits& choices, std::size_t msg_len, proto::StepChannel& ch,
                              OtBackend backend, Rng& rng);

}  // namespace cclab::gc
