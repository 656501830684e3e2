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

#include <chrono>
#include <memory>
#include <string>
#include <vector>

#include "cclab/framing.hpp"

namespace cclab::proto {

using Millis = std::chrono::milliseconds;
inline constexpr Millis kDefaultStepTimeout{30'000};

// One side of a bidirectional, ordered, framed message channel. An endpoint
// is owned by exactly one role instance and is not shared across threads.
class Endpoint {
 public:
  virtual ~Endpoint() = default;
  // TransportError if the channel is closed.
  virtual void send(const ProtocolMessage& msg) = 0;
  // TransportError if the channel closes before a message arrives,
  // ProtocolAbort("timeout") once the deadline passes.
  virtual ProtocolMessage receive(Millis timeout) = 0;
  virtual void close() = 0;
};

struct EndpointPair {
  std::unique_ptr<Endpoint> first;
  std::unique_ptr<Endpoint> second;
};

class TransportFactory {
 public:
  virtual ~TransportFactory() = default;
  virtual EndpointPair connect() = 0;
  virtual std::string name() const = 0;
};

// Queues inside one process. Messages still pass through frame/unframe.
class InProcTransport final : public TransportFactory {
 public:
  EndpointPair connect() override;
  std::string name() const override { return "inproc"; }
};

// One TCP connection on 127.0.0.1 per call to connect().
class TcpTransport final : public TransportFactory {
 public:
  EndpointPair connect() override;
  std::string name() const override { return "tcp"; }
};

std::unique_ptr<TransportFactory> make_transport(const std::string& name);

struct TranscriptEntry {
  enum class Direction { Sent, Received };
  Direction direction;
  std::string peer;
  ProtocolMessage message;
};

// Append-only message log of one role instance.
struct SessionTranscript {
  std::string owner;
  std::vector<TranscriptEntry> entries;
  std::string outcome;

  std::vector<const TranscriptEntry*> inbound() const;
  std::vector<const TranscriptEntry*> outbound() const;
};

// Decorator that appends every message crossing it to a transcript.
class RecordingEndpoint final : public Endpoint {
 public:
  RecordingEndpoint(std::unique_ptr<Endpoint> inner, SessionTranscript* log, std::string peer)
      : inner_(std::move(inner)), log_(log), peer_(std::move(peer)) {}

  void send(const ProtocolMessage& msg) override;
  ProtocolMessage receive(Millis timeout) override;
  void close() override { inner_->close(); }

 private:
  std::unique_ptr<Endpoint> inner_;
  SessionTranscript* log_;
  std::string peer_;
};

}  // namespace cclab::proto
