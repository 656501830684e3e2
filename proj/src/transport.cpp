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
#include "cclab/transport.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <utility>

#include "cclab/errors.hpp"
#include "cclab/step_channel.hpp"

namespace cclab::proto {

namespace {

// ---- in-process ----------------------------------------------------------

struct Pipe {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Bytes> queue;
  bool closed = false;
};

class InProcEndpoint final : public Endpoint {
 public:
  InProcEndpoint(std::shared_ptr<Pipe> in, std::shared_ptr<Pipe> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~InProcEndpoint() override { close(); }

  void send(const ProtocolMessage& msg) override {
    Bytes wire = frame(msg);
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw TransportError("inproc: send on closed channel");
    out_->queue.push_back(std::move(wire));
    out_->cv.notify_all();
  }

  ProtocolMessage receive(Millis timeout) override {
    std::unique_lock lock(in_->mu);
    const bool ready = in_->cv.wait_for(lock, timeout, [&] {
      return !in_->queue.empty() || in_->closed;
    });
    if (!ready) throw ProtocolAbort("timeout");
    if (in_->queue.empty()) throw TransportError("inproc: channel closed by peer");
    Bytes wire = std::move(in_->queue.front());
    in_->queue.pop_front();
    lock.unlock();
    return unframe(wire);
  }

  void close() override {
    for (auto* p : {in_.get(), out_.get()}) {
      std::lock_guard lock(p->mu);
      p->closed = true;
      p->cv.notify_all();
    }
  }

 private:
  std::shared_ptr<Pipe> in_;
  std::shared_ptr<Pipe> out_;
};

// ---- TCP -----------------------------------------------------------------

class FdGuard {
 public:
  explicit FdGuard(int fd = -1) : fd_(fd) {}
  FdGuard(const FdGuard&) = delete;
  FdGuard& operator=(const FdGuard&) = delete;
  ~FdGuard() { reset(); }
  int get() const { return fd_; }
  int release() { return std::exchange(fd_, -1); }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

[[noreturn]] void throw_errno(const char* what) {
  throw TransportError(std::string("tcp: ") + what + ": " + std::strerror(errno));
}

class TcpEndpoint final : public Endpoint {
 public:
  explicit TcpEndpoint(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpEndpoint() override { close(); }

  void send(const ProtocolMessage& msg) override {
    if (fd_ < 0) throw TransportError("tcp: send on closed socket");
    const Bytes wire = frame(msg);
    std::size_t sent = 0;
    while (sent < wire.size()) {
      const ssize_t n = ::send(fd_, wire.data() + sent, wire.size() - sent, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw_errno("send");
      }
      sent += static_cast<std::size_t>(n);
    }
  }

  ProtocolMessage receive(Millis timeout) override {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (auto m = decoder_.next()) return std::move(*m);
      if (fd_ < 0) throw TransportError("tcp: receive on closed socket");
      const auto left = std::chrono::duration_cast<Millis>(deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) throw ProtocolAbort("timeout");
      pollfd p{fd_, POLLIN, 0};
      const int rc = ::poll(&p, 1, static_cast<int>(left.count()));
      if (rc < 0) {
        if (errno == EINTR) continue;
        throw_errno("poll");
      }
      if (rc == 0) throw ProtocolAbort("timeout");
      std::uint8_t buf[16384];
      const ssize_t n = ::recv(fd_, buf, sizeof(buf), 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw_errno("recv");
      }
      if (n == 0) throw TransportError("tcp: connection closed by peer");
      decoder_.feed(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::shutdown(fd_, SHUT_RDWR);
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
  FrameDecoder decoder_;
};

}  // namespace

EndpointPair InProcTransport::connect() {
  auto ab = std::make_shared<Pipe>();
  auto ba = std::make_shared<Pipe>();
  return {std::make_unique<InProcEndpoint>(ba, ab), std::make_unique<InProcEndpoint>(ab, ba)};
}

EndpointPair TcpTransport::connect() {
  FdGuard listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (listener.get() < 0) throw_errno("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  if (::bind(listener.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) throw_errno("bind");
  if (::listen(listener.get(), 1) < 0) throw_errno("listen");
  socklen_t len = sizeof(addr);
  if (::getsockname(listener.get(), reinterpret_cast<sockaddr*>(&addr), &len) < 0) {
    throw_errno("getsockname");
  }
  FdGuard client(::socket(AF_INET, SOCK_STREAM, 0));
  if (client.get() < 0) throw_errno("socket");
  if (::connect(client.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    throw_errno("connect");
  }
  FdGuard server(::accept(listener.get(), nullptr, nullptr));
  if (server.get() < 0) throw_errno("accept");
  return {std::make_unique<TcpEndpoint>(client.release()),
          std::make_unique<TcpEndpoint>(server.release())};
}

std::unique_ptr<TransportFactory> make_transport(const std::string& name) {
  if (name == "inproc") return std::make_unique<InProcTransport>();
  if (name == "tcp") return std::make_unique<TcpTransport>();
  throw ConfigError("unknown transport '" + name + "' (expected inproc or tcp)");
}

std::vector<const TranscriptEntry*> SessionTranscript::inbound() const {
  std::vector<const TranscriptEntry*> out;
  for (const auto& e : entries) {
    if (e.direction == TranscriptEntry::Direction::Received) out.push_back(&e);
  }
  return out;
}

std::vector<const TranscriptEntry*> SessionTranscript::outbound() const {
  std::vector<const TranscriptEntry*> out;
  for (const auto& e : entries) {
    if (e.direction == TranscriptEntry::Direction::Sent) out.push_back(&e);
  }
  return out;
}

void RecordingEndpoint::send(const ProtocolMessage& msg) {
  inner_->send(msg);
  if (log_) log_->entries.push_back({TranscriptEntry::Direction::Sent, peer_, msg});
}

ProtocolMessage RecordingEndpoint::receive(Millis timeout) {
  ProtocolMessage msg = inner_->receive(timeout);
  if (log_) log_->entries.push_back({TranscriptEntry::Direction::Received, peer_, msg});
  return msg;
}

ProtocolMessage expect_message(Endpoint& ep, const SessionId& session, StepTag tag, Millis timeout) {
  ProtocolMessage m = ep.receive(timeout);
  if (m.tag == StepTag::Abort) {
    auto [step, reason] = parse_abort(m);
    throw ProtocolAbort(reason.empty() ? "peer abort" : reason,
                        "peer aborted at " + std::string(step_name(step)));
  }
  if (m.session != session) throw SessionMismatch("message for a different session");
  if (m.tag != tag) {
    throw ProtocolAbort("unexpected step", "wanted " + std::string(step_name(tag)) + ", got " +
                                               std::string(step_name(m.tag)));
  }
  return m;
}

void StepChannel::send(Bytes payload) {
  ProtocolMessage m;
  m.session = session_;
  m.tag = tag_;
  m.payload = std::move(payload);
  ep_.send(m);
}

void StepChannel::send(TwoPcKind kind, std::span<const std::uint8_t> body) {
  Bytes payload;
  payload.reserve(body.size() + 1);
  payload.push_back(static_cast<std::uint8_t>(kind));
  payload.insert(payload.end(), body.begin(), body.end());
  send(std::move(payload));
}

Bytes StepChannel::receive_payload() {
  return expect_message(ep_, session_, tag_, timeout_).payload;
}

Bytes StepChannel::expect(TwoPcKind kind) {
  Bytes p = receive_payload();
  if (p.empty() || p[0] != static_cast<std::uint8_t>(kind)) {
    throw ProtocolAbort("unexpected message", "2PC sub-message out of order");
  }
  p.erase(p.begin());
  return p;
}

void StepChannel::abort(std::string_view reason) {
  try {
    ep_.send(make_abort(session_, tag_, reason));
  } catch (const TransportError&) {
    // peer already gone
  }
}

}  // namespace cclab::proto
