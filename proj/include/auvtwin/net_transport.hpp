// Copyright 2026 The auvtwin Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "auvtwin/simulation.hpp"

namespace auvtwin {

struct Endpoint {
  std::string host = "127.0.0.1";
  unsigned short port = 0;
};

/// "host:port", ":port" or "port".  Throws std::invalid_argument.
Endpoint parse_endpoint(std::string_view text);

/// Socket side of the operator link: a TCP listener speaking the
/// newline-delimited line protocol and an optional WebSocket listener that
/// carries the same frames and commands, one per message.
///
/// All socket I/O runs on a private thread.  The simulation thread talks to
/// it only through apply(), poll() and wait(), which are backed by two
/// locked queues.  Droppable frames beyond the queue capacity are shed
/// oldest first; replies and closes are never shed.
class NetTransport : public Transport {
 public:
  NetTransport(Endpoint tcp, std::optional<Endpoint> ws, std::size_t frame_queue = 256);
  ~NetTransport() override;

  NetTransport(const NetTransport&) = delete;
  NetTransport& operator=(const NetTransport&) = delete;

  /// Binds both listeners and starts the I/O thread.  Throws
  /// std::system_error if a port cannot be bound.
  void start();

  /// Delivers queued output, closes every connection and joins the I/O
  /// thread, waiting at most `grace` for writes to drain.
  void stop(std::chrono::milliseconds grace = std::chrono::milliseconds(500));

  void apply(std::vector<TransportAction> actions) override;
  std::vector<TransportEvent> poll() override;
  void wait(std::chrono::milliseconds timeout) override;

  unsigned short tcp_port() const;
  std::optional<unsigned short> ws_port() const;
  std::uint64_t frames_dropped() const;

  struct Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

/// Interactive loop over a NetTransport.  Realtime paces ticks at the
/// control period; otherwise the simulation runs in lockstep with the
/// operator: it waits whenever the vehicle is connectable and nobody is
/// attached, or a prompt is open.  Returns when the mission ends, `stop`
/// becomes true, or a surface timeout strands the vehicle.  Logs are flushed
/// on every exit path.
RunResult run_server(Simulation& sim, NetTransport& net, bool realtime,
                     const std::atomic<bool>& stop);

}  // namespace auvtwin
