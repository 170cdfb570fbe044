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

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "auvtwin/command.hpp"
#include "auvtwin/controller.hpp"
#include "auvtwin/mission_log.hpp"
#include "auvtwin/sensors.hpp"

namespace auvtwin {

inline constexpr std::size_t kMaxLineBytes = 256;

struct CommandLimits {
  double max_depth_m = 1.2;  // rope length
  double max_duration_s = 3600.0;
};

/// Grammar, verbs case-insensitive:
///   CAL | SET <key> <value> | PING | DIVE <depth_m> | FWD <seconds> |
///   SURFACE | END
/// A trailing "\n" or "\r\n" is accepted.
std::variant<Command, ParseError> parse_command(std::string_view line,
                                                const CommandLimits& limits = {});

/// The radio only works with the pressure port near the surface.
bool link_available(const SensorSnapshot& snapshot, const ControlConfig& cfg);

enum class DropReason { Submerged, OperatorClosed, Terminated };

std::string_view to_string(DropReason reason);

namespace link {
struct Connected {
  std::uint64_t session_id = 0;
  bool operator==(const Connected&) const = default;
};
struct Dropped {
  DropReason reason = DropReason::OperatorClosed;
  bool operator==(const Dropped&) const = default;
};
}  // namespace link

using LinkState = std::variant<link::Connected, link::Dropped>;

/// "Connected(3)", "Dropped(Submerged)", ...
std::string to_string(const LinkState& state);

// --- frames ---------------------------------------------------------------

/// Extra telemetry flags carried in a frame's tags array.
struct FrameFlags {
  bool taut_rope = false;
  bool camera_frame = false;
};

/// {"t","depth","pitch","heading","phase","link","x","y","float_x","float_y","tags"}
/// on a single line, no trailing newline.
std::string telemetry_frame(const TelemetryRecord& record, const FrameFlags& flags);

std::string ack_frame(double t_s, std::string_view command_line);
std::string error_frame(double t_s, const ParseError& error);
std::string banner_frame(double t_s, std::string_view phase, const LinkState& link,
                         std::optional<std::uint64_t> prompt);
std::string prompt_frame(double t_s, std::uint64_t prompt);

// --- session management ---------------------------------------------------

using ConnectionId = std::uint64_t;

struct TransportEvent {
  enum class Kind { Opened, Data, Closed };
  Kind kind;
  ConnectionId conn = 0;
  std::string bytes;
};

struct TransportAction {
  enum class Kind { Send, Close };
  Kind kind;
  ConnectionId conn = 0;
  // Send: one frame without the trailing newline.  Close: reason text.
  std::string payload;
  // Telemetry frames may be shed under backpressure; replies may not.
  bool droppable = false;
};

/// Gates one operator session on the surface predicate.  Owned by the
/// simulation thread; transports feed it events and apply its actions.
///
/// A connection that opens while the vehicle is submerged waits and is
/// attached as soon as the link becomes available.  Bytes from anything but
/// the attached session are discarded.  On submersion the session is closed
/// and any partial line is thrown away.
class SessionManager {
 public:
  using BannerFn = std::function<std::string()>;
  using ClockFn = std::function<double()>;

  explicit SessionManager(CommandLimits limits = {}, std::size_t inbox_capacity = 64);

  void set_banner(BannerFn banner) { banner_ = std::move(banner); }
  void set_clock(ClockFn clock) { clock_ = std::move(clock); }

  void handle(const TransportEvent& event);
  void set_link_available(bool available);

  /// Sends a frame if a session is attached and the link is up.
  bool send(std::string frame, bool droppable);

  /// End of mission: closes any session and refuses all later ones.
  void terminate();

  std::vector<TransportAction> take_actions();

  std::deque<LinkMessage>& inbox() { return inbox_; }
  const std::deque<LinkMessage>& inbox() const { return inbox_; }
  const LinkState& state() const { return state_; }
  bool link_available() const { return link_available_; }
  bool attached() const { return active_.has_value(); }
  bool terminated() const { return terminated_; }
  std::uint64_t frames_sent() const { return frames_sent_; }

 private:
  void attach(ConnectionId conn);
  void drop(DropReason reason, bool close_transport);
  void on_line(std::string_view line);
  double now() const { return clock_ ? clock_() : 0.0; }

  CommandLimits limits_;
  std::size_t inbox_capacity_;
  BannerFn banner_;
  ClockFn clock_;

  LinkState state_ = link::Dropped{DropReason::OperatorClosed};
  bool link_available_ = false;
  bool terminated_ = false;
  std::optional<ConnectionId> active_;
  std::optional<ConnectionId> waiting_;
  std::string partial_;
  bool discarding_ = false;
  std::uint64_t next_session_ = 1;
  std::uint64_t frames_sent_ = 0;

  std::deque<LinkMessage> inbox_;
  std::vector<TransportAction> actions_;
};

}  // namespace auvtwin
