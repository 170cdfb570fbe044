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

#include "auvtwin/protocol.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include <nlohmann/json.hpp>

namespace auvtwin {

namespace {

using Json = nlohmann::ordered_json;

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

std::optional<double> finite_number(std::string_view token) {
  double v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::string number_text(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

std::string to_line(const Command& command) {
  return std::visit(
      overloaded{
          [](const cmd::Calibrate&) { return std::string("CAL"); },
          [](const cmd::SetParam& c) {
            return "SET " + c.key + " " + (std::isnan(c.value) ? "latch" : number_text(c.value));
          },
          [](const cmd::TestConnection&) { return std::string("PING"); },
          [](const cmd::Descend& c) { return "DIVE " + number_text(c.target_depth_m); },
          [](const cmd::Forward& c) { return "FWD " + number_text(c.duration_s); },
          [](const cmd::Surface&) { return std::string("SURFACE"); },
          [](const cmd::End&) { return std::string("END"); },
      },
      command);
}

std::variant<Command, ParseError> parse_command(std::string_view line,
                                                const CommandLimits& limits) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.size() > kMaxLineBytes) return ParseError{"line too long", ""};
  if (line.find('\n') != std::string_view::npos) return ParseError{"embedded newline", ""};

  const auto tokens = tokenize(line);
  if (tokens.empty()) return ParseError{"empty command", ""};

  const std::string verb = upper(tokens[0]);
  const std::size_t args = tokens.size() - 1;
  const auto arity = [&](std::size_t expected) -> std::optional<ParseError> {
    if (args == expected) return std::nullopt;
    return ParseError{verb + " takes " + std::to_string(expected) + " argument(s), got " +
                          std::to_string(args),
                      std::string(tokens[0])};
  };

  if (verb == "CAL" || verb == "PING" || verb == "SURFACE" || verb == "END") {
    if (auto e = arity(0)) return *e;
    if (verb == "CAL") return cmd::Calibrate{};
    if (verb == "PING") return cmd::TestConnection{};
    if (verb == "SURFACE") return cmd::Surface{};
    return cmd::End{};
  }

  if (verb == "DIVE" || verb == "FWD") {
    if (auto e = arity(1)) return *e;
    const auto value = finite_number(tokens[1]);
    if (!value) return ParseError{"not a number", std::string(tokens[1])};
    if (verb == "DIVE") {
      if (*value <= 0 || *value > limits.max_depth_m) {
        return ParseError{"depth out of range (0, " + number_text(limits.max_depth_m) + "]",
                          std::string(tokens[1])};
      }
      return cmd::Descend{*value};
    }
    if (*value <= 0 || *value > limits.max_duration_s) {
      return ParseError{"duration out of range (0, " + number_text(limits.max_duration_s) + "]",
                        std::string(tokens[1])};
    }
    return cmd::Forward{*value};
  }

  if (verb == "SET") {
    if (auto e = arity(2)) return *e;
    const std::string key(tokens[1]);
    if (!is_runtime_settable(key)) return ParseError{"unknown parameter", key};
    if (key == "heading_target_deg" && upper(tokens[2]) == "LATCH") {
      return cmd::SetParam{key, std::numeric_limits<double>::quiet_NaN()};
    }
    const auto value = finite_number(tokens[2]);
    if (!value) return ParseError{"not a number", std::string(tokens[2])};
    return cmd::SetParam{key, *value};
  }

  return ParseError{"unknown verb", std::string(tokens[0])};
}

bool link_available(const SensorSnapshot& snapshot, const ControlConfig& cfg) {
  return snapshot.sensed_depth_m <= cfg.surface_depth_m + kThresholdEps;
}

std::string_view to_string(DropReason reason) {
  switch (reason) {
    case DropReason::Submerged: return "Submerged";
    case DropReason::OperatorClosed: return "OperatorClosed";
    case DropReason::Terminated: return "Terminated";
  }
  return "";
}

std::string to_string(const LinkState& state) {
  return std::visit(overloaded{
                        [](const link::Connected& c) {
                          return "Connected(" + std::to_string(c.session_id) + ")";
                        },
                        [](const link::Dropped& d) {
                          return "Dropped(" + std::string(to_string(d.reason)) + ")";
                        },
                    },
                    state);
}

std::string telemetry_frame(const TelemetryRecord& r, const FrameFlags& flags) {
  Json tags = Json::array();
  if (!r.tag.empty() && r.tag != "None") tags.push_back(r.tag);
  if (flags.taut_rope) tags.push_back("TautRope");
  if (flags.camera_frame) tags.push_back("CameraFrame");

  Json j;
  j["t"] = r.t_s;
  j["depth"] = r.sensed_depth_m;
  j["pitch"] = r.pitch_deg;
  j["heading"] = r.heading_deg;
  j["phase"] = r.phase;
  j["link"] = r.link;
  j["x"] = r.x_m;
  j["y"] = r.y_m;
  j["float_x"] = r.float_x_m;
  j["float_y"] = r.float_y_m;
  j["tags"] = std::move(tags);
  return j.dump();
}

std::string ack_frame(double t_s, std::string_view command_line) {
  Json j;
  j["t"] = t_s;
  j["reply"] = "ACK " + std::string(command_line);
  return j.dump();
}

std::string error_frame(double t_s, const ParseError& error) {
  Json j;
  j["t"] = t_s;
  j["reply"] = "ERR " + error.message;
  j["token"] = error.token;
  return j.dump();
}

std::string banner_frame(double t_s, std::string_view phase, const LinkState& link,
                         std::optional<std::uint64_t> prompt) {
  Json j;
  j["t"] = t_s;
  j["banner"] = "auvtwin";
  j["phase"] = phase;
  j["link"] = to_string(link);
  if (prompt) j["prompt"] = *prompt;
  return j.dump();
}

std::string prompt_frame(double t_s, std::uint64_t prompt) {
  Json j;
  j["t"] = t_s;
  j["phase"] = "AwaitingCommand";
  j["prompt"] = prompt;
  return j.dump();
}

SessionManager::SessionManager(CommandLimits limits, std::size_t inbox_capacity)
    : limits_(limits), inbox_capacity_(inbox_capacity) {}

void SessionManager::handle(const TransportEvent& event) {
  switch (event.kind) {
    case TransportEvent::Kind::Opened:
      if (terminated_) {
        actions_.push_back({TransportAction::Kind::Close, event.conn, "Terminated", false});
      } else if (active_ || waiting_) {
        actions_.push_back({TransportAction::Kind::Close, event.conn, "Busy", false});
      } else if (link_available_) {
        attach(event.conn);
      } else {
        waiting_ = event.conn;
      }
      break;

    case TransportEvent::Kind::Data:
      if (event.conn != active_) break;
      for (const char c : event.bytes) {
        if (c == '\n') {
          if (discarding_) {
            discarding_ = false;
            send(error_frame(now(), ParseError{"line too long", ""}), false);
          } else {
            const std::string line = std::move(partial_);
            partial_.clear();
            on_line(line);
          }
          continue;
        }
        if (discarding_) continue;
        partial_.push_back(c);
        if (partial_.size() > kMaxLineBytes + 1) {  // +1 leaves room for '\r'
          partial_.clear();
          discarding_ = true;
        }
      }
      break;

    case TransportEvent::Kind::Closed:
      if (event.conn == active_) {
        drop(DropReason::OperatorClosed, false);
      } else if (event.conn == waiting_) {
        waiting_.reset();
      }
      break;
  }
}

void SessionManager::on_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (tokenize(line).empty()) return;

  auto parsed = parse_command(line, limits_);
  if (inbox_.size() >= inbox_capacity_) {
    send(error_frame(now(), ParseError{"command queue full", std::string(line)}), false);
    return;
  }
  if (const auto* command = std::get_if<Command>(&parsed)) {
    send(ack_frame(now(), to_line(*command)), false);
    inbox_.emplace_back(*command);
  } else {
    const auto& error = std::get<ParseError>(parsed);
    send(error_frame(now(), error), false);
    inbox_.emplace_back(error);
  }
}

void SessionManager::set_link_available(bool available) {
  link_available_ = available;
  if (!available && active_) {
    drop(DropReason::Submerged, true);
  } else if (available && !active_ && waiting_ && !terminated_) {
    attach(*waiting_);
  }
}

void SessionManager::attach(ConnectionId conn) {
  active_ = conn;
  waiting_.reset();
  partial_.clear();
  discarding_ = false;
  state_ = link::Connected{next_session_++};
  if (banner_) send(banner_(), false);
}

void SessionManager::drop(DropReason reason, bool close_transport) {
  if (close_transport && active_) {
    actions_.push_back(
        {TransportAction::Kind::Close, *active_, std::string(to_string(reason)), false});
  }
  active_.reset();
  partial_.clear();
  discarding_ = false;
  state_ = link::Dropped{reason};
}

bool SessionManager::send(std::string frame, bool droppable) {
  if (!active_ || !link_available_) return false;
  actions_.push_back({TransportAction::Kind::Send, *active_, std::move(frame), droppable});
  ++frames_sent_;
  return true;
}

void SessionManager::terminate() {
  terminated_ = true;
  if (active_) {
    drop(DropReason::Terminated, true);
  } else {
    state_ = link::Dropped{DropReason::Terminated};
  }
  if (waiting_) {
    actions_.push_back({TransportAction::Kind::Close, *waiting_, "Terminated", false});
    waiting_.reset();
  }
}

std::vector<TransportAction> SessionManager::take_actions() {
  std::vector<TransportAction> out;
  out.swap(actions_);
  return out;
}

}  // namespace auvtwin
