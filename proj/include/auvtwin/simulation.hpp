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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "auvtwin/config.hpp"
#include "auvtwin/controller.hpp"
#include "auvtwin/mission_log.hpp"
#include "auvtwin/protocol.hpp"

namespace auvtwin {

/// Byte-stream side of the operator link.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual void apply(std::vector<TransportAction> actions) = 0;
  virtual std::vector<TransportEvent> poll() = 0;
  /// Blocks until an event may be available or the timeout passes.
  virtual void wait(std::chrono::milliseconds timeout) { (void)timeout; }
};

/// Per-tick link facts kept for checking the gating properties afterwards.
/// Frame counts are cumulative.  Frames counted between frames_at_sense and
/// frames_sent went out under this tick's sample; frames counted before
/// frames_at_sense went out under the previous tick's.
struct LinkTrace {
  double t_s = 0;
  double sensed_depth_m = 0;
  bool link_available = false;
  bool attached = false;
  std::uint64_t frames_at_sense = 0;
  std::uint64_t frames_sent = 0;
};

/// The full loop: dynamics, sensors, controller, link gate and log.  One
/// instance backs both headless and server runs.
class Simulation {
 public:
  Simulation(SimConfig cfg, std::filesystem::path out_dir);

  /// Exchanges actions and events with the transport until it goes quiet.
  void pump(Transport& transport);

  /// Runs one control period.  Returns false only when a lockstep wait was
  /// abandoned, in which case no time passed.
  bool tick(Transport& transport);

  /// Makes tick() wait for the operator whenever needs_operator() holds.
  /// keep_running is polled while waiting; returning false abandons the tick.
  void set_lockstep(std::function<bool()> keep_running) { lockstep_ = std::move(keep_running); }

  /// True when the next tick cannot make progress without the operator: the
  /// vehicle is connectable but nobody is attached, or a prompt is open with
  /// nothing queued.  Lockstep runs wait on this.
  bool needs_operator() const;
  bool awaiting_command() const;

  bool ended() const;
  bool failed() const { return !failure_.empty(); }
  const std::string& failure() const { return failure_; }
  bool surface_timeout() const { return surface_timeout_; }

  void flush() const { log_.flush(); }

  double time() const { return state_.t_s; }
  const SimConfig& config() const { return cfg_; }
  const VehicleState& state() const { return state_; }
  const MissionState& mission() const { return mission_; }
  const SensorSnapshot& last_snapshot() const { return snapshot_; }
  const MissionLog& log() const { return log_; }
  const SessionManager& session() const { return session_; }
  const std::vector<LinkTrace>& link_trace() const { return link_trace_; }
  const std::vector<MissionEvent>& events() const { return events_; }

 private:
  SensorSnapshot sense() const;
  std::string banner() const;

  SimConfig cfg_;
  int substeps_;
  int gps_every_;
  int camera_every_;
  VehicleState state_;
  MissionState mission_;
  SensorSnapshot snapshot_;
  SessionManager session_;
  MissionLog log_;
  std::mt19937_64 gps_rng_;
  std::uint64_t tick_index_ = 0;
  std::string failure_;
  bool surface_timeout_ = false;
  std::vector<LinkTrace> link_trace_;
  std::vector<MissionEvent> events_;
  std::function<bool()> lockstep_;
};

// --- scripted operation ---------------------------------------------------

struct ScriptLine {
  std::uint64_t prompt = 0;  // sent at the Nth command prompt
  std::string line;
};

/// One command per line, optionally prefixed "@N " to pin it to prompt N.
/// Unprefixed lines take the previous prompt + 1, starting at 0.  '#'
/// starts a comment.  Every line must parse; a script not ending in END
/// produces a warning.
struct MissionScript {
  std::vector<ScriptLine> lines;
  std::vector<std::string> warnings;
};

MissionScript parse_script(std::string_view text, const CommandLimits& limits = {});
MissionScript load_script(const std::filesystem::path& path, const CommandLimits& limits = {});

/// In-process operator that replays a script.  It keeps a connection open
/// or waiting at all times and answers each prompt with its lines.
class ScriptedOperator : public Transport {
 public:
  explicit ScriptedOperator(MissionScript script);

  void apply(std::vector<TransportAction> actions) override;
  std::vector<TransportEvent> poll() override;

  bool exhausted() const { return next_ >= script_.lines.size(); }
  const std::vector<std::string>& received() const { return received_; }
  std::uint64_t connections_opened() const { return next_conn_ - 1; }

 private:
  void on_prompt(std::uint64_t prompt);

  MissionScript script_;
  std::size_t next_ = 0;
  std::optional<ConnectionId> conn_;
  ConnectionId next_conn_ = 1;
  bool refused_ = false;
  std::vector<TransportEvent> pending_;
  std::vector<std::string> received_;
};

struct RunResult {
  int exit_code = 0;
  std::string message;
};

/// Headless loop: scripted operator, simulated time only.  Flushes the log
/// on every exit path.
RunResult run_headless(Simulation& sim, ScriptedOperator& op);

}  // namespace auvtwin
