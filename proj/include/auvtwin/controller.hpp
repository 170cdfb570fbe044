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

#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "auvtwin/command.hpp"
#include "auvtwin/dynamics.hpp"
#include "auvtwin/sensors.hpp"

namespace auvtwin {

// Depth, pitch and heading comparisons treat values within this distance of
// a threshold as on the threshold.  Band edges are decimal and would
// otherwise be decided by representation error.
inline constexpr double kThresholdEps = 1e-9;

struct ControlConfig {
  double target_depth_m = 1.0;
  double depth_band_m = 0.25;
  double pitch_limit_deg = 30.0;
  double heading_tolerance_deg = 10.0;
  double surface_depth_m = 0.25;
  double control_period_s = 0.1;
  double cruise_duty = 0.6;
  double correction_duty = 0.8;
  double descend_timeout_s = 120.0;
  double surface_timeout_s = 120.0;
  // NaN latches the sensed heading when a Forward command starts.
  double heading_target_deg = std::numeric_limits<double>::quiet_NaN();
  // Sensed depth minus centreline depth when level; copied from the vehicle's
  // sensor_mount_offset_m.
  double depth_offset_m = 0.2;
  int calibration_samples = 20;

  double band_center() const { return target_depth_m + depth_offset_m; }
  double band_low() const { return band_center() - depth_band_m; }
  double band_high() const { return band_center() + depth_band_m; }

  void validate() const;
};

/// Keys SET may change at runtime.
bool is_runtime_settable(std::string_view key);

/// Applies a whitelisted key.  Throws std::invalid_argument for unknown keys.
void set_control_value(ControlConfig& cfg, std::string_view key, double value);

enum class CorrectionTag {
  None,
  PitchCorrection,
  DepthCorrection,
  HeadingCorrection,
  Cruise,
  Descend,
  Surface,
};

std::string_view to_string(CorrectionTag tag);

struct ForwardDecision {
  ThrusterCommand thrust;
  CorrectionTag tag = CorrectionTag::Cruise;
};

/// One pass of the forward ladder.  Exactly one branch fires, in priority
/// order pitch, depth, heading, cruise.  Every branch keeps both rear
/// thrusters pushing forward.
ForwardDecision forward_step(const SensorSnapshot& snapshot, const ControlConfig& cfg);

struct RoutineStep {
  ThrusterCommand thrust;
  bool done = false;
  bool timed_out = false;
};

/// Nose down plus rear cruise until the sensed depth reaches the lower band
/// edge.  elapsed_s is time spent in the routine so far.
RoutineStep descend_step(const SensorSnapshot& snapshot, const ControlConfig& cfg,
                         double elapsed_s = 0.0);

/// Nose up plus rear cruise until the sensed depth is no deeper than the
/// surface threshold, then all stop.
RoutineStep surface_step(const SensorSnapshot& snapshot, const ControlConfig& cfg,
                         double elapsed_s = 0.0);

namespace phase {
struct AwaitingCommand {
  bool operator==(const AwaitingCommand&) const = default;
};
struct Calibrating {
  std::vector<SensorSnapshot> raw;
  bool operator==(const Calibrating&) const = default;
};
struct Descending {
  std::int64_t elapsed_ticks = 0;
  bool operator==(const Descending&) const = default;
};
struct Forward {
  std::int64_t remaining_ticks = 0;
  double heading_target_deg = 0;
  bool operator==(const Forward&) const = default;
};
struct Surfacing {
  std::int64_t elapsed_ticks = 0;
  bool operator==(const Surfacing&) const = default;
};
struct Ended {
  bool operator==(const Ended&) const = default;
};
}  // namespace phase

using MissionPhase = std::variant<phase::AwaitingCommand, phase::Calibrating, phase::Descending,
                                  phase::Forward, phase::Surfacing, phase::Ended>;

std::string_view phase_name(const MissionPhase& phase);

struct MissionEvent {
  enum class Kind {
    CommandStarted,
    CommandCompleted,
    UnknownCommand,
    InvalidParameter,
    DescendTimeout,
    SurfaceTimeout,
    FlushLog,
    TerminateLink,
  };
  Kind kind;
  std::string detail;

  bool operator==(const MissionEvent&) const = default;
};

std::string_view to_string(MissionEvent::Kind kind);

struct MissionState {
  MissionPhase phase = phase::AwaitingCommand{};
  ControlConfig cfg;
  Calibration calibration;
  // Bearing the hull points along while calibrating.
  double compass_reference_deg = 0.0;
  // Number of times the mission has entered AwaitingCommand after the
  // initial prompt.
  std::uint64_t prompt_index = 0;
};

struct TickResult {
  MissionState next;
  ThrusterCommand thrust;
  CorrectionTag tag = CorrectionTag::None;
  std::vector<MissionEvent> events;
};

/// Advances the command loop by one control period.  Only AwaitingCommand
/// consumes from the inbox: rejected lines are reported and skipped, the
/// first command found starts its routine in the same period.
TickResult mission_tick(const MissionState& state, const SensorSnapshot& snapshot,
                        std::deque<LinkMessage>& inbox);

}  // namespace auvtwin
