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

#include "auvtwin/controller.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace auvtwin {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

struct SettableKey {
  std::string_view name;
  double ControlConfig::*field;
};

constexpr std::array kSettable = {
    SettableKey{"target_depth_m", &ControlConfig::target_depth_m},
    SettableKey{"depth_band_m", &ControlConfig::depth_band_m},
    SettableKey{"pitch_limit_deg", &ControlConfig::pitch_limit_deg},
    SettableKey{"heading_tolerance_deg", &ControlConfig::heading_tolerance_deg},
    SettableKey{"surface_depth_m", &ControlConfig::surface_depth_m},
    SettableKey{"cruise_duty", &ControlConfig::cruise_duty},
    SettableKey{"correction_duty", &ControlConfig::correction_duty},
    SettableKey{"descend_timeout_s", &ControlConfig::descend_timeout_s},
    SettableKey{"surface_timeout_s", &ControlConfig::surface_timeout_s},
    SettableKey{"heading_target_deg", &ControlConfig::heading_target_deg},
};

ThrusterCommand drive(double front, double rear_left, double rear_right) {
  return {front, front, rear_left, rear_right};
}

double elapsed(std::int64_t ticks, const ControlConfig& cfg) {
  return static_cast<double>(ticks) * cfg.control_period_s;
}

}  // namespace

void ControlConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("ControlConfig: ") + what);
  };
  require(target_depth_m > 0, "target_depth_m must be > 0");
  require(depth_band_m > 0, "depth_band_m must be > 0");
  require(pitch_limit_deg > 0 && pitch_limit_deg < 90, "pitch_limit_deg must be in (0, 90)");
  require(heading_tolerance_deg >= 0 && heading_tolerance_deg < 180,
          "heading_tolerance_deg must be in [0, 180)");
  require(control_period_s > 0 && control_period_s <= 1, "control_period_s must be in (0, 1]");
  require(cruise_duty > 0 && cruise_duty <= 1, "cruise_duty must be in (0, 1]");
  require(correction_duty > 0 && correction_duty <= 1, "correction_duty must be in (0, 1]");
  require(descend_timeout_s > 0, "descend_timeout_s must be > 0");
  require(surface_timeout_s > 0, "surface_timeout_s must be > 0");
  require(surface_depth_m >= depth_offset_m, "surface_depth_m must be >= the sensor offset");
  require(calibration_samples >= 1, "calibration_samples must be >= 1");
  require(std::isnan(heading_target_deg) || std::isfinite(heading_target_deg),
          "heading_target_deg must be finite or latch");
}

bool is_runtime_settable(std::string_view key) {
  return std::any_of(kSettable.begin(), kSettable.end(),
                     [&](const SettableKey& k) { return k.name == key; });
}

void set_control_value(ControlConfig& cfg, std::string_view key, double value) {
  for (const auto& k : kSettable) {
    if (k.name == key) {
      cfg.*k.field = value;
      return;
    }
  }
  throw std::invalid_argument("unknown control key: " + std::string(key));
}

std::string_view to_string(CorrectionTag tag) {
  switch (tag) {
    case CorrectionTag::None: return "None";
    case CorrectionTag::PitchCorrection: return "PitchCorrection";
    case CorrectionTag::DepthCorrection: return "DepthCorrection";
    case CorrectionTag::HeadingCorrection: return "HeadingCorrection";
    case CorrectionTag::Cruise: return "Cruise";
    case CorrectionTag::Descend: return "Descend";
    case CorrectionTag::Surface: return "Surface";
  }
  return "None";
}

std::string_view to_string(MissionEvent::Kind kind) {
  using K = MissionEvent::Kind;
  switch (kind) {
    case K::CommandStarted: return "CommandStarted";
    case K::CommandCompleted: return "CommandCompleted";
    case K::UnknownCommand: return "UnknownCommand";
    case K::InvalidParameter: return "InvalidParameter";
    case K::DescendTimeout: return "DescendTimeout";
    case K::SurfaceTimeout: return "SurfaceTimeout";
    case K::FlushLog: return "FlushLog";
    case K::TerminateLink: return "TerminateLink";
  }
  return "";
}

std::string_view phase_name(const MissionPhase& phase) {
  return std::visit(
      overloaded{
          [](const phase::AwaitingCommand&) { return std::string_view("AwaitingCommand"); },
          [](const phase::Calibrating&) { return std::string_view("Calibrating"); },
          [](const phase::Descending&) { return std::string_view("Descending"); },
          [](const phase::Forward&) { return std::string_view("Forward"); },
          [](const phase::Surfacing&) { return std::string_view("Surfacing"); },
          [](const phase::Ended&) { return std::string_view("Ended"); },
      },
      phase);
}

ForwardDecision forward_step(const SensorSnapshot& snapshot, const ControlConfig& cfg) {
  const double cruise = cfg.cruise_duty;
  const double correction = cfg.correction_duty;

  if (std::abs(snapshot.pitch_deg) > cfg.pitch_limit_deg + kThresholdEps) {
    // Nose up too steep: push the nose down, and vice versa.
    const double front = snapshot.pitch_deg > 0 ? -correction : correction;
    return {drive(front, cruise, cruise), CorrectionTag::PitchCorrection};
  }

  const double deviation = snapshot.sensed_depth_m - cfg.band_center();
  if (std::abs(deviation) > cfg.depth_band_m + kThresholdEps) {
    const double front = deviation > 0 ? correction : -correction;
    return {drive(front, cruise, cruise), CorrectionTag::DepthCorrection};
  }

  if (!std::isnan(cfg.heading_target_deg)) {
    const double error = heading_error(snapshot.heading_deg, cfg.heading_target_deg);
    if (std::abs(error) > cfg.heading_tolerance_deg + kThresholdEps) {
      // Outer side speeds up, inner side slows but never stops.
      const double diff = correction * cruise / 2;
      const double outer = std::min(1.0, cruise + diff);
      const double inner = cruise - diff;
      // Clockwise turn: left rear pushes harder.
      return error > 0 ? ForwardDecision{drive(0, outer, inner), CorrectionTag::HeadingCorrection}
                       : ForwardDecision{drive(0, inner, outer), CorrectionTag::HeadingCorrection};
    }
  }

  return {drive(0, cruise, cruise), CorrectionTag::Cruise};
}

RoutineStep descend_step(const SensorSnapshot& snapshot, const ControlConfig& cfg,
                         double elapsed_s) {
  if (snapshot.sensed_depth_m >= cfg.band_low() - kThresholdEps) {
    return {ThrusterCommand{}, true, false};
  }
  if (elapsed_s >= cfg.descend_timeout_s) {
    return {ThrusterCommand{}, true, true};
  }
  return {drive(-cfg.correction_duty, cfg.cruise_duty, cfg.cruise_duty), false, false};
}

RoutineStep surface_step(const SensorSnapshot& snapshot, const ControlConfig& cfg,
                         double elapsed_s) {
  if (snapshot.sensed_depth_m <= cfg.surface_depth_m + kThresholdEps) {
    return {ThrusterCommand{}, true, false};
  }
  if (elapsed_s >= cfg.surface_timeout_s) {
    return {ThrusterCommand{}, true, true};
  }
  return {drive(cfg.correction_duty, cfg.cruise_duty, cfg.cruise_duty), false, false};
}

namespace {

using Kind = MissionEvent::Kind;

// Runs one period of whatever routine `r.next.phase` holds.
void run_phase(TickResult& r, const SensorSnapshot& snapshot) {
  MissionState& s = r.next;
  const ControlConfig& cfg = s.cfg;

  std::visit(
      overloaded{
          [&](phase::AwaitingCommand&) {},
          [&](phase::Ended&) {},
          [&](phase::Calibrating& p) {
            SensorSnapshot raw = snapshot;
            raw.pitch_deg += s.calibration.pitch_offset_deg;
            raw.heading_deg = wrap_360(raw.heading_deg + s.calibration.heading_offset_deg);
            p.raw.push_back(raw);
            if (p.raw.size() >= static_cast<std::size_t>(cfg.calibration_samples)) {
              s.calibration = calibrate(p.raw, p.raw.size(), s.compass_reference_deg);
              r.events.push_back({Kind::CommandCompleted, "CAL"});
              s.phase = phase::Surfacing{};
            }
          },
          [&](phase::Descending& p) {
            const auto step = descend_step(snapshot, cfg, elapsed(p.elapsed_ticks, cfg));
            r.thrust = step.thrust;
            r.tag = CorrectionTag::Descend;
            ++p.elapsed_ticks;
            if (step.done) {
              r.events.push_back(step.timed_out ? MissionEvent{Kind::DescendTimeout, "DIVE"}
                                                : MissionEvent{Kind::CommandCompleted, "DIVE"});
              s.phase = phase::Surfacing{};
            }
          },
          [&](phase::Forward& p) {
            if (p.remaining_ticks <= 0) {
              r.events.push_back({Kind::CommandCompleted, "FWD"});
              s.phase = phase::Surfacing{};
              return;
            }
            ControlConfig leg = cfg;
            leg.heading_target_deg = p.heading_target_deg;
            const auto decision = forward_step(snapshot, leg);
            r.thrust = decision.thrust;
            r.tag = decision.tag;
            --p.remaining_ticks;
          },
          [&](phase::Surfacing& p) {
            const auto step = surface_step(snapshot, cfg, elapsed(p.elapsed_ticks, cfg));
            r.thrust = step.thrust;
            r.tag = CorrectionTag::Surface;
            ++p.elapsed_ticks;
            if (step.done) {
              if (step.timed_out) r.events.push_back({Kind::SurfaceTimeout, "SURFACE"});
              s.phase = phase::AwaitingCommand{};
              ++s.prompt_index;
            }
          },
      },
      s.phase);
}

void start_command(TickResult& r, const Command& command, const SensorSnapshot& snapshot) {
  MissionState& s = r.next;
  const std::string line = to_line(command);
  r.events.push_back({Kind::CommandStarted, line});

  std::visit(
      overloaded{
          [&](const cmd::Calibrate&) { s.phase = phase::Calibrating{}; },
          [&](const cmd::SetParam& c) {
            ControlConfig trial = s.cfg;
            try {
              set_control_value(trial, c.key, c.value);
              trial.validate();
              s.cfg = trial;
              r.events.push_back({Kind::CommandCompleted, line});
            } catch (const std::invalid_argument& e) {
              r.events.push_back({Kind::InvalidParameter, e.what()});
            }
            s.phase = phase::Surfacing{};
          },
          [&](const cmd::TestConnection&) {
            r.events.push_back({Kind::CommandCompleted, line});
            s.phase = phase::Surfacing{};
          },
          [&](const cmd::Descend& c) {
            s.cfg.target_depth_m = c.target_depth_m;
            s.phase = phase::Descending{};
          },
          [&](const cmd::Forward& c) {
            const double target = std::isnan(s.cfg.heading_target_deg) ? snapshot.heading_deg
                                                                       : s.cfg.heading_target_deg;
            const auto ticks = static_cast<std::int64_t>(
                std::llround(c.duration_s / s.cfg.control_period_s));
            s.phase = phase::Forward{ticks, target};
          },
          [&](const cmd::Surface&) { s.phase = phase::Surfacing{}; },
          [&](const cmd::End&) {
            s.phase = phase::Ended{};
            r.events.push_back({Kind::FlushLog, ""});
            r.events.push_back({Kind::TerminateLink, ""});
          },
      },
      command);
}

}  // namespace

TickResult mission_tick(const MissionState& state, const SensorSnapshot& snapshot,
                        std::deque<LinkMessage>& inbox) {
  TickResult r{state, ThrusterCommand{}, CorrectionTag::None, {}};

  if (std::holds_alternative<phase::AwaitingCommand>(state.phase)) {
    while (!inbox.empty()) {
      LinkMessage message = std::move(inbox.front());
      inbox.pop_front();
      if (const auto* error = std::get_if<ParseError>(&message)) {
        r.events.push_back({Kind::UnknownCommand, error->message});
        continue;
      }
      start_command(r, std::get<Command>(message), snapshot);
      break;
    }
  }

  run_phase(r, snapshot);
  return r;
}

}  // namespace auvtwin
