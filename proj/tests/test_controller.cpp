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

#include <cmath>
#include <deque>
#include <string>

#include <gtest/gtest.h>

#include "auvtwin/controller.hpp"
#include "auvtwin/protocol.hpp"

namespace auvtwin {
namespace {

using Kind = MissionEvent::Kind;

SensorSnapshot at(double sensed_depth, double pitch = 0, double heading = 0) {
  SensorSnapshot s;
  s.sensed_depth_m = sensed_depth;
  s.pitch_deg = pitch;
  s.heading_deg = heading;
  return s;
}

// Independent statement of the ladder with the default thresholds: band
// [0.95, 1.45] inclusive, pitch limit 30, heading tolerance 10.
std::string expected_branch(double pitch, double depth, double heading_err) {
  if (std::abs(pitch) > 30) return "PitchCorrection";
  if (depth < 0.95 || depth > 1.45) return "DepthCorrection";
  if (std::abs(heading_err) > 10) return "HeadingCorrection";
  return "Cruise";
}

TEST(Controller, BranchGridMatchesLadder) {
  ControlConfig cfg;
  cfg.heading_target_deg = 100;
  int cells = 0;
  for (double pitch : {0.0, 20.0, -20.0, 40.0, -40.0}) {
    for (double depth : {0.5, 0.95, 1.2, 1.45, 1.9}) {
      for (double err : {0.0, 5.0, -5.0, 30.0, -30.0}) {
        const auto d = forward_step(at(depth, pitch, wrap_360(100 - err)), cfg);
        EXPECT_EQ(std::string(to_string(d.tag)), expected_branch(pitch, depth, err))
            << "pitch " << pitch << " depth " << depth << " err " << err;
        EXPECT_GT(d.thrust.rear_left, 0);
        EXPECT_GT(d.thrust.rear_right, 0);
        ++cells;
      }
    }
  }
  EXPECT_EQ(cells, 125);
}

TEST(Controller, CorrectionDirections) {
  const ControlConfig cfg;
  // Nose up too far: push the nose down.
  EXPECT_LT(forward_step(at(1.2, 40), cfg).thrust.front_left, 0);
  EXPECT_GT(forward_step(at(1.2, -40), cfg).thrust.front_left, 0);
  // Too shallow: front thrusters drive down; too deep: up.
  EXPECT_LT(forward_step(at(0.5), cfg).thrust.front_left, 0);
  EXPECT_GT(forward_step(at(1.9), cfg).thrust.front_left, 0);
}

TEST(Controller, HeadingCorrectionSteersTowardTarget) {
  ControlConfig cfg;
  cfg.heading_target_deg = 30;
  const auto right_turn = forward_step(at(1.2, 0, 0), cfg);
  EXPECT_EQ(right_turn.tag, CorrectionTag::HeadingCorrection);
  EXPECT_GT(right_turn.thrust.rear_left, right_turn.thrust.rear_right);
  EXPECT_DOUBLE_EQ(right_turn.thrust.rear_left, 0.6 + 0.8 * 0.6 / 2);
  EXPECT_DOUBLE_EQ(right_turn.thrust.rear_right, 0.6 - 0.8 * 0.6 / 2);

  cfg.heading_target_deg = 330;
  const auto left_turn = forward_step(at(1.2, 0, 0), cfg);
  EXPECT_LT(left_turn.thrust.rear_left, left_turn.thrust.rear_right);
}

TEST(Controller, OuterDutySaturates) {
  ControlConfig cfg;
  cfg.heading_target_deg = 90;
  cfg.cruise_duty = 0.9;
  cfg.correction_duty = 1.0;
  const auto d = forward_step(at(1.2), cfg);
  EXPECT_DOUBLE_EQ(d.thrust.rear_left, 1.0);
  EXPECT_DOUBLE_EQ(d.thrust.rear_right, 0.45);
}

TEST(Controller, NoHeadingTargetMeansNoHeadingBranch) {
  const ControlConfig cfg;
  EXPECT_EQ(forward_step(at(1.2, 0, 200), cfg).tag, CorrectionTag::Cruise);
}

TEST(Controller, DescendExamples) {
  const ControlConfig cfg;
  const auto far = descend_step(at(0.2), cfg);
  EXPECT_FALSE(far.done);
  EXPECT_LT(far.thrust.front_left, 0);
  EXPECT_GT(far.thrust.rear_left, 0);

  const auto edge = descend_step(at(0.95), cfg);
  EXPECT_TRUE(edge.done);
  EXPECT_FALSE(edge.timed_out);
  EXPECT_TRUE(edge.thrust.coasting());

  const auto late = descend_step(at(0.5), cfg, 120.0);
  EXPECT_TRUE(late.done);
  EXPECT_TRUE(late.timed_out);
}

TEST(Controller, SurfaceExamples) {
  const ControlConfig cfg;
  const auto done = surface_step(at(0.21), cfg);
  EXPECT_TRUE(done.done);
  EXPECT_TRUE(done.thrust.coasting());

  const auto deep = surface_step(at(1.0), cfg);
  EXPECT_FALSE(deep.done);
  EXPECT_GT(deep.thrust.front_left, 0);
  EXPECT_GT(deep.thrust.rear_left, 0);

  EXPECT_TRUE(surface_step(at(1.0), cfg, 120.0).timed_out);
}

TEST(Controller, ConfigValidation) {
  ControlConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.surface_depth_m = 0.1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.cruise_duty = 1.5;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.control_period_s = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Controller, RuntimeWhitelist) {
  EXPECT_TRUE(is_runtime_settable("cruise_duty"));
  EXPECT_FALSE(is_runtime_settable("control_period_s"));
  ControlConfig cfg;
  set_control_value(cfg, "target_depth_m", 0.8);
  EXPECT_DOUBLE_EQ(cfg.target_depth_m, 0.8);
  EXPECT_THROW(set_control_value(cfg, "mass_kg", 1), std::invalid_argument);
}

// --- mission state machine -------------------------------------------------

struct Machine {
  MissionState state;
  std::deque<LinkMessage> inbox;

  TickResult tick(const SensorSnapshot& snap) {
    TickResult r = mission_tick(state, snap, inbox);
    state = r.next;
    return r;
  }

  void push(std::string_view line) {
    auto parsed = parse_command(line);
    if (auto* c = std::get_if<Command>(&parsed)) {
      inbox.emplace_back(*c);
    } else {
      inbox.emplace_back(std::get<ParseError>(parsed));
    }
  }

  bool has(const TickResult& r, Kind kind) {
    for (const auto& e : r.events) {
      if (e.kind == kind) return true;
    }
    return false;
  }
};

TEST(Mission, IdleWithoutCommands) {
  Machine m;
  const auto r = m.tick(at(0.2));
  EXPECT_TRUE(std::holds_alternative<phase::AwaitingCommand>(m.state.phase));
  EXPECT_TRUE(r.thrust.coasting());
  EXPECT_TRUE(r.events.empty());
}

TEST(Mission, DiveStartsSameTickAndSurfacesAfter) {
  Machine m;
  m.push("DIVE 1.0");
  auto r = m.tick(at(0.2));
  EXPECT_TRUE(std::holds_alternative<phase::Descending>(m.state.phase));
  EXPECT_EQ(r.tag, CorrectionTag::Descend);
  EXPECT_TRUE(m.has(r, Kind::CommandStarted));

  r = m.tick(at(0.96));
  EXPECT_TRUE(m.has(r, Kind::CommandCompleted));
  EXPECT_TRUE(std::holds_alternative<phase::Surfacing>(m.state.phase));

  r = m.tick(at(0.5));
  EXPECT_TRUE(std::holds_alternative<phase::Surfacing>(m.state.phase));
  r = m.tick(at(0.2));
  EXPECT_TRUE(std::holds_alternative<phase::AwaitingCommand>(m.state.phase));
  EXPECT_EQ(m.state.prompt_index, 1u);
}

TEST(Mission, DiveSetsTargetDepth) {
  Machine m;
  m.push("DIVE 0.6");
  m.tick(at(0.2));
  EXPECT_DOUBLE_EQ(m.state.cfg.target_depth_m, 0.6);
}

TEST(Mission, DescendTimeoutIsReported) {
  Machine m;
  m.state.cfg.descend_timeout_s = 0.5;
  m.push("DIVE 1.0");
  bool timed_out = false;
  for (int i = 0; i < 10 && !timed_out; ++i) timed_out = m.has(m.tick(at(0.3)), Kind::DescendTimeout);
  EXPECT_TRUE(timed_out);
  EXPECT_TRUE(std::holds_alternative<phase::Surfacing>(m.state.phase));
}

TEST(Mission, ForwardCountsTicksAndLatchesHeading) {
  Machine m;
  m.push("FWD 1");
  m.tick(at(1.2, 0, 123));
  const auto* f = std::get_if<phase::Forward>(&m.state.phase);
  ASSERT_NE(f, nullptr);
  EXPECT_DOUBLE_EQ(f->heading_target_deg, 123);
  // 1 s at 0.1 s per tick: ten ticks of driving, the first already spent.
  EXPECT_EQ(f->remaining_ticks, 9);
  int driving = 1;
  while (std::holds_alternative<phase::Forward>(m.state.phase)) {
    const auto r = m.tick(at(1.2, 0, 123));
    if (!r.thrust.coasting()) ++driving;
  }
  EXPECT_EQ(driving, 10);
  EXPECT_TRUE(std::holds_alternative<phase::Surfacing>(m.state.phase));
}

TEST(Mission, ForwardUsesConfiguredHeading) {
  Machine m;
  m.push("SET heading_target_deg 45");
  m.tick(at(0.2));
  m.push("FWD 10");
  m.tick(at(0.2, 0, 0));
  m.tick(at(0.2, 0, 0));
  EXPECT_DOUBLE_EQ(std::get<phase::Forward>(m.state.phase).heading_target_deg, 45);
}

TEST(Mission, SetRejectsInvalidValue) {
  Machine m;
  m.push("SET cruise_duty 1.5");
  const auto r = m.tick(at(0.2));
  EXPECT_TRUE(m.has(r, Kind::InvalidParameter));
  EXPECT_DOUBLE_EQ(m.state.cfg.cruise_duty, 0.6);
}

TEST(Mission, UnknownCommandIsReportedAndSkipped) {
  Machine m;
  m.push("JUMP");
  m.push("PING");
  const auto r = m.tick(at(0.2));
  EXPECT_TRUE(m.has(r, Kind::UnknownCommand));
  EXPECT_TRUE(m.has(r, Kind::CommandCompleted));
  EXPECT_TRUE(m.inbox.empty());
}

TEST(Mission, OnlyOneCommandPerPrompt) {
  Machine m;
  m.push("DIVE 1.0");
  m.push("END");
  m.tick(at(0.2));
  EXPECT_EQ(m.inbox.size(), 1u);
  // Queued input is ignored while a routine runs.
  m.tick(at(0.5));
  EXPECT_EQ(m.inbox.size(), 1u);
}

TEST(Mission, CalibrateCollectsSamples) {
  Machine m;
  m.state.cfg.calibration_samples = 3;
  m.push("CAL");
  m.tick(at(0.2, 1.0, 7.0));
  m.tick(at(0.2, 1.0, 7.0));
  const auto r = m.tick(at(0.2, 1.0, 7.0));
  EXPECT_TRUE(m.has(r, Kind::CommandCompleted));
  EXPECT_NEAR(m.state.calibration.pitch_offset_deg, 1.0, 1e-12);
  EXPECT_NEAR(m.state.calibration.heading_offset_deg, 7.0, 1e-9);
}

TEST(Mission, EndTerminates) {
  Machine m;
  m.push("end");
  const auto r = m.tick(at(0.2));
  EXPECT_TRUE(std::holds_alternative<phase::Ended>(m.state.phase));
  EXPECT_TRUE(m.has(r, Kind::FlushLog));
  EXPECT_TRUE(m.has(r, Kind::TerminateLink));
  m.push("DIVE 1.0");
  m.tick(at(0.2));
  EXPECT_TRUE(std::holds_alternative<phase::Ended>(m.state.phase));
}

}  // namespace
}  // namespace auvtwin
