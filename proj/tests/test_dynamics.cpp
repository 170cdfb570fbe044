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
#include <random>

#include <gtest/gtest.h>

#include "auvtwin/dynamics.hpp"

namespace auvtwin {
namespace {

constexpr double kDt = 0.02;

double kinetic_energy(const VehicleState& s, const VehicleParams& p) {
  const double q = deg2rad(s.pitch_rate_deg_s);
  const double r = deg2rad(s.heading_rate_deg_s);
  return 0.5 * p.mass_kg * s.velocity().squaredNorm() +
         0.5 * p.transverse_inertia() * (q * q + r * r);
}

TEST(Dynamics, DefaultsAreNeutrallyBuoyant) {
  const VehicleParams p;
  EXPECT_NEAR(net_buoyancy_force(p), 0.0, 1e-9);
}

TEST(Dynamics, BuoyancySign) {
  VehicleParams p;
  p.mass_kg = 3.0;
  // Hand value: (1000 * 0.00395 - 3.0) * 9.81.
  EXPECT_NEAR(net_buoyancy_force(p), 0.95 * 9.81, 1e-9);
  p.mass_kg = 5.0;
  EXPECT_LT(net_buoyancy_force(p), 0.0);
}

TEST(Dynamics, MotionlessVehicleStaysPut) {
  const VehicleParams p;
  VehicleState s;
  s.depth_m = 0.5;
  const VehicleState start = s;
  for (int i = 0; i < 10000; ++i) s = step(s, ThrusterCommand{}, p, kDt);
  EXPECT_LT((s.position() - start.position()).norm(), 1e-6);
  EXPECT_EQ(s.pitch_deg, 0.0);
  EXPECT_EQ(s.heading_deg, 0.0);
}

TEST(Dynamics, BodyAxesAreOrthonormal) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pitch(-90, 90), heading(0, 360);
  for (int i = 0; i < 200; ++i) {
    const auto a = body_axes(pitch(rng), heading(rng));
    EXPECT_NEAR(a.forward.norm(), 1.0, 1e-12);
    EXPECT_NEAR(a.up.norm(), 1.0, 1e-12);
    EXPECT_NEAR(a.right.norm(), 1.0, 1e-12);
    EXPECT_NEAR(a.forward.dot(a.up), 0.0, 1e-12);
    EXPECT_NEAR(a.forward.dot(a.right), 0.0, 1e-12);
    EXPECT_NEAR(a.up.dot(a.right), 0.0, 1e-12);
  }
}

TEST(Dynamics, BodyAxesMatchCompassConvention) {
  // Level, heading east: forward is +x, up is -z (depth decreasing).
  const auto east = body_axes(0.0, 90.0);
  EXPECT_NEAR(east.forward.x(), 1.0, 1e-12);
  EXPECT_NEAR(east.up.z(), -1.0, 1e-12);
  // Nose down 30 degrees, heading north: forward points north and deeper.
  const auto dive = body_axes(-30.0, 0.0);
  EXPECT_GT(dive.forward.y(), 0.0);
  EXPECT_NEAR(dive.forward.z(), 0.5, 1e-12);
}

TEST(Dynamics, WrapIntoHalfOpenCircle) {
  EXPECT_EQ(wrap_360(0.0), 0.0);
  EXPECT_EQ(wrap_360(360.0), 0.0);
  EXPECT_EQ(wrap_360(-90.0), 270.0);
  EXPECT_EQ(wrap_360(725.0), 5.0);
  const double tiny = wrap_360(-1e-15);
  EXPECT_GE(tiny, 0.0);
  EXPECT_LT(tiny, 360.0);
}

TEST(Dynamics, RejectsBadTimestep) {
  const VehicleParams p;
  const VehicleState s;
  EXPECT_THROW(step(s, ThrusterCommand{}, p, 0.0), std::invalid_argument);
  EXPECT_THROW(step(s, ThrusterCommand{}, p, -0.01), std::invalid_argument);
  EXPECT_THROW(step(s, ThrusterCommand{}, p, 0.2), std::invalid_argument);
  EXPECT_NO_THROW(step(s, ThrusterCommand{}, p, 0.1));
}

TEST(Dynamics, RearThrustMovesAlongHeading) {
  const VehicleParams p;
  VehicleState s;
  s.depth_m = 0.5;
  s.heading_deg = 90.0;
  for (int i = 0; i < 500; ++i) s = step(s, ThrusterCommand{0, 0, 0.6, 0.6}, p, kDt);
  EXPECT_GT(s.x_m, 1.0);
  EXPECT_NEAR(s.y_m, 0.0, 1e-9);
  EXPECT_NEAR(s.depth_m, 0.5, 1e-9);
  // Terminal surge speed is 2 * duty * Fmax / drag.
  const double terminal = 2 * 0.6 * p.thruster_max_force_N / p.drag_linear(0);
  EXPECT_NEAR(s.velocity().norm(), terminal, 1e-3 * terminal);
}

TEST(Dynamics, DifferentialRearThrustTurnsClockwise) {
  const VehicleParams p;
  VehicleState s;
  s.depth_m = 0.5;
  s.heading_deg = 10.0;
  for (int i = 0; i < 50; ++i) s = step(s, ThrusterCommand{0, 0, 0.8, 0.4}, p, kDt);
  EXPECT_GT(s.heading_deg, 10.0);
  s.heading_deg = 10.0;
  s.heading_rate_deg_s = 0;
  for (int i = 0; i < 50; ++i) s = step(s, ThrusterCommand{0, 0, 0.4, 0.8}, p, kDt);
  EXPECT_LT(s.heading_deg, 10.0);
}

TEST(Dynamics, NoseDownThenRearThrustDescends) {
  const VehicleParams p;
  VehicleState s;
  for (int i = 0; i < 25; ++i) s = step(s, ThrusterCommand{-0.8, -0.8, 0, 0}, p, kDt);
  EXPECT_LT(s.pitch_deg, 0.0);
  double previous = s.depth_m;
  for (int i = 0; i < 200; ++i) {
    s = step(s, ThrusterCommand{-0.8, -0.8, 0.6, 0.6}, p, kDt);
    EXPECT_GT(s.depth_m, previous) << "step " << i;
    previous = s.depth_m;
  }
}

TEST(Dynamics, SurfaceContactIsInelastic) {
  const VehicleParams p;
  VehicleState s;
  s.depth_m = 0.005;
  s.vz = -0.5;
  s = step(s, ThrusterCommand{}, p, kDt);
  EXPECT_EQ(s.depth_m, 0.0);
  EXPECT_EQ(s.vz, 0.0);
  for (int i = 0; i < 100; ++i) {
    s = step(s, ThrusterCommand{0.8, 0.8, 0, 0}, p, kDt);
    EXPECT_GE(s.depth_m, 0.0);
  }
}

TEST(Dynamics, PitchStaysWithinVertical) {
  VehicleParams p;
  p.righting_arm_m = 0;
  p.drag_angular(0) = 0;
  VehicleState s;
  s.depth_m = 0.5;
  for (int i = 0; i < 2000; ++i) {
    s = step(s, ThrusterCommand{1, 1, 0, 0}, p, kDt);
    ASSERT_LE(s.pitch_deg, 90.0);
    ASSERT_GE(s.pitch_deg, -90.0);
    ASSERT_GE(s.heading_deg, 0.0);
    ASSERT_LT(s.heading_deg, 360.0);
  }
  EXPECT_EQ(s.pitch_deg, 90.0);
}

TEST(Dynamics, UnpoweredMotionLosesEnergy) {
  const VehicleParams p;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    VehicleState s;
    s.depth_m = 2.0;
    s.vx = u(rng);
    s.vy = u(rng);
    s.vz = 0.2 * u(rng);
    s.heading_rate_deg_s = 30 * u(rng);
    s.heading_deg = 180 + 180 * u(rng);
    // Level, so the righting moment stores no energy.
    double previous = kinetic_energy(s, p);
    for (int i = 0; i < 300; ++i) {
      s = step(s, ThrusterCommand{}, p, kDt);
      const double e = kinetic_energy(s, p);
      ASSERT_LE(e, previous + 1e-12) << "trial " << trial << " step " << i;
      previous = e;
    }
  }
}

TEST(Dynamics, RightingMomentLevelsTheHull) {
  const VehicleParams p;
  VehicleState s;
  s.depth_m = 1.0;
  s.pitch_deg = 25.0;
  for (int i = 0; i < 3000; ++i) s = step(s, ThrusterCommand{}, p, kDt);
  EXPECT_NEAR(s.pitch_deg, 0.0, 0.1);
}

TEST(Dynamics, StepIsBitDeterministic) {
  const VehicleParams p;
  VehicleState a, b;
  const ThrusterCommand c{-0.3, 0.2, 0.7, 0.5};
  for (int i = 0; i < 1000; ++i) {
    a = step(a, c, p, kDt);
    b = step(b, c, p, kDt);
  }
  EXPECT_EQ(a, b);
}

TEST(Dynamics, FloatFollowsVehicleAndFlagsTautRope) {
  const VehicleParams p;
  VehicleState s;
  s.x_m = 3;
  s.y_m = -4;
  auto f = float_position(s, p);
  EXPECT_EQ(f.x_m, 3);
  EXPECT_EQ(f.y_m, -4);
  EXPECT_FALSE(f.taut_rope);
  s.depth_m = 1.3;
  EXPECT_TRUE(float_position(s, p).taut_rope);
}

TEST(Dynamics, SinglePrecisionInstantiates) {
  const BasicVehicleParams<float> p;
  BasicVehicleState<float> s;
  s.depth_m = 0.5f;
  for (int i = 0; i < 100; ++i) s = step(s, BasicThrusterCommand<float>{0, 0, 0.6f, 0.6f}, p, 0.02f);
  EXPECT_GT(s.y_m, 0.0f);
}

TEST(Dynamics, ParamsValidate) {
  VehicleParams p;
  EXPECT_NO_THROW(p.validate());
  p.mass_kg = 0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = VehicleParams{};
  p.drag_linear(1) = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace auvtwin
