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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace auvtwin {

// World frame: x east, y north, z down (depth).  Heading is compass style,
// degrees clockwise from north.  Pitch is positive nose up.
//
// The model has four degrees of freedom: surge, heave, pitch and yaw.  Sway
// and roll are frozen at zero, so any lateral velocity is projected out after
// each step.

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;

template <typename Scalar>
struct BasicVehicleParams {
  Scalar mass_kg = Scalar(3.95);
  Scalar volume_m3 = Scalar(0.00395);
  Scalar water_density_kg_m3 = Scalar(1000);
  Scalar gravity_m_s2 = Scalar(9.81);
  Scalar hull_length_m = Scalar(0.380);
  Scalar hull_diameter_m = Scalar(0.100);
  // Surge, sway, heave.  N s / m.
  Vec3<Scalar> drag_linear{Scalar(12), Scalar(40), Scalar(20)};
  // Pitch, yaw.  N m s / rad.
  Vec2<Scalar> drag_angular{Scalar(1.5), Scalar(0.5)};
  Scalar thruster_max_force_N = Scalar(1.8);
  Scalar pitch_thruster_lever_arm_m = Scalar(0.19);
  Scalar rope_length_m = Scalar(1.2);
  Scalar sensor_mount_offset_m = Scalar(0.2);
  // Distance of the centre of gravity below the centre of buoyancy.  Gives
  // the hull its hydrostatic pitch restoring moment.
  Scalar righting_arm_m = Scalar(0.02);

  void validate() const {
    auto require = [](bool ok, const char* what) {
      if (!ok) throw std::invalid_argument(std::string("VehicleParams: ") + what);
    };
    require(mass_kg > 0, "mass_kg must be > 0");
    require(volume_m3 > 0, "volume_m3 must be > 0");
    require(water_density_kg_m3 > 0, "water_density_kg_m3 must be > 0");
    require(gravity_m_s2 > 0, "gravity_m_s2 must be > 0");
    require(hull_length_m > 0, "hull_length_m must be > 0");
    require(hull_diameter_m > 0, "hull_diameter_m must be > 0");
    require((drag_linear.array() >= 0).all(), "drag_linear must be >= 0");
    require((drag_angular.array() >= 0).all(), "drag_angular must be >= 0");
    require(thruster_max_force_N > 0, "thruster_max_force_N must be > 0");
    require(pitch_thruster_lever_arm_m >= 0, "pitch_thruster_lever_arm_m must be >= 0");
    require(rope_length_m > 0, "rope_length_m must be > 0");
    require(sensor_mount_offset_m >= 0, "sensor_mount_offset_m must be >= 0");
    require(righting_arm_m >= 0, "righting_arm_m must be >= 0");
  }

  // Solid cylinder about a transverse axis through the centre.
  Scalar transverse_inertia() const {
    const Scalar r = hull_diameter_m / 2;
    return mass_kg * (3 * r * r + hull_length_m * hull_length_m) / 12;
  }
};

template <typename Scalar>
struct BasicVehicleState {
  Scalar t_s = 0;
  Scalar x_m = 0;
  Scalar y_m = 0;
  Scalar depth_m = 0;
  Scalar vx = 0;
  Scalar vy = 0;
  Scalar vz = 0;
  Scalar pitch_deg = 0;
  Scalar pitch_rate_deg_s = 0;
  Scalar heading_deg = 0;
  Scalar heading_rate_deg_s = 0;

  Vec3<Scalar> position() const { return {x_m, y_m, depth_m}; }
  Vec3<Scalar> velocity() const { return {vx, vy, vz}; }

  bool operator==(const BasicVehicleState&) const = default;
};

template <typename Scalar>
struct BasicThrusterCommand {
  Scalar front_left = 0;
  Scalar front_right = 0;
  Scalar rear_left = 0;
  Scalar rear_right = 0;

  BasicThrusterCommand clamped() const {
    auto c = [](Scalar d) { return std::clamp(d, Scalar(-1), Scalar(1)); };
    return {c(front_left), c(front_right), c(rear_left), c(rear_right)};
  }

  bool coasting() const {
    return front_left == 0 && front_right == 0 && rear_left == 0 && rear_right == 0;
  }

  bool operator==(const BasicThrusterCommand&) const = default;
};

template <typename Scalar>
struct BasicWrench {
  Vec3<Scalar> force_N = Vec3<Scalar>::Zero();  // world frame
  Scalar pitch_torque_Nm = 0;                   // positive nose up
  Scalar yaw_torque_Nm = 0;                     // positive clockwise
};

using VehicleParams = BasicVehicleParams<double>;
using VehicleState = BasicVehicleState<double>;
using ThrusterCommand = BasicThrusterCommand<double>;
using Wrench = BasicWrench<double>;

template <typename Scalar>
constexpr Scalar deg2rad(Scalar deg) {
  return deg * std::numbers::pi_v<Scalar> / Scalar(180);
}

template <typename Scalar>
constexpr Scalar rad2deg(Scalar rad) {
  return rad * Scalar(180) / std::numbers::pi_v<Scalar>;
}

/// Wraps an angle in degrees into [0, 360).
template <typename Scalar>
Scalar wrap_360(Scalar deg) {
  Scalar w = std::fmod(deg, Scalar(360));
  if (w < 0) w += Scalar(360);
  // fmod of a tiny negative plus 360 can round up to 360 exactly.
  if (w >= Scalar(360)) w -= Scalar(360);
  return w;
}

// Body axes expressed in the world frame.
template <typename Scalar>
struct BodyAxes {
  Vec3<Scalar> forward;
  Vec3<Scalar> up;
  Vec3<Scalar> right;
};

template <typename Scalar>
BodyAxes<Scalar> body_axes(Scalar pitch_deg, Scalar heading_deg) {
  const Scalar th = deg2rad(pitch_deg);
  const Scalar psi = deg2rad(heading_deg);
  const Scalar ct = std::cos(th), st = std::sin(th);
  const Scalar cp = std::cos(psi), sp = std::sin(psi);
  return {Vec3<Scalar>{ct * sp, ct * cp, -st},
          Vec3<Scalar>{-st * sp, -st * cp, -ct},
          Vec3<Scalar>{cp, -sp, Scalar(0)}};
}

/// Net hydrostatic force, positive up: (rho V - m) g.
template <typename Scalar>
Scalar net_buoyancy_force(const BasicVehicleParams<Scalar>& p) {
  return (p.water_density_kg_m3 * p.volume_m3 - p.mass_kg) * p.gravity_m_s2;
}

/// Thruster forces and torques.  The rear pair pushes along the body
/// longitudinal axis and steers by differential duty; the front pair pushes
/// along the body vertical axis at the nose, so it both heaves and pitches.
template <typename Scalar>
BasicWrench<Scalar> thrust_forces(const BasicThrusterCommand<Scalar>& cmd,
                                  const BasicVehicleParams<Scalar>& p,
                                  const BasicVehicleState<Scalar>& s) {
  const auto c = cmd.clamped();
  const Scalar fmax = p.thruster_max_force_N;
  const Scalar surge = (c.rear_left + c.rear_right) * fmax;
  const Scalar heave = (c.front_left + c.front_right) * fmax;
  const auto axes = body_axes(s.pitch_deg, s.heading_deg);

  BasicWrench<Scalar> w;
  w.force_N = surge * axes.forward + heave * axes.up;
  w.pitch_torque_Nm = heave * p.pitch_thruster_lever_arm_m;
  w.yaw_torque_Nm = (c.rear_left - c.rear_right) * fmax * (p.hull_diameter_m / 2);
  return w;
}

/// Linear drag in the body frame, returned in world coordinates.
template <typename Scalar>
Vec3<Scalar> drag_force(const Vec3<Scalar>& v, const BodyAxes<Scalar>& axes,
                        const BasicVehicleParams<Scalar>& p) {
  return -(p.drag_linear(0) * v.dot(axes.forward) * axes.forward +
           p.drag_linear(1) * v.dot(axes.right) * axes.right +
           p.drag_linear(2) * v.dot(axes.up) * axes.up);
}

inline constexpr double kMaxStep_s = 0.1;

/// One semi-implicit Euler step: rates and velocities first, then angles and
/// positions from the updated rates.
template <typename Scalar>
BasicVehicleState<Scalar> step(const BasicVehicleState<Scalar>& s,
                               const BasicThrusterCommand<Scalar>& cmd,
                               const BasicVehicleParams<Scalar>& p, Scalar dt) {
  if (!(dt > 0) || dt > Scalar(kMaxStep_s)) {
    throw std::invalid_argument("step: dt must be in (0, 0.1] s");
  }

  const auto axes = body_axes(s.pitch_deg, s.heading_deg);
  const auto thrust = thrust_forces(cmd, p, s);
  const Vec3<Scalar> v = s.velocity();

  Vec3<Scalar> force = thrust.force_N + drag_force(v, axes, p);
  force.z() -= net_buoyancy_force(p);

  const Scalar inertia = p.transverse_inertia();
  const Scalar q = deg2rad(s.pitch_rate_deg_s);
  const Scalar r = deg2rad(s.heading_rate_deg_s);
  const Scalar righting =
      -p.mass_kg * p.gravity_m_s2 * p.righting_arm_m * std::sin(deg2rad(s.pitch_deg));
  const Scalar pitch_acc = (thrust.pitch_torque_Nm - p.drag_angular(0) * q + righting) / inertia;
  const Scalar yaw_acc = (thrust.yaw_torque_Nm - p.drag_angular(1) * r) / inertia;

  BasicVehicleState<Scalar> n = s;
  n.t_s = s.t_s + dt;

  const Scalar q_new = q + pitch_acc * dt;
  const Scalar r_new = r + yaw_acc * dt;
  n.pitch_rate_deg_s = rad2deg(q_new);
  n.heading_rate_deg_s = rad2deg(r_new);
  n.pitch_deg = s.pitch_deg + n.pitch_rate_deg_s * dt;
  if (n.pitch_deg > Scalar(90) || n.pitch_deg < Scalar(-90)) {
    n.pitch_deg = std::clamp(n.pitch_deg, Scalar(-90), Scalar(90));
    n.pitch_rate_deg_s = 0;
  }
  n.heading_deg = wrap_360(s.heading_deg + n.heading_rate_deg_s * dt);

  Vec3<Scalar> v_new = v + force * (dt / p.mass_kg);
  const Vec3<Scalar> right = body_axes(n.pitch_deg, n.heading_deg).right;
  v_new -= v_new.dot(right) * right;

  Vec3<Scalar> pos = s.position() + v_new * dt;
  if (pos.z() < 0) {
    pos.z() = 0;
    if (v_new.z() < 0) v_new.z() = 0;
  }

  n.x_m = pos.x();
  n.y_m = pos.y();
  n.depth_m = pos.z();
  n.vx = v_new.x();
  n.vy = v_new.y();
  n.vz = v_new.z();
  return n;
}

template <typename Scalar>
struct BasicFloatPosition {
  Scalar x_m = 0;
  Scalar y_m = 0;
  bool taut_rope = false;
};

using FloatPosition = BasicFloatPosition<double>;

/// Kinematic vertical-rope model: the float sits directly above the vehicle.
template <typename Scalar>
BasicFloatPosition<Scalar> float_position(const BasicVehicleState<Scalar>& s,
                                          const BasicVehicleParams<Scalar>& p) {
  return {s.x_m, s.y_m, s.depth_m > p.rope_length_m};
}

}  // namespace auvtwin
