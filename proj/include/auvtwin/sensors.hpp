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

#include <cstdint>
#include <span>

#include "auvtwin/dynamics.hpp"

namespace auvtwin {

struct SensorConfig {
  double pressure_noise_std_Pa = 20.0;
  double compass_noise_std_deg = 1.0;
  double gyro_noise_std_deg = 0.5;
  double compass_bias_deg = 0.0;
  double gyro_bias_deg = 0.0;
  double atmospheric_pressure_Pa = 101325.0;
  std::uint64_t rng_seed = 1;
  // Bearing the hull is aligned to while the compass is calibrated.
  double compass_reference_deg = 0.0;

  void validate() const;
};

struct SensorSnapshot {
  double t_s = 0;
  double pressure_Pa = 0;
  double sensed_depth_m = 0;
  double heading_deg = 0;
  double pitch_deg = 0;
  double pitch_rate_deg_s = 0;

  bool operator==(const SensorSnapshot&) const = default;
};

/// Offsets subtracted from raw readings.  Default-constructed means raw mode.
struct Calibration {
  double pitch_offset_deg = 0;
  double heading_offset_deg = 0;

  bool operator==(const Calibration&) const = default;
};

/// Gauge pressure to depth, clamped at zero.  Throws on nonpositive density
/// or gravity.
double pressure_to_depth(double pressure_Pa, double atmospheric_Pa, double density_kg_m3,
                         double gravity_m_s2);

/// Absolute pressure at a depth.  Exact inverse of pressure_to_depth for
/// nonnegative depths.
double depth_to_pressure(double depth_m, double atmospheric_Pa, double density_kg_m3,
                         double gravity_m_s2);

/// Depth of the pressure port: centreline depth plus the mount offset along
/// the body down axis.
double sensor_port_depth(const VehicleState& state, const VehicleParams& params);

/// Samples every sensor channel.  Noise depends only on (rng_seed,
/// sample_index), so resampling the same index reproduces the snapshot.
SensorSnapshot sample(const VehicleState& state, const VehicleParams& params,
                      const SensorConfig& cfg, const Calibration& calibration,
                      std::uint64_t sample_index);

/// Mean gyro bias and compass offset from raw snapshots taken at rest, level,
/// on the reference bearing.  Throws if fewer than n_samples are available.
Calibration calibrate(std::span<const SensorSnapshot> stream, std::size_t n_samples,
                      double reference_heading_deg = 0.0);

/// Signed shortest arc from current to target in (-180, 180].  Positive
/// means turn clockwise.
double heading_error(double current_deg, double target_deg);

}  // namespace auvtwin
