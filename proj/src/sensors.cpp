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

#include "auvtwin/sensors.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace auvtwin {

namespace {

// splitmix64 finalizer, used to derive an independent stream per sample.
std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double gaussian(std::mt19937_64& rng, double stddev) {
  if (stddev == 0) return 0;
  return std::normal_distribution<double>(0.0, stddev)(rng);
}

}  // namespace

void SensorConfig::validate() const {
  if (pressure_noise_std_Pa < 0 || compass_noise_std_deg < 0 || gyro_noise_std_deg < 0) {
    throw std::invalid_argument("SensorConfig: noise std must be >= 0");
  }
  if (!(atmospheric_pressure_Pa > 0)) {
    throw std::invalid_argument("SensorConfig: atmospheric_pressure_Pa must be > 0");
  }
}

double pressure_to_depth(double pressure_Pa, double atmospheric_Pa, double density_kg_m3,
                         double gravity_m_s2) {
  if (!(density_kg_m3 > 0) || !(gravity_m_s2 > 0)) {
    throw std::invalid_argument("pressure_to_depth: density and gravity must be > 0");
  }
  return std::max(0.0, (pressure_Pa - atmospheric_Pa) / (density_kg_m3 * gravity_m_s2));
}

double depth_to_pressure(double depth_m, double atmospheric_Pa, double density_kg_m3,
                         double gravity_m_s2) {
  return atmospheric_Pa + depth_m * (density_kg_m3 * gravity_m_s2);
}

double sensor_port_depth(const VehicleState& state, const VehicleParams& params) {
  return state.depth_m + params.sensor_mount_offset_m * std::cos(deg2rad(state.pitch_deg));
}

SensorSnapshot sample(const VehicleState& state, const VehicleParams& params,
                      const SensorConfig& cfg, const Calibration& calibration,
                      std::uint64_t sample_index) {
  std::mt19937_64 rng(mix(mix(cfg.rng_seed) ^ sample_index));

  const double rho = params.water_density_kg_m3;
  const double g = params.gravity_m_s2;

  SensorSnapshot s;
  s.t_s = state.t_s;
  s.pressure_Pa = depth_to_pressure(sensor_port_depth(state, params), cfg.atmospheric_pressure_Pa,
                                    rho, g) +
                  gaussian(rng, cfg.pressure_noise_std_Pa);
  s.sensed_depth_m = pressure_to_depth(s.pressure_Pa, cfg.atmospheric_pressure_Pa, rho, g);

  const double compass = state.heading_deg + cfg.compass_bias_deg +
                         gaussian(rng, cfg.compass_noise_std_deg);
  s.heading_deg = wrap_360(compass - calibration.heading_offset_deg);

  const double gyro_noise = gaussian(rng, cfg.gyro_noise_std_deg);
  s.pitch_deg = std::clamp(
      state.pitch_deg + cfg.gyro_bias_deg + gyro_noise - calibration.pitch_offset_deg, -90.0, 90.0);
  s.pitch_rate_deg_s = state.pitch_rate_deg_s + gaussian(rng, cfg.gyro_noise_std_deg);
  return s;
}

Calibration calibrate(std::span<const SensorSnapshot> stream, std::size_t n_samples,
                      double reference_heading_deg) {
  if (n_samples == 0) throw std::invalid_argument("calibrate: n_samples must be >= 1");
  if (stream.size() < n_samples) {
    throw std::runtime_error("calibrate: stream ended after " + std::to_string(stream.size()) +
                             " of " + std::to_string(n_samples) + " samples");
  }

  double pitch_sum = 0;
  double sin_sum = 0;
  double cos_sum = 0;
  for (const auto& s : stream.first(n_samples)) {
    pitch_sum += s.pitch_deg;
    sin_sum += std::sin(deg2rad(s.heading_deg));
    cos_sum += std::cos(deg2rad(s.heading_deg));
  }

  Calibration c;
  c.pitch_offset_deg = pitch_sum / static_cast<double>(n_samples);
  // Circular mean, so readings straddling north average correctly.
  const double mean_heading = rad2deg(std::atan2(sin_sum, cos_sum));
  c.heading_offset_deg = -heading_error(mean_heading, reference_heading_deg);
  return c;
}

double heading_error(double current_deg, double target_deg) {
  double e = std::fmod(target_deg - current_deg, 360.0);
  if (e <= -180.0) e += 360.0;
  if (e > 180.0) e -= 360.0;
  return e;
}

}  // namespace auvtwin
