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
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "auvtwin/controller.hpp"
#include "auvtwin/dynamics.hpp"
#include "auvtwin/mission_log.hpp"
#include "auvtwin/sensors.hpp"

namespace auvtwin {

struct GpsConfig {
  double period_s = 1.0;
  double noise_std_m = 1.5;
  std::uint64_t rng_seed = 2;
  std::optional<GeoAnchor> anchor;
};

struct LinkConfig {
  int telemetry_decimation = 5;
  std::string listen = "127.0.0.1:7070";
  std::string ws = "127.0.0.1:7071";
  std::size_t frame_queue = 256;
};

struct SimSettings {
  double dt_s = 0.02;
  double initial_heading_deg = 0.0;
  double max_duration_s = 3600.0;
  double camera_period_s = 1.0;
};

struct SimConfig {
  VehicleParams vehicle;
  SensorConfig sensors;
  ControlConfig control;
  GpsConfig gps;
  LinkConfig link;
  SimSettings sim;

  /// Control period in physics steps; throws unless it divides evenly.
  int substeps() const;
  /// Ticks between GPS fixes and camera frames.
  int gps_every() const;
  int camera_every() const;

  /// Validates every section and the cross-section constraints.
  void validate() const;

  /// Seeds every noise source from one value.
  void reseed(std::uint64_t seed);

  /// Turns off sensor and GPS noise.
  void make_noiseless();
};

/// Sets one key.  Dynamics keys are the bare VehicleParams field names;
/// other sections are prefixed: sensor., control., gps., link., sim.
/// Throws std::invalid_argument on unknown keys or bad values.
void apply_config_value(SimConfig& cfg, std::string_view key, std::string_view value);

/// key = value lines, '#' starts a comment.  Starts from built-in defaults.
SimConfig parse_config(std::string_view text);
SimConfig load_config(const std::filesystem::path& path);

/// Every key in parse_config syntax.  parse_config(dump_config(c)) == c.
std::string dump_config(const SimConfig& cfg);

}  // namespace auvtwin
