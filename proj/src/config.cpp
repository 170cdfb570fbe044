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

#include "auvtwin/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace auvtwin {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> numbers(std::string_view key, std::string_view value) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i < value.size()) {
    while (i < value.size() && (value[i] == ' ' || value[i] == '\t')) ++i;
    if (i == value.size()) break;
    double v = 0;
    const auto res = std::from_chars(value.data() + i, value.data() + value.size(), v);
    if (res.ec != std::errc{} || !std::isfinite(v)) {
      throw std::invalid_argument(std::string(key) + ": bad number in '" + std::string(value) +
                                  "'");
    }
    i = static_cast<std::size_t>(res.ptr - value.data());
    if (i < value.size() && value[i] != ' ' && value[i] != '\t') {
      throw std::invalid_argument(std::string(key) + ": bad number in '" + std::string(value) +
                                  "'");
    }
    out.push_back(v);
  }
  return out;
}

double scalar(std::string_view key, std::string_view value) {
  const auto v = numbers(key, value);
  if (v.size() != 1) {
    throw std::invalid_argument(std::string(key) + ": expected one number");
  }
  return v.front();
}

std::uint64_t unsigned_int(std::string_view key, std::string_view value) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
    throw std::invalid_argument(std::string(key) + ": expected a nonnegative integer");
  }
  return v;
}

template <int N>
Eigen::Matrix<double, N, 1> vector(std::string_view key, std::string_view value) {
  const auto v = numbers(key, value);
  if (v.size() != N) {
    throw std::invalid_argument(std::string(key) + ": expected " + std::to_string(N) +
                                " numbers");
  }
  Eigen::Matrix<double, N, 1> out;
  for (int i = 0; i < N; ++i) out(i) = v[static_cast<std::size_t>(i)];
  return out;
}

int ratio(double numerator, double denominator, const char* what) {
  const double r = numerator / denominator;
  const long rounded = std::lround(r);
  if (rounded < 1 || std::abs(r - static_cast<double>(rounded)) > 1e-9) {
    throw std::invalid_argument(std::string(what) + " must be a whole multiple");
  }
  return static_cast<int>(rounded);
}

}  // namespace

int SimConfig::substeps() const {
  return ratio(control.control_period_s, sim.dt_s, "control.control_period_s / sim.dt_s");
}

int SimConfig::gps_every() const {
  return ratio(gps.period_s, control.control_period_s, "gps.period_s / control.control_period_s");
}

int SimConfig::camera_every() const {
  return ratio(sim.camera_period_s, control.control_period_s,
               "sim.camera_period_s / control.control_period_s");
}

void SimConfig::validate() const {
  vehicle.validate();
  sensors.validate();
  control.validate();
  if (!(sim.dt_s > 0) || sim.dt_s > kMaxStep_s) {
    throw std::invalid_argument("sim.dt_s must be in (0, 0.1]");
  }
  if (!(sim.max_duration_s > 0)) throw std::invalid_argument("sim.max_duration_s must be > 0");
  if (gps.noise_std_m < 0) throw std::invalid_argument("gps.noise_std_m must be >= 0");
  if (link.telemetry_decimation < 1) {
    throw std::invalid_argument("link.telemetry_decimation must be >= 1");
  }
  if (link.frame_queue < 1) throw std::invalid_argument("link.frame_queue must be >= 1");
  if (control.depth_offset_m != vehicle.sensor_mount_offset_m) {
    throw std::invalid_argument("control depth offset out of sync with sensor_mount_offset_m");
  }
  substeps();
  gps_every();
  camera_every();
}

void SimConfig::reseed(std::uint64_t seed) {
  sensors.rng_seed = seed;
  gps.rng_seed = seed + 1;
}

void SimConfig::make_noiseless() {
  sensors.pressure_noise_std_Pa = 0;
  sensors.compass_noise_std_deg = 0;
  sensors.gyro_noise_std_deg = 0;
  gps.noise_std_m = 0;
}

void apply_config_value(SimConfig& cfg, std::string_view key, std::string_view value) {
  value = trim(value);
  auto& v = cfg.vehicle;
  auto& s = cfg.sensors;
  auto& c = cfg.control;

  // Dynamics: bare field names.
  if (key == "mass_kg") v.mass_kg = scalar(key, value);
  else if (key == "volume_m3") v.volume_m3 = scalar(key, value);
  else if (key == "water_density_kg_m3") v.water_density_kg_m3 = scalar(key, value);
  else if (key == "gravity_m_s2") v.gravity_m_s2 = scalar(key, value);
  else if (key == "hull_length_m") v.hull_length_m = scalar(key, value);
  else if (key == "hull_diameter_m") v.hull_diameter_m = scalar(key, value);
  else if (key == "drag_linear") v.drag_linear = vector<3>(key, value);
  else if (key == "drag_angular") v.drag_angular = vector<2>(key, value);
  else if (key == "thruster_max_force_N") v.thruster_max_force_N = scalar(key, value);
  else if (key == "pitch_thruster_lever_arm_m") v.pitch_thruster_lever_arm_m = scalar(key, value);
  else if (key == "rope_length_m") v.rope_length_m = scalar(key, value);
  else if (key == "sensor_mount_offset_m") {
    v.sensor_mount_offset_m = scalar(key, value);
    c.depth_offset_m = v.sensor_mount_offset_m;
  } else if (key == "righting_arm_m") v.righting_arm_m = scalar(key, value);

  else if (key == "sensor.pressure_noise_std_Pa") s.pressure_noise_std_Pa = scalar(key, value);
  else if (key == "sensor.compass_noise_std_deg") s.compass_noise_std_deg = scalar(key, value);
  else if (key == "sensor.gyro_noise_std_deg") s.gyro_noise_std_deg = scalar(key, value);
  else if (key == "sensor.compass_bias_deg") s.compass_bias_deg = scalar(key, value);
  else if (key == "sensor.gyro_bias_deg") s.gyro_bias_deg = scalar(key, value);
  else if (key == "sensor.atmospheric_pressure_Pa") s.atmospheric_pressure_Pa = scalar(key, value);
  else if (key == "sensor.rng_seed") s.rng_seed = unsigned_int(key, value);
  else if (key == "sensor.compass_reference_deg") s.compass_reference_deg = scalar(key, value);

  else if (key == "control.heading_target_deg" && value == "latch") {
    c.heading_target_deg = std::numeric_limits<double>::quiet_NaN();
  } else if (key == "control.control_period_s") c.control_period_s = scalar(key, value);
  else if (key == "control.calibration_samples") {
    c.calibration_samples = static_cast<int>(unsigned_int(key, value));
  } else if (key.starts_with("control.") && is_runtime_settable(key.substr(8))) {
    set_control_value(c, key.substr(8), scalar(key, value));
  }

  else if (key == "gps.period_s") cfg.gps.period_s = scalar(key, value);
  else if (key == "gps.noise_std_m") cfg.gps.noise_std_m = scalar(key, value);
  else if (key == "gps.rng_seed") cfg.gps.rng_seed = unsigned_int(key, value);
  else if (key == "gps.anchor") {
    const auto ll = numbers(key, value);
    if (ll.size() != 2) throw std::invalid_argument("gps.anchor: expected 'lat lon'");
    cfg.gps.anchor = GeoAnchor{ll[0], ll[1]};
  }

  else if (key == "link.telemetry_decimation") {
    cfg.link.telemetry_decimation = static_cast<int>(unsigned_int(key, value));
  } else if (key == "link.listen") cfg.link.listen = value;
  else if (key == "link.ws") cfg.link.ws = value;
  else if (key == "link.frame_queue") cfg.link.frame_queue = unsigned_int(key, value);

  else if (key == "sim.dt_s") cfg.sim.dt_s = scalar(key, value);
  else if (key == "sim.initial_heading_deg") cfg.sim.initial_heading_deg = scalar(key, value);
  else if (key == "sim.max_duration_s") cfg.sim.max_duration_s = scalar(key, value);
  else if (key == "sim.camera_period_s") cfg.sim.camera_period_s = scalar(key, value);

  else throw std::invalid_argument("unknown config key: " + std::string(key));
}

SimConfig parse_config(std::string_view text) {
  SimConfig cfg;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

namespace {

std::string num(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string dump_config(const SimConfig& cfg) {
  const auto& v = cfg.vehicle;
  const auto& s = cfg.sensors;
  const auto& c = cfg.control;
  std::ostringstream out;
  auto line = [&](std::string_view key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  line("mass_kg", num(v.mass_kg));
  line("volume_m3", num(v.volume_m3));
  line("water_density_kg_m3", num(v.water_density_kg_m3));
  line("gravity_m_s2", num(v.gravity_m_s2));
  line("hull_length_m", num(v.hull_length_m));
  line("hull_diameter_m", num(v.hull_diameter_m));
  line("drag_linear", num(v.drag_linear[0]) + " " + num(v.drag_linear[1]) + " " +
                          num(v.drag_linear[2]));
  line("drag_angular", num(v.drag_angular[0]) + " " + num(v.drag_angular[1]));
  line("thruster_max_force_N", num(v.thruster_max_force_N));
  line("pitch_thruster_lever_arm_m", num(v.pitch_thruster_lever_arm_m));
  line("rope_length_m", num(v.rope_length_m));
  line("sensor_mount_offset_m", num(v.sensor_mount_offset_m));
  line("righting_arm_m", num(v.righting_arm_m));

  line("sensor.pressure_noise_std_Pa", num(s.pressure_noise_std_Pa));
  line("sensor.compass_noise_std_deg", num(s.compass_noise_std_deg));
  line("sensor.gyro_noise_std_deg", num(s.gyro_noise_std_deg));
  line("sensor.compass_bias_deg", num(s.compass_bias_deg));
  line("sensor.gyro_bias_deg", num(s.gyro_bias_deg));
  line("sensor.atmospheric_pressure_Pa", num(s.atmospheric_pressure_Pa));
  line("sensor.rng_seed", std::to_string(s.rng_seed));
  line("sensor.compass_reference_deg", num(s.compass_reference_deg));

  line("control.target_depth_m", num(c.target_depth_m));
  line("control.depth_band_m", num(c.depth_band_m));
  line("control.pitch_limit_deg", num(c.pitch_limit_deg));
  line("control.heading_tolerance_deg", num(c.heading_tolerance_deg));
  line("control.surface_depth_m", num(c.surface_depth_m));
  line("control.control_period_s", num(c.control_period_s));
  line("control.cruise_duty", num(c.cruise_duty));
  line("control.correction_duty", num(c.correction_duty));
  line("control.descend_timeout_s", num(c.descend_timeout_s));
  line("control.surface_timeout_s", num(c.surface_timeout_s));
  line("control.heading_target_deg",
       std::isnan(c.heading_target_deg) ? std::string("latch") : num(c.heading_target_deg));
  line("control.calibration_samples", std::to_string(c.calibration_samples));

  line("gps.period_s", num(cfg.gps.period_s));
  line("gps.noise_std_m", num(cfg.gps.noise_std_m));
  line("gps.rng_seed", std::to_string(cfg.gps.rng_seed));
  if (cfg.gps.anchor) {
    line("gps.anchor", num(cfg.gps.anchor->lat_deg) + " " + num(cfg.gps.anchor->lon_deg));
  }

  line("link.telemetry_decimation", std::to_string(cfg.link.telemetry_decimation));
  line("link.listen", cfg.link.listen);
  line("link.ws", cfg.link.ws);
  line("link.frame_queue", std::to_string(cfg.link.frame_queue));

  line("sim.dt_s", num(cfg.sim.dt_s));
  line("sim.initial_heading_deg", num(cfg.sim.initial_heading_deg));
  line("sim.max_duration_s", num(cfg.sim.max_duration_s));
  line("sim.camera_period_s", num(cfg.sim.camera_period_s));
  return out.str();
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

}  // namespace auvtwin
