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

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace auvtwin {

/// One control period.  Pitch and heading are the sensed values the vehicle
/// acted on; depth is logged both ways.
struct TelemetryRecord {
  double t_s = 0;
  double true_depth_m = 0;
  double sensed_depth_m = 0;
  double pitch_deg = 0;
  double heading_deg = 0;
  double x_m = 0;
  double y_m = 0;
  double float_x_m = 0;
  double float_y_m = 0;
  double duty_fl = 0;
  double duty_fr = 0;
  double duty_rl = 0;
  double duty_rr = 0;
  std::string phase;
  std::string tag;
  std::string link;

  bool operator==(const TelemetryRecord&) const = default;
};

struct GpsFix {
  double t_s = 0;
  double float_x_m = 0;
  double float_y_m = 0;

  bool operator==(const GpsFix&) const = default;
};

/// Geodetic anchor of the local frame origin.  When set, the GPS export adds
/// lat/lon columns from an equirectangular projection.
struct GeoAnchor {
  double lat_deg = 0;
  double lon_deg = 0;
};

struct LatLon {
  double lat_deg = 0;
  double lon_deg = 0;
};

LatLon to_lat_lon(const GeoAnchor& anchor, double east_m, double north_m);

inline constexpr const char* kTelemetryFile = "telemetry.csv";
inline constexpr const char* kGpsFile = "gps_track.csv";

void write_telemetry_csv(std::ostream& out, std::span<const TelemetryRecord> records);
void write_gps_csv(std::ostream& out, std::span<const GpsFix> fixes,
                   const std::optional<GeoAnchor>& anchor);

/// Throws std::runtime_error naming the line on malformed input.  An empty
/// stream holds no rows.
std::vector<TelemetryRecord> read_telemetry_csv(std::istream& in);
std::vector<GpsFix> read_gps_csv(std::istream& in);

std::vector<TelemetryRecord> read_telemetry_file(const std::filesystem::path& path);
std::vector<GpsFix> read_gps_file(const std::filesystem::path& path);

/// In-memory mission log.  flush() rewrites both files in full through a
/// temporary and a rename, so it can be repeated and readers never see a
/// partial file.
class MissionLog {
 public:
  explicit MissionLog(std::filesystem::path out_dir,
                      std::optional<GeoAnchor> anchor = std::nullopt);

  /// Throws std::invalid_argument if t_s does not strictly increase.
  void append(TelemetryRecord record);
  void append(GpsFix fix);

  /// Throws std::runtime_error on any I/O failure.
  void flush() const;

  const std::vector<TelemetryRecord>& records() const { return records_; }
  const std::vector<GpsFix>& fixes() const { return fixes_; }
  const std::filesystem::path& out_dir() const { return out_dir_; }

 private:
  std::filesystem::path out_dir_;
  std::optional<GeoAnchor> anchor_;
  std::vector<TelemetryRecord> records_;
  std::vector<GpsFix> fixes_;
};

/// Sum of planar distances between consecutive fixes.
double track_length(std::span<const GpsFix> fixes);

struct DepthBand {
  double low_m = 0.95;
  double high_m = 1.45;

  bool contains(double sensed_depth_m) const;
};

struct DepthSample {
  double t_s = 0;
  double sensed_depth_m = 0;
};

struct DepthProfile {
  std::vector<DepthSample> series;
  // From the first Descending or Forward record to the first in-band sample.
  std::optional<double> time_to_band_s;
  double max_sensed_depth_m = 0;
  // Share of Forward records in band once settle_s has passed since the
  // first band entry.
  std::optional<double> in_band_fraction;
};

inline constexpr double kDefaultSettle_s = 30.0;

/// Throws std::invalid_argument on an empty log.
DepthProfile depth_profile(std::span<const TelemetryRecord> records, const DepthBand& band,
                           double settle_s = kDefaultSettle_s);

struct MissionSummary {
  std::optional<double> time_to_band_s;
  double max_sensed_depth_m = 0;
  std::optional<double> in_band_fraction;
  double track_length_m = 0;
  double duration_s = 0;
};

MissionSummary summarize(std::span<const TelemetryRecord> records, std::span<const GpsFix> fixes,
                         const DepthBand& band, double settle_s = kDefaultSettle_s);

}  // namespace auvtwin
