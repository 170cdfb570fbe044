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

#include "auvtwin/mission_log.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace auvtwin {

namespace {

constexpr std::string_view kTelemetryHeader =
    "t_s,true_depth_m,sensed_depth_m,pitch_deg,heading_deg,x_m,y_m,float_x_m,float_y_m,"
    "duty_fl,duty_fr,duty_rl,duty_rr,phase,tag,link";
constexpr std::string_view kGpsHeader = "t_s,float_x_m,float_y_m";
constexpr std::string_view kGpsGeoHeader = "t_s,float_x_m,float_y_m,lat,lon";

constexpr double kEarthRadius_m = 6371000.0;

// Shortest representation that parses back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double number(std::string_view field, std::size_t line_no) {
  double v = 0;
  const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
  if (res.ec != std::errc{} || res.ptr != field.data() + field.size()) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": bad number '" +
                             std::string(field) + "'");
  }
  return v;
}

std::string_view chomp(const std::string& line) {
  std::string_view v(line);
  if (!v.empty() && v.back() == '\r') v.remove_suffix(1);
  return v;
}

template <typename Row, typename Parse>
std::vector<Row> read_rows(std::istream& in, std::initializer_list<std::string_view> headers,
                           Parse parse) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = chomp(line);
  if (std::find(headers.begin(), headers.end(), header) == headers.end()) {
    throw std::runtime_error("unexpected header '" + std::string(header) + "'");
  }
  const std::size_t columns = split(header).size();

  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = chomp(line);
    if (body.empty()) continue;
    const auto fields = split(body);
    if (fields.size() != columns) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns) + " fields, got " +
                               std::to_string(fields.size()));
    }
    rows.push_back(parse(fields, line_no));
  }
  return rows;
}

void write_atomically(const std::filesystem::path& target, const std::string& contents) {
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw std::runtime_error("rename " + tmp.string() + ": " + ec.message());
}

}  // namespace

LatLon to_lat_lon(const GeoAnchor& anchor, double east_m, double north_m) {
  const double rad = std::numbers::pi / 180.0;
  return {anchor.lat_deg + north_m / kEarthRadius_m / rad,
          anchor.lon_deg + east_m / (kEarthRadius_m * std::cos(anchor.lat_deg * rad)) / rad};
}

void write_telemetry_csv(std::ostream& out, std::span<const TelemetryRecord> records) {
  out << kTelemetryHeader << '\n';
  for (const auto& r : records) {
    out << fmt(r.t_s) << ',' << fmt(r.true_depth_m) << ',' << fmt(r.sensed_depth_m) << ','
        << fmt(r.pitch_deg) << ',' << fmt(r.heading_deg) << ',' << fmt(r.x_m) << ','
        << fmt(r.y_m) << ',' << fmt(r.float_x_m) << ',' << fmt(r.float_y_m) << ','
        << fmt(r.duty_fl) << ',' << fmt(r.duty_fr) << ',' << fmt(r.duty_rl) << ','
        << fmt(r.duty_rr) << ',' << r.phase << ',' << r.tag << ',' << r.link << '\n';
  }
}

void write_gps_csv(std::ostream& out, std::span<const GpsFix> fixes,
                   const std::optional<GeoAnchor>& anchor) {
  out << (anchor ? kGpsGeoHeader : kGpsHeader) << '\n';
  for (const auto& f : fixes) {
    out << fmt(f.t_s) << ',' << fmt(f.float_x_m) << ',' << fmt(f.float_y_m);
    if (anchor) {
      const auto ll = to_lat_lon(*anchor, f.float_x_m, f.float_y_m);
      out << ',' << fmt(ll.lat_deg) << ',' << fmt(ll.lon_deg);
    }
    out << '\n';
  }
}

std::vector<TelemetryRecord> read_telemetry_csv(std::istream& in) {
  return read_rows<TelemetryRecord>(
      in, {kTelemetryHeader}, [](const std::vector<std::string_view>& f, std::size_t n) {
        TelemetryRecord r;
        r.t_s = number(f[0], n);
        r.true_depth_m = number(f[1], n);
        r.sensed_depth_m = number(f[2], n);
        r.pitch_deg = number(f[3], n);
        r.heading_deg = number(f[4], n);
        r.x_m = number(f[5], n);
        r.y_m = number(f[6], n);
        r.float_x_m = number(f[7], n);
        r.float_y_m = number(f[8], n);
        r.duty_fl = number(f[9], n);
        r.duty_fr = number(f[10], n);
        r.duty_rl = number(f[11], n);
        r.duty_rr = number(f[12], n);
        r.phase = f[13];
        r.tag = f[14];
        r.link = f[15];
        return r;
      });
}

std::vector<GpsFix> read_gps_csv(std::istream& in) {
  return read_rows<GpsFix>(in, {kGpsHeader, kGpsGeoHeader},
                           [](const std::vector<std::string_view>& f, std::size_t n) {
                             return GpsFix{number(f[0], n), number(f[1], n), number(f[2], n)};
                           });
}

namespace {

template <typename Read>
auto read_file(const std::filesystem::path& path, Read read) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  try {
    return read(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

}  // namespace

std::vector<TelemetryRecord> read_telemetry_file(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in) { return read_telemetry_csv(in); });
}

std::vector<GpsFix> read_gps_file(const std::filesystem::path& path) {
  return read_file(path, [](std::istream& in) { return read_gps_csv(in); });
}

MissionLog::MissionLog(std::filesystem::path out_dir, std::optional<GeoAnchor> anchor)
    : out_dir_(std::move(out_dir)), anchor_(anchor) {}

void MissionLog::append(TelemetryRecord record) {
  if (!records_.empty() && !(record.t_s > records_.back().t_s)) {
    throw std::invalid_argument("telemetry timestamps must strictly increase");
  }
  records_.push_back(std::move(record));
}

void MissionLog::append(GpsFix fix) { fixes_.push_back(fix); }

void MissionLog::flush() const {
  std::error_code ec;
  std::filesystem::create_directories(out_dir_, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir_.string() + ": " + ec.message());

  std::ostringstream telemetry;
  write_telemetry_csv(telemetry, records_);
  write_atomically(out_dir_ / kTelemetryFile, telemetry.str());

  std::ostringstream gps;
  write_gps_csv(gps, fixes_, anchor_);
  write_atomically(out_dir_ / kGpsFile, gps.str());
}

double track_length(std::span<const GpsFix> fixes) {
  double total = 0;
  for (std::size_t i = 1; i < fixes.size(); ++i) {
    total += std::hypot(fixes[i].float_x_m - fixes[i - 1].float_x_m,
                        fixes[i].float_y_m - fixes[i - 1].float_y_m);
  }
  return total;
}

bool DepthBand::contains(double sensed_depth_m) const {
  return sensed_depth_m >= low_m - 1e-9 && sensed_depth_m <= high_m + 1e-9;
}

DepthProfile depth_profile(std::span<const TelemetryRecord> records, const DepthBand& band,
                           double settle_s) {
  if (records.empty()) throw std::invalid_argument("no records");

  DepthProfile p;
  p.series.reserve(records.size());
  p.max_sensed_depth_m = records.front().sensed_depth_m;
  for (const auto& r : records) {
    p.series.push_back({r.t_s, r.sensed_depth_m});
    p.max_sensed_depth_m = std::max(p.max_sensed_depth_m, r.sensed_depth_m);
  }

  const auto diving = [](const TelemetryRecord& r) {
    return r.phase == "Descending" || r.phase == "Forward";
  };
  const auto start = std::find_if(records.begin(), records.end(), diving);
  if (start == records.end()) return p;

  const auto entry = std::find_if(start, records.end(), [&](const TelemetryRecord& r) {
    return band.contains(r.sensed_depth_m);
  });
  if (entry == records.end()) return p;
  p.time_to_band_s = entry->t_s - start->t_s;

  const double settled_at = entry->t_s + settle_s;
  std::size_t total = 0;
  std::size_t inside = 0;
  for (const auto& r : records) {
    if (r.phase != "Forward" || r.t_s < settled_at) continue;
    ++total;
    if (band.contains(r.sensed_depth_m)) ++inside;
  }
  if (total > 0) p.in_band_fraction = static_cast<double>(inside) / static_cast<double>(total);
  return p;
}

MissionSummary summarize(std::span<const TelemetryRecord> records, std::span<const GpsFix> fixes,
                         const DepthBand& band, double settle_s) {
  const auto profile = depth_profile(records, band, settle_s);
  MissionSummary s;
  s.time_to_band_s = profile.time_to_band_s;
  s.max_sensed_depth_m = profile.max_sensed_depth_m;
  s.in_band_fraction = profile.in_band_fraction;
  s.track_length_m = track_length(fixes);
  s.duration_s = records.back().t_s - records.front().t_s;
  return s;
}

}  // namespace auvtwin
