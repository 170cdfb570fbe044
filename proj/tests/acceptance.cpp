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

// Acceptance suite.  Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "auvtwin/config.hpp"
#include "auvtwin/net_transport.hpp"
#include "auvtwin/simulation.hpp"
#include "net_client.hpp"
#include "properties.hpp"
#include "test_util.hpp"

namespace auvtwin {
namespace {

// Tolerances.
constexpr double kBuoyancyTol_N = 1e-9;
constexpr int kRestSteps = 10000;
constexpr double kRestDriftTol_m = 1e-6;
constexpr double kSurfacedDepth_m = 0.2;
constexpr double kSurfacedDepthTol_m = 0.02;
constexpr double kTimeToBandMax_s = 60.0;
constexpr double kMaxDepthLow_m = 1.1;
constexpr double kMaxDepthHigh_m = 1.3;
constexpr double kInBandMin = 0.90;
constexpr double kDurationMax_s = 240.0;
constexpr double kTrackLow_m = 30.0;
constexpr double kTrackHigh_m = 42.0;
constexpr double kPressureInverseTol_m = 1e-12;
constexpr int kHeadingPairs = 10000;
constexpr double kHeadingTol_deg = 1e-9;
constexpr double kCalibrationSigmas = 3.0;

const std::filesystem::path kSource = AUVTWIN_SOURCE_DIR;

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Report {
 public:
  void check(const std::string& name, const std::function<Verdict()>& criterion) {
    Verdict v;
    try {
      v = criterion();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failures_ += v.pass ? 0 : 1;
  }
  int failures() const { return failures_; }

 private:
  int failures_ = 0;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

SimConfig field_config() {
  SimConfig cfg = load_config(kSource / "config" / "defaults.conf");
  cfg.make_noiseless();
  return cfg;
}

struct FieldRun {
  RunResult result;
  std::vector<TelemetryRecord> records;
  std::vector<GpsFix> fixes;
};

FieldRun field_run() {
  TempDir dir;
  Simulation sim(field_config(), dir.path());
  ScriptedOperator op(load_script(kSource / "missions" / "field_test.script"));
  FieldRun r;
  r.result = run_headless(sim, op);
  r.records = read_telemetry_file(dir.path() / kTelemetryFile);
  r.fixes = read_gps_file(dir.path() / kGpsFile);
  return r;
}

Verdict neutral_buoyancy() {
  const VehicleParams p = field_config().vehicle;
  const double f = net_buoyancy_force(p);
  VehicleState s;
  s.depth_m = 0.5;
  const VehicleState start = s;
  for (int i = 0; i < kRestSteps; ++i) s = step(s, ThrusterCommand{}, p, 0.02);
  const double drift = (s.position() - start.position()).norm();
  return {std::abs(f) <= kBuoyancyTol_N && drift < kRestDriftTol_m,
          "net force " + fmt(f) + " N, drift " + fmt(drift) + " m after " +
              std::to_string(kRestSteps) + " steps"};
}

Verdict field_envelope(const FieldRun& run) {
  if (run.result.exit_code != 0) return {false, "run failed: " + run.result.message};
  const auto s = summarize(run.records, run.fixes, DepthBand{0.95, 1.45});
  const double start = run.records.front().sensed_depth_m;
  const bool start_ok = std::abs(start - kSurfacedDepth_m) <= kSurfacedDepthTol_m;
  const bool band_ok = s.time_to_band_s && *s.time_to_band_s <= kTimeToBandMax_s;
  const bool max_ok =
      s.max_sensed_depth_m >= kMaxDepthLow_m && s.max_sensed_depth_m <= kMaxDepthHigh_m;
  const bool hold_ok = s.in_band_fraction && *s.in_band_fraction >= kInBandMin;
  const bool duration_ok = s.duration_s < kDurationMax_s;
  return {start_ok && band_ok && max_ok && hold_ok && duration_ok,
          "start " + fmt(start) + " m, time to band " +
              (s.time_to_band_s ? fmt(*s.time_to_band_s) + " s" : "never") + ", max " +
              fmt(s.max_sensed_depth_m) + " m, in band " +
              (s.in_band_fraction ? fmt(100 * *s.in_band_fraction) + "%" : "n/a") +
              ", duration " + fmt(s.duration_s) + " s"};
}

Verdict track_length_calibration(const FieldRun& run) {
  if (run.result.exit_code != 0) return {false, "run failed: " + run.result.message};
  const double length = track_length(run.fixes);
  return {length >= kTrackLow_m && length <= kTrackHigh_m,
          "track " + fmt(length) + " m over " + std::to_string(run.fixes.size()) + " fixes"};
}

std::string ladder_oracle(double pitch, double depth, double heading_err) {
  if (std::abs(pitch) > 30) return "PitchCorrection";
  if (depth < 0.95 || depth > 1.45) return "DepthCorrection";
  if (std::abs(heading_err) > 10) return "HeadingCorrection";
  return "Cruise";
}

Verdict branch_table() {
  ControlConfig cfg;
  cfg.heading_target_deg = 200;
  int cells = 0;
  int agree = 0;
  std::string first_miss;
  for (double pitch : {0.0, 20.0, -20.0, 40.0, -40.0}) {
    for (double depth : {0.5, 0.95, 1.2, 1.45, 1.9}) {
      for (double err : {0.0, 5.0, -5.0, 30.0, -30.0}) {
        SensorSnapshot snap;
        snap.pitch_deg = pitch;
        snap.sensed_depth_m = depth;
        snap.heading_deg = wrap_360(200 - err);
        const auto got = std::string(to_string(forward_step(snap, cfg).tag));
        const auto want = ladder_oracle(pitch, depth, err);
        ++cells;
        if (got == want) {
          ++agree;
        } else if (first_miss.empty()) {
          first_miss = "; first mismatch at pitch " + fmt(pitch) + " depth " + fmt(depth) +
                       " error " + fmt(err) + ": " + got + " vs " + want;
        }
      }
    }
  }
  return {cells == 125 && agree == cells,
          std::to_string(agree) + "/" + std::to_string(cells) + " cells agree" + first_miss};
}

Verdict link_gating() {
  const std::string script = "DIVE 1.0\nFWD 60\nPING\nDIVE 0.8\nEND\n";
  SimConfig cfg;
  cfg.reseed(3);

  // Interactive: fast-mode server, socket client replaying the script.
  TempDir dir;
  NetTransport net(Endpoint{"127.0.0.1", 0}, std::nullopt);
  net.start();
  Simulation sim(cfg, dir.path());
  std::atomic<bool> stop{false};
  RunResult server_result;
  std::thread server([&] { server_result = run_server(sim, net, false, stop); });
  const auto replay = replay_script(net.tcp_port(), parse_script(script));
  if (!replay.finished) stop = true;
  server.join();
  if (!replay.finished) return {false, "client: " + replay.error};
  if (server_result.exit_code != 0) return {false, "server: " + server_result.message};

  const auto& trace = sim.link_trace();
  std::size_t submerged = 0;
  for (const auto& e : trace) submerged += e.sensed_depth_m > cfg.control.surface_depth_m ? 1 : 0;
  if (submerged == 0) return {false, "trace never submerged"};
  if (const auto v = link_gating_violation(trace, cfg.control.surface_depth_m)) return {false, *v};

  // Half lines: a fragment left at submersion must not join the next line.
  TempDir half_dir;
  SimConfig quiet = cfg;
  quiet.make_noiseless();
  Simulation half(quiet, half_dir.path());
  ScriptedOperator inner(parse_script(script));
  HalfLineOperator op(inner);
  while (!half.ended() && half.time() < half.config().sim.max_duration_s) half.tick(op);
  if (!half.ended()) return {false, "half-line mission did not end"};
  if (op.fragments_completed() == 0) return {false, "no fragment was ever completed"};
  if (started_ten_second_leg(half.events())) return {false, "fragment delivered across a drop"};

  return {true, std::to_string(trace.size()) + " ticks, " + std::to_string(submerged) +
                    " submerged, " + std::to_string(replay.connections) + " sessions, " +
                    std::to_string(op.fragments_completed()) + " fragments discarded"};
}

Verdict sensor_properties() {
  std::mt19937_64 rng(2026);
  std::uniform_real_distribution<double> depth(0.0, 100.0);
  double worst = 0;
  for (int i = 0; i < 10000; ++i) {
    const double d = depth(rng);
    const double back =
        pressure_to_depth(depth_to_pressure(d, 101325, 1000, 9.81), 101325, 1000, 9.81);
    worst = std::max(worst, std::abs(back - d));
  }

  std::uniform_real_distribution<double> angle(-720.0, 720.0);
  int range_bad = 0;
  int antisym_bad = 0;
  for (int i = 0; i < kHeadingPairs; ++i) {
    const double a = angle(rng);
    const double b = angle(rng);
    const double e = heading_error(a, b);
    if (!(e > -180.0 && e <= 180.0)) ++range_bad;
    if (std::abs(e) < 180.0 - kHeadingTol_deg &&
        std::abs(heading_error(b, a) + e) > kHeadingTol_deg) {
      ++antisym_bad;
    }
  }

  const VehicleParams p;
  SensorConfig sc;
  sc.rng_seed = 77;
  sc.compass_bias_deg = -6.0;
  sc.gyro_bias_deg = 2.0;
  const std::size_t n = 200;
  std::vector<SensorSnapshot> raw;
  VehicleState rest;
  rest.heading_deg = 45;
  for (std::size_t i = 0; i < n; ++i) raw.push_back(sample(rest, p, sc, {}, i));
  const Calibration c = calibrate(raw, n, 45.0);
  const double pitch_z = std::abs(c.pitch_offset_deg - 2.0) /
                         (sc.gyro_noise_std_deg / std::sqrt(double(n)));
  const double heading_z = std::abs(c.heading_offset_deg + 6.0) /
                           (sc.compass_noise_std_deg / std::sqrt(double(n)));

  const bool pass = worst <= kPressureInverseTol_m && range_bad == 0 && antisym_bad == 0 &&
                    pitch_z <= kCalibrationSigmas && heading_z <= kCalibrationSigmas;
  return {pass, "pressure inverse max error " + fmt(worst) + " m; heading range/antisymmetry " +
                    "violations " + std::to_string(range_bad) + "/" + std::to_string(antisym_bad) +
                    " of " + std::to_string(kHeadingPairs) + "; calibration error " +
                    fmt(pitch_z) + "/" + fmt(heading_z) + " standard errors"};
}

Verdict determinism() {
  SimConfig cfg = load_config(kSource / "config" / "defaults.conf");
  cfg.reseed(12345);
  const auto script = load_script(kSource / "missions" / "field_test.script");
  TempDir a, b;
  for (const auto* dir : {&a, &b}) {
    Simulation sim(cfg, dir->path());
    ScriptedOperator op(script);
    const auto r = run_headless(sim, op);
    if (r.exit_code != 0) return {false, "run failed: " + r.message};
  }
  const auto ta = read_file(a.path() / kTelemetryFile);
  const auto ga = read_file(a.path() / kGpsFile);
  const bool same = ta == read_file(b.path() / kTelemetryFile) &&
                    ga == read_file(b.path() / kGpsFile);
  return {same && !ta.empty(), std::to_string(ta.size()) + " + " + std::to_string(ga.size()) +
                                   " bytes, " + (same ? "identical" : "different")};
}

}  // namespace
}  // namespace auvtwin

int main() {
  using namespace auvtwin;
  Report report;
  report.check("neutral buoyancy", neutral_buoyancy);
  const FieldRun run = field_run();
  report.check("field-test envelope", [&] { return field_envelope(run); });
  report.check("track length", [&] { return track_length_calibration(run); });
  report.check("forward ladder branch table", branch_table);
  report.check("link gating", link_gating);
  report.check("sensor and heading properties", sensor_properties);
  report.check("determinism", determinism);
  std::printf("%d failed\n", report.failures());
  return report.failures() == 0 ? 0 : 1;
}
