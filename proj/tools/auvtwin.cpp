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

#include <atomic>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "auvtwin/config.hpp"
#include "auvtwin/mission_log.hpp"
#include "auvtwin/net_transport.hpp"
#include "auvtwin/simulation.hpp"

namespace {

using namespace auvtwin;
using json = nlohmann::ordered_json;

std::atomic<bool> g_stop{false};

extern "C" void on_signal(int) { g_stop = true; }

json optional_number(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json summary_json(const MissionSummary& s) {
  json j;
  j["time_to_band_s"] = optional_number(s.time_to_band_s);
  j["max_sensed_depth_m"] = s.max_sensed_depth_m;
  j["in_band_fraction"] = optional_number(s.in_band_fraction);
  j["track_length_m"] = s.track_length_m;
  j["duration_s"] = s.duration_s;
  return j;
}

DepthBand band_of(const SimConfig& cfg) {
  return {cfg.control.band_low(), cfg.control.band_high()};
}

SimConfig make_config(const std::string& path, std::optional<std::uint64_t> seed, bool noiseless) {
  SimConfig cfg = path.empty() ? SimConfig{} : load_config(path);
  if (seed) cfg.reseed(*seed);
  if (noiseless) cfg.make_noiseless();
  cfg.validate();
  return cfg;
}

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = "out";
  bool noiseless = false;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "Configuration file")->check(CLI::ExistingFile);
  app->add_option("--seed", o.seed, "Seed for every noise source");
  app->add_option("--out", o.out, "Log directory")->capture_default_str();
  app->add_flag("--noiseless", o.noiseless, "Disable sensor and GPS noise");
}

int run_cmd(const CommonOptions& o, const std::string& script_path) {
  const SimConfig cfg = make_config(o.config, o.seed, o.noiseless);
  MissionScript script = load_script(script_path);
  for (const auto& w : script.warnings) std::cerr << "warning: " << w << '\n';

  Simulation sim(cfg, o.out);
  ScriptedOperator op(std::move(script));
  const RunResult result = run_headless(sim, op);

  const auto& log = sim.log();
  if (!log.records().empty()) {
    std::cout << summary_json(summarize(log.records(), log.fixes(), band_of(cfg))).dump(2) << '\n';
  }
  if (result.exit_code != 0) std::cerr << "error: " << result.message << '\n';
  return result.exit_code;
}

int serve_cmd(const CommonOptions& o, std::optional<std::string> listen,
              std::optional<std::string> ws, bool realtime) {
  const SimConfig cfg = make_config(o.config, o.seed, o.noiseless);
  NetTransport net(parse_endpoint(listen.value_or(cfg.link.listen)),
                   parse_endpoint(ws.value_or(cfg.link.ws)), cfg.link.frame_queue);
  try {
    net.start();
  } catch (const std::system_error& e) {
    std::cerr << "error: " << e.what() << ": " << e.code().message() << '\n';
    return 3;
  }
  std::cout << "listening tcp=" << net.tcp_port() << " ws=" << net.ws_port().value_or(0)
            << std::endl;

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  Simulation sim(cfg, o.out);
  const RunResult result = run_server(sim, net, realtime, g_stop);
  if (g_stop) {
    std::cerr << "interrupted at t=" << sim.time() << " s; logs flushed\n";
    return 0;
  }
  if (result.exit_code != 0) std::cerr << "error: " << result.message << '\n';
  return result.exit_code;
}

int analyze_cmd(const std::filesystem::path& dir, const std::string& config_path) {
  const SimConfig cfg = config_path.empty() ? SimConfig{} : load_config(config_path);
  const auto records = read_telemetry_file(dir / kTelemetryFile);
  if (records.empty()) throw std::runtime_error("no records in " + (dir / kTelemetryFile).string());
  const auto fixes = read_gps_file(dir / kGpsFile);

  const DepthBand band = band_of(cfg);
  json out = summary_json(summarize(records, fixes, band));

  const DepthProfile profile = depth_profile(records, band);
  json depth_t = json::array();
  json depth = json::array();
  for (const auto& s : profile.series) {
    depth_t.push_back(s.t_s);
    depth.push_back(s.sensed_depth_m);
  }
  json track_t = json::array();
  json track_x = json::array();
  json track_y = json::array();
  for (const auto& f : fixes) {
    track_t.push_back(f.t_s);
    track_x.push_back(f.float_x_m);
    track_y.push_back(f.float_y_m);
  }
  out["series"] = {
      {"depth", {{"t_s", depth_t}, {"sensed_depth_m", depth}}},
      {"track", {{"t_s", track_t}, {"x_m", track_x}, {"y_m", track_y}}},
  };
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"auvtwin: low-cost AUV software twin"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::string script_path;
  auto* run = app.add_subcommand("run", "Run a scripted mission headless");
  add_common(run, run_opts);
  run->add_option("--script", script_path, "Mission script")->required()->check(CLI::ExistingFile);

  CommonOptions serve_opts;
  std::optional<std::string> listen;
  std::optional<std::string> ws;
  bool realtime = true;
  auto* serve = app.add_subcommand("serve", "Serve the line protocol and WebSocket bridge");
  add_common(serve, serve_opts);
  serve->add_option("--listen", listen, "TCP host:port (default from config)");
  serve->add_option("--ws", ws, "WebSocket host:port (default from config)");
  serve->add_flag("--realtime,!--fast", realtime,
                  "Pace at wall-clock speed, or run in lockstep with the operator");

  std::filesystem::path log_dir;
  std::string analyze_config;
  auto* analyze = app.add_subcommand("analyze", "Summarize a mission log as JSON");
  analyze->add_option("log_dir", log_dir, "Directory holding the log files")->required();
  analyze->add_option("--config", analyze_config, "Configuration for the depth band")
      ->check(CLI::ExistingFile);

  std::string config_path;
  auto* config = app.add_subcommand("config", "Validate a configuration and print every key");
  config->add_option("file", config_path, "Configuration file (defaults if omitted)")
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_cmd(run_opts, script_path);
    if (*serve) return serve_cmd(serve_opts, listen, ws, realtime);
    if (*analyze) return analyze_cmd(log_dir, analyze_config);
    if (*config) {
      const SimConfig cfg = config_path.empty() ? SimConfig{} : load_config(config_path);
      cfg.validate();
      std::cout << dump_config(cfg);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
