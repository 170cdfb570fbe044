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

#include "auvtwin/simulation.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace auvtwin {

Simulation::Simulation(SimConfig cfg, std::filesystem::path out_dir)
    : cfg_(std::move(cfg)),
      substeps_((cfg_.validate(), cfg_.substeps())),
      gps_every_(cfg_.gps_every()),
      camera_every_(cfg_.camera_every()),
      session_(CommandLimits{cfg_.vehicle.rope_length_m, 3600.0}),
      log_(std::move(out_dir), cfg_.gps.anchor),
      gps_rng_(cfg_.gps.rng_seed) {
  state_.heading_deg = wrap_360(cfg_.sim.initial_heading_deg);
  mission_.cfg = cfg_.control;
  mission_.compass_reference_deg = cfg_.sensors.compass_reference_deg;

  session_.set_clock([this] { return state_.t_s; });
  session_.set_banner([this] { return banner(); });

  snapshot_ = sense();
  session_.set_link_available(link_available(snapshot_, mission_.cfg));
}

SensorSnapshot Simulation::sense() const {
  return sample(state_, cfg_.vehicle, cfg_.sensors, mission_.calibration, tick_index_);
}

std::string Simulation::banner() const {
  std::optional<std::uint64_t> prompt;
  if (awaiting_command()) prompt = mission_.prompt_index;
  return banner_frame(state_.t_s, phase_name(mission_.phase), session_.state(), prompt);
}

bool Simulation::awaiting_command() const {
  return std::holds_alternative<phase::AwaitingCommand>(mission_.phase);
}

bool Simulation::ended() const { return std::holds_alternative<phase::Ended>(mission_.phase); }

bool Simulation::needs_operator() const {
  if (ended() || session_.terminated()) return false;
  if (session_.link_available() && !session_.attached()) return true;
  return awaiting_command() && session_.inbox().empty();
}

void Simulation::pump(Transport& transport) {
  // Bounded so a chattering transport cannot stall the loop.
  for (int round = 0; round < 64; ++round) {
    transport.apply(session_.take_actions());
    auto events = transport.poll();
    if (events.empty()) break;
    for (const auto& e : events) session_.handle(e);
  }
  transport.apply(session_.take_actions());
}

bool Simulation::tick(Transport& transport) {
  snapshot_ = sense();
  const std::uint64_t frames_at_sense = session_.frames_sent();
  session_.set_link_available(link_available(snapshot_, mission_.cfg));
  pump(transport);
  if (lockstep_) {
    while (needs_operator()) {
      if (!lockstep_()) return false;
      transport.wait(std::chrono::milliseconds(20));
      pump(transport);
    }
  }

  const std::uint64_t prompt_before = mission_.prompt_index;
  TickResult result = mission_tick(mission_, snapshot_, session_.inbox());
  const auto buoy = float_position(state_, cfg_.vehicle);
  const auto duty = result.thrust.clamped();

  TelemetryRecord record;
  record.t_s = state_.t_s;
  record.true_depth_m = state_.depth_m;
  record.sensed_depth_m = snapshot_.sensed_depth_m;
  record.pitch_deg = snapshot_.pitch_deg;
  record.heading_deg = snapshot_.heading_deg;
  record.x_m = state_.x_m;
  record.y_m = state_.y_m;
  record.float_x_m = buoy.x_m;
  record.float_y_m = buoy.y_m;
  record.duty_fl = duty.front_left;
  record.duty_fr = duty.front_right;
  record.duty_rl = duty.rear_left;
  record.duty_rr = duty.rear_right;
  record.phase = phase_name(result.next.phase);
  record.tag = to_string(result.tag);
  record.link = to_string(session_.state());

  if (tick_index_ % static_cast<std::uint64_t>(gps_every_) == 0) {
    GpsFix fix{state_.t_s, buoy.x_m, buoy.y_m};
    if (cfg_.gps.noise_std_m > 0) {
      std::normal_distribution<double> noise(0.0, cfg_.gps.noise_std_m);
      fix.float_x_m += noise(gps_rng_);
      fix.float_y_m += noise(gps_rng_);
    }
    log_.append(fix);
  }

  if (tick_index_ % static_cast<std::uint64_t>(cfg_.link.telemetry_decimation) == 0) {
    const FrameFlags flags{buoy.taut_rope,
                           tick_index_ % static_cast<std::uint64_t>(camera_every_) == 0};
    session_.send(telemetry_frame(record, flags), true);
  }
  log_.append(record);

  mission_ = std::move(result.next);
  if (mission_.prompt_index != prompt_before && awaiting_command()) {
    session_.send(prompt_frame(state_.t_s, mission_.prompt_index), false);
  }

  bool flush_requested = false;
  for (const auto& e : result.events) {
    using K = MissionEvent::Kind;
    switch (e.kind) {
      case K::DescendTimeout:
        if (failure_.empty()) failure_ = "descend timeout";
        break;
      case K::SurfaceTimeout:
        if (failure_.empty()) failure_ = "surface timeout";
        surface_timeout_ = true;
        break;
      case K::TerminateLink: session_.terminate(); break;
      case K::FlushLog: flush_requested = true; break;
      default: break;
    }
    events_.push_back(e);
  }

  link_trace_.push_back({state_.t_s, snapshot_.sensed_depth_m, session_.link_available(),
                         session_.attached(), frames_at_sense, session_.frames_sent()});

  for (int i = 0; i < substeps_; ++i) {
    state_ = step(state_, result.thrust, cfg_.vehicle, cfg_.sim.dt_s);
  }
  ++tick_index_;
  // Re-anchor so timestamps do not accumulate summation error.
  state_.t_s = static_cast<double>(tick_index_) * cfg_.control.control_period_s;

  transport.apply(session_.take_actions());
  if (flush_requested) log_.flush();
  return true;
}

// --- scripts --------------------------------------------------------------

MissionScript parse_script(std::string_view text, const CommandLimits& limits) {
  MissionScript script;
  std::optional<std::uint64_t> previous;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    line = line.substr(first, line.find_last_not_of(" \t\r") - first + 1);

    const auto where = [&] { return "script line " + std::to_string(line_no) + ": "; };

    std::uint64_t prompt = previous ? *previous + 1 : 0;
    if (line.front() == '@') {
      const auto space = line.find_first_of(" \t");
      const auto digits = line.substr(1, space == std::string_view::npos ? line.npos : space - 1);
      const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), prompt);
      if (digits.empty() || res.ec != std::errc{} || res.ptr != digits.data() + digits.size()) {
        throw std::invalid_argument(where() + "bad prompt index '" + std::string(digits) + "'");
      }
      if (previous && prompt < *previous) {
        throw std::invalid_argument(where() + "prompt indices must not decrease");
      }
      line = space == std::string_view::npos ? std::string_view{} : line.substr(space + 1);
      line = line.substr(std::min(line.size(), line.find_first_not_of(" \t")));
    }

    const auto parsed = parse_command(line, limits);
    if (const auto* error = std::get_if<ParseError>(&parsed)) {
      throw std::invalid_argument(where() + error->message +
                                  (error->token.empty() ? "" : " '" + error->token + "'"));
    }
    script.lines.push_back({prompt, std::string(line)});
    previous = prompt;
  }

  const auto ends_with_end = [&] {
    if (script.lines.empty()) return false;
    const auto parsed = parse_command(script.lines.back().line, limits);
    return std::holds_alternative<Command>(parsed) &&
           std::holds_alternative<cmd::End>(std::get<Command>(parsed));
  };
  if (!ends_with_end()) script.warnings.emplace_back("script does not end with END");
  return script;
}

MissionScript load_script(const std::filesystem::path& path, const CommandLimits& limits) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open script " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_script(text.str(), limits);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
}

ScriptedOperator::ScriptedOperator(MissionScript script) : script_(std::move(script)) {}

void ScriptedOperator::apply(std::vector<TransportAction> actions) {
  for (auto& a : actions) {
    if (a.kind == TransportAction::Kind::Close) {
      if (a.conn == conn_) conn_.reset();
      if (a.payload == "Terminated") refused_ = true;
      continue;
    }
    if (a.conn != conn_) continue;
    const auto frame = nlohmann::json::parse(a.payload, nullptr, false);
    received_.push_back(std::move(a.payload));
    if (frame.is_object() && frame.contains("prompt") &&
        frame.value("phase", "") == "AwaitingCommand") {
      on_prompt(frame["prompt"].get<std::uint64_t>());
    }
  }
}

void ScriptedOperator::on_prompt(std::uint64_t prompt) {
  while (next_ < script_.lines.size() && script_.lines[next_].prompt <= prompt) {
    pending_.push_back(
        {TransportEvent::Kind::Data, *conn_, script_.lines[next_].line + "\n"});
    ++next_;
  }
}

std::vector<TransportEvent> ScriptedOperator::poll() {
  if (!conn_ && !refused_) {
    conn_ = next_conn_++;
    pending_.push_back({TransportEvent::Kind::Opened, *conn_, {}});
  }
  std::vector<TransportEvent> out;
  out.swap(pending_);
  return out;
}

RunResult run_headless(Simulation& sim, ScriptedOperator& op) {
  RunResult result;
  try {
    while (!sim.ended()) {
      if (sim.time() > sim.config().sim.max_duration_s) {
        result = {1, "mission exceeded sim.max_duration_s"};
        break;
      }
      sim.pump(op);
      if (sim.awaiting_command() && sim.session().attached() && op.exhausted() &&
          sim.session().inbox().empty()) {
        result = {1, "script exhausted before END"};
        break;
      }
      sim.tick(op);
      if (sim.surface_timeout()) break;
    }
    sim.flush();
  } catch (const std::exception& e) {
    try {
      sim.flush();
    } catch (const std::exception&) {
    }
    return {2, e.what()};
  }
  if (result.exit_code == 0 && sim.failed()) result = {1, sim.failure()};
  if (result.exit_code == 0 && !sim.ended()) result = {1, "mission did not end"};
  return result;
}

}  // namespace auvtwin
