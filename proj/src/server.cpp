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

#include <thread>

#include "auvtwin/net_transport.hpp"

namespace auvtwin {

RunResult run_server(Simulation& sim, NetTransport& net, bool realtime,
                     const std::atomic<bool>& stop) {
  RunResult result;
  if (!realtime) sim.set_lockstep([&stop] { return !stop; });

  const auto period = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(sim.config().control.control_period_s));
  auto next = std::chrono::steady_clock::now();

  try {
    while (!sim.ended() && !stop) {
      if (sim.time() > sim.config().sim.max_duration_s) {
        result = {1, "mission exceeded sim.max_duration_s"};
        break;
      }
      if (!sim.tick(net)) break;
      if (sim.surface_timeout()) break;
      if (realtime) {
        next += period;
        std::this_thread::sleep_until(next);
      }
    }
    sim.flush();
  } catch (const std::exception& e) {
    net.stop();
    try {
      sim.flush();
    } catch (const std::exception&) {
    }
    return {2, e.what()};
  }
  net.stop();

  if (result.exit_code != 0) return result;
  if (sim.failed()) return {1, sim.failure()};
  if (!sim.ended()) return {1, stop ? "interrupted" : "mission did not end"};
  return result;
}

}  // namespace auvtwin
