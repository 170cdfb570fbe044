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

#include <string>
#include <variant>

namespace auvtwin {

namespace cmd {
struct Calibrate {
  bool operator==(const Calibrate&) const = default;
};
struct SetParam {
  std::string key;
  double value = 0;  // NaN means "latch" for heading_target_deg
  bool operator==(const SetParam&) const = default;
};
struct TestConnection {
  bool operator==(const TestConnection&) const = default;
};
struct Descend {
  double target_depth_m = 0;
  bool operator==(const Descend&) const = default;
};
struct Forward {
  double duration_s = 0;
  bool operator==(const Forward&) const = default;
};
struct Surface {
  bool operator==(const Surface&) const = default;
};
struct End {
  bool operator==(const End&) const = default;
};
}  // namespace cmd

using Command = std::variant<cmd::Calibrate, cmd::SetParam, cmd::TestConnection, cmd::Descend,
                             cmd::Forward, cmd::Surface, cmd::End>;

struct ParseError {
  std::string message;
  std::string token;  // offending token, empty when the whole line is at fault

  bool operator==(const ParseError&) const = default;
};

/// What the link hands the controller: a typed command or the reason a line
/// was rejected.
using LinkMessage = std::variant<Command, ParseError>;

/// Canonical wire form, e.g. "DIVE 1" or "SET cruise_duty 0.5".
std::string to_line(const Command& command);

}  // namespace auvtwin
