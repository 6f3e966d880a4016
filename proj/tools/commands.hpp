// Copyright 2026 The exsteklov Authors. All rights reserved.
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

#ifndef EXSTEKLOV_TOOLS_COMMANDS_HPP_
#define EXSTEKLOV_TOOLS_COMMANDS_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace exsteklov::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitValidation = 2;

struct CommandOutcome {
  int status = kExitOk;
  std::vector<std::string> files;  ///< paths written, in order
};

/// spectrum.csv: l, multiplicity, delta_exact, delta_truncated.
CommandOutcome cmd_spectrum(const RunConfig& config, std::ostream& log);
/// solve.json: configuration, constants per rung, solutions, failures and
/// the norm-bound report.
CommandOutcome cmd_solve(const RunConfig& config, std::ostream& log);
/// psteklov.json: first eigenpair per radius, plus extrapolation in R.
CommandOutcome cmd_psteklov(const RunConfig& config, std::ostream& log);
/// constants.csv: alpha_k, beta_k and the fountain radii.
CommandOutcome cmd_constants(const RunConfig& config, std::ostream& log);

/// Validates, dispatches and maps exceptions to exit statuses.
CommandOutcome run_command(Command command, const RunConfig& config, std::ostream& log);

}  // namespace exsteklov::app

#endif  // EXSTEKLOV_TOOLS_COMMANDS_HPP_
