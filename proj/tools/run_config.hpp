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

#ifndef EXSTEKLOV_TOOLS_RUN_CONFIG_HPP_
#define EXSTEKLOV_TOOLS_RUN_CONFIG_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "exsteklov/critical_point.hpp"
#include "exsteklov/energy.hpp"
#include "exsteklov/p_steklov.hpp"

namespace exsteklov::app {

/// Invalid configuration; `key()` names the offending entry.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Command { spectrum, solve, psteklov, constants };

struct RunConfig {
  double lambda = 1.0;
  double mu = 1.0;
  double q = 1.5;
  double p = 3.0;
  int dimension = 3;
  int truncation = 25;  ///< K, number of basis modes for solve/constants
  int max_degree = 5;   ///< L, degree range for spectrum
  int quadrature_order = 0;  ///< 0 selects 2L + 8
  std::uint64_t seed = 7;
  int starts_per_rung = 12;
  double solver_tolerance = 1e-9;
  int max_iterations = 200;
  double regularization = 1e-10;
  int embedding_starts = 8;
  double embedding_tolerance = 1e-10;
  double flow_tolerance = 1e-10;
  int flow_max_steps = 20000;
  double truncation_radius = 11.0;
  std::vector<double> radii;  ///< psteklov extrapolation radii; empty runs one R
  int mesh_nodes = kDefaultMeshCells;
  double grading = kDefaultMeshGrading;
  std::string out_dir = ".";
  bool plot = false;
  int threads = 1;
  bool allow_supercritical = false;

  /// Sets one field from its snake_case key. Throws ConfigError.
  void set(const std::string& key, const std::string& value);
  /// Applies a `key=value` token.
  void apply_override(const std::string& token);
  /// Reads `key = value` lines; `#` starts a comment.
  void load_file(const std::string& path);

  /// Every key with its resolved value, in declaration order.
  std::vector<std::pair<std::string, std::string>> resolved() const;

  /// Checks the preconditions of `command`. Throws ConfigError.
  void validate(Command command) const;

  EnergyParams energy_params() const;
  ScanOptions scan_options() const;
  FlowOptions flow_options() const;
};

std::string to_string(Command command);

/// Shortest round-trip text for doubles in the resolved configuration.
std::string format_double(double x);

}  // namespace exsteklov::app

#endif  // EXSTEKLOV_TOOLS_RUN_CONFIG_HPP_
