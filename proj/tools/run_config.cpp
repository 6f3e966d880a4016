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

#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace exsteklov::app {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  double x = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected a number, got '" + text + "'");
  return x;
}

long long parse_int(const std::string& key, const std::string& text) {
  long long x = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + text + "'");
  return x;
}

int parse_int32(const std::string& key, const std::string& text) {
  const long long x = parse_int(key, text);
  if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(key, "integer out of range");
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  std::uint64_t x = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, x);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key, "expected an unsigned 64-bit integer, got '" + text + "'");
  }
  return x;
}

bool parse_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

void require(bool ok, const char* key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

// Library validators name the field before a colon.
[[noreturn]] void rethrow_as_config(const std::invalid_argument& e) {
  const std::string what = e.what();
  const auto colon = what.find(':');
  if (colon == std::string::npos) throw ConfigError("config", what);
  throw ConfigError(what.substr(0, colon), trim(what.substr(colon + 1)));
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string to_string(Command command) {
  switch (command) {
    case Command::spectrum: return "spectrum";
    case Command::solve: return "solve";
    case Command::psteklov: return "psteklov";
    case Command::constants: return "constants";
  }
  return "unknown";
}

void RunConfig::set(const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key == "lambda") lambda = parse_double(key, value);
  else if (key == "mu") mu = parse_double(key, value);
  else if (key == "q") q = parse_double(key, value);
  else if (key == "p") p = parse_double(key, value);
  else if (key == "dimension") dimension = parse_int32(key, value);
  else if (key == "truncation") truncation = parse_int32(key, value);
  else if (key == "max_degree") max_degree = parse_int32(key, value);
  else if (key == "quadrature_order") quadrature_order = parse_int32(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "starts_per_rung") starts_per_rung = parse_int32(key, value);
  else if (key == "solver_tolerance") solver_tolerance = parse_double(key, value);
  else if (key == "max_iterations") max_iterations = parse_int32(key, value);
  else if (key == "regularization") regularization = parse_double(key, value);
  else if (key == "embedding_starts") embedding_starts = parse_int32(key, value);
  else if (key == "embedding_tolerance") embedding_tolerance = parse_double(key, value);
  else if (key == "flow_tolerance") flow_tolerance = parse_double(key, value);
  else if (key == "flow_max_steps") flow_max_steps = parse_int32(key, value);
  else if (key == "truncation_radius") truncation_radius = parse_double(key, value);
  else if (key == "radii") radii = parse_list(key, value);
  else if (key == "mesh_nodes") mesh_nodes = parse_int32(key, value);
  else if (key == "grading") grading = parse_double(key, value);
  else if (key == "out_dir") out_dir = value;
  else if (key == "plot") plot = parse_bool(key, value);
  else if (key == "threads") threads = parse_int32(key, value);
  else if (key == "allow_supercritical") allow_supercritical = parse_bool(key, value);
  else throw ConfigError(key.empty() ? "config" : key, "unknown configuration key");
}

void RunConfig::apply_override(const std::string& token) {
  const auto eq = token.find('=');
  if (eq == std::string::npos) throw ConfigError(token, "override must have the form key=value");
  set(token.substr(0, eq), token.substr(eq + 1));
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open configuration file '" + path + "'");
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config", path + ":" + std::to_string(number) + ": expected key = value");
    }
    set(line.substr(0, eq), line.substr(eq + 1));
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::resolved() const {
  std::string radii_text;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i) radii_text += ",";
    radii_text += format_double(radii[i]);
  }
  return {
      {"lambda", format_double(lambda)},
      {"mu", format_double(mu)},
      {"q", format_double(q)},
      {"p", format_double(p)},
      {"dimension", std::to_string(dimension)},
      {"truncation", std::to_string(truncation)},
      {"max_degree", std::to_string(max_degree)},
      {"quadrature_order", std::to_string(quadrature_order)},
      {"seed", std::to_string(seed)},
      {"starts_per_rung", std::to_string(starts_per_rung)},
      {"solver_tolerance", format_double(solver_tolerance)},
      {"max_iterations", std::to_string(max_iterations)},
      {"regularization", format_double(regularization)},
      {"embedding_starts", std::to_string(embedding_starts)},
      {"embedding_tolerance", format_double(embedding_tolerance)},
      {"flow_tolerance", format_double(flow_tolerance)},
      {"flow_max_steps", std::to_string(flow_max_steps)},
      {"truncation_radius", format_double(truncation_radius)},
      {"radii", radii_text},
      {"mesh_nodes", std::to_string(mesh_nodes)},
      {"grading", format_double(grading)},
      {"out_dir", out_dir},
      {"plot", plot ? "true" : "false"},
      {"threads", std::to_string(threads)},
      {"allow_supercritical", allow_supercritical ? "true" : "false"},
  };
}

void RunConfig::validate(Command command) const {
  require(dimension >= 3, "dimension", "N >= 3 is required, got " + std::to_string(dimension));
  require(threads >= 1, "threads", "must be >= 1");
  require(!out_dir.empty(), "out_dir", "must not be empty");

  switch (command) {
    case Command::spectrum: {
      require(max_degree >= 0, "max_degree", "must be >= 0");
      require(truncation_radius > 1.0 && std::isfinite(truncation_radius), "truncation_radius",
              "must satisfy R > 1");
      require(mesh_nodes >= 2, "mesh_nodes", "must be >= 2");
      require(grading > 0.0, "grading", "must be positive");
      if (dimension == 3) {
        try {
          (void)RadialMesh::geometric(truncation_radius, mesh_nodes, grading, dimension);
        } catch (const std::invalid_argument& e) {
          throw ConfigError("grading", e.what());
        }
      }
      break;
    }
    case Command::solve:
    case Command::constants: {
      require(dimension == 3, "dimension", "only N = 3 is computable, got " +
                                               std::to_string(dimension));
      try {
        (void)energy_params().validate();
      } catch (const std::invalid_argument& e) {
        rethrow_as_config(e);
      }
      require(truncation >= (command == Command::solve ? 4 : 1), "truncation",
              command == Command::solve ? "K >= 4 is required" : "K >= 1 is required");
      require(truncation <= 400, "truncation", "K <= 400 is supported");
      require(quadrature_order >= 0, "quadrature_order", "must be >= 0 (0 selects the default)");
      if (quadrature_order > 0) {
        const int degree = SteklovBasis::with_mode_count(3, truncation).max_degree();
        require(2 * quadrature_order - 1 >= 2 * degree, "quadrature_order",
                "exactness 2n-1 must reach 2L = " + std::to_string(2 * degree));
      }
      require(embedding_starts >= 0, "embedding_starts", "must be >= 0");
      require(embedding_tolerance > 0.0, "embedding_tolerance", "must be > 0");
      if (command == Command::solve) {
        require(starts_per_rung >= 0, "starts_per_rung", "must be >= 0");
        require(solver_tolerance > 0.0, "solver_tolerance", "must be > 0");
        require(max_iterations >= 1, "max_iterations", "must be >= 1");
        require(regularization >= 0.0, "regularization", "must be >= 0");
      }
      break;
    }
    case Command::psteklov: {
      require(p > 1.0 && p < dimension, "p",
              "must satisfy 1 < p < N = " + std::to_string(dimension) + ", got " +
                  format_double(p));
      require(flow_tolerance > 0.0, "flow_tolerance", "must be > 0");
      require(flow_max_steps >= 0, "flow_max_steps", "must be >= 0");
      require(mesh_nodes >= 2, "mesh_nodes", "must be >= 2");
      require(grading > 0.0, "grading", "must be positive");
      std::vector<double> rs = radii.empty() ? std::vector<double>{truncation_radius} : radii;
      require(radii.empty() || radii.size() >= 2, "radii", "extrapolation needs at least two radii");
      for (double r : rs) {
        require(r > 1.0 && std::isfinite(r), radii.empty() ? "truncation_radius" : "radii",
                "every radius must satisfy R > 1");
        try {
          (void)RadialMesh::geometric(r, mesh_nodes, grading, dimension);
        } catch (const std::invalid_argument& e) {
          throw ConfigError("grading", e.what());
        }
      }
      break;
    }
  }
}

EnergyParams RunConfig::energy_params() const {
  EnergyParams out;
  out.lambda = lambda;
  out.mu = mu;
  out.q = q;
  out.p = p;
  out.dimension = dimension;
  out.allow_supercritical = allow_supercritical;
  return out;
}

ScanOptions RunConfig::scan_options() const {
  ScanOptions out;
  out.starts_per_rung = starts_per_rung;
  out.seed = seed;
  out.threads = threads;
  out.solver.tolerance = solver_tolerance;
  out.solver.max_iterations = max_iterations;
  out.solver.regularization = regularization;
  out.embedding.seed = seed;
  out.embedding.random_starts = embedding_starts;
  out.embedding.tolerance = embedding_tolerance;
  return out;
}

FlowOptions RunConfig::flow_options() const {
  FlowOptions out;
  out.tolerance = flow_tolerance;
  out.max_steps = flow_max_steps;
  return out;
}

}  // namespace exsteklov::app
