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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>
#include <json.hpp>

#include "commands.hpp"
#include "run_config.hpp"

using namespace exsteklov;
using namespace exsteklov::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() /
                       ("exsteklov_cli_" + name + "_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::stringstream ss(csv);
  std::string line;
  bool header = false;
  while (std::getline(ss, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::vector<std::string> split(const std::string& row) {
  std::vector<std::string> out;
  std::stringstream ss(row);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!row.empty() && row.back() == ',') out.emplace_back();
  return out;
}

RunConfig config_in(const fs::path& dir) {
  RunConfig c;
  c.out_dir = dir.string();
  return c;
}

std::string error_key(const RunConfig& c, Command command) {
  try {
    c.validate(command);
  } catch (const ConfigError& e) {
    return e.key();
  }
  return {};
}

}  // namespace

TEST_CASE("config parsing") {
  RunConfig c;
  c.apply_override("lambda=0.25");
  c.apply_override("radii=11, 21,41");
  c.apply_override("plot=true");
  c.apply_override("seed=18446744073709551615");
  CHECK(c.lambda == 0.25);
  CHECK(c.radii == std::vector<double>{11, 21, 41});
  CHECK(c.plot);
  CHECK(c.seed == 18446744073709551615ull);

  auto key_of = [&](const std::string& token) {
    try {
      c.apply_override(token);
    } catch (const ConfigError& e) {
      return e.key();
    }
    return std::string();
  };
  CHECK(key_of("mu=abc") == "mu");
  CHECK(key_of("truncation=2.5") == "truncation");
  CHECK(key_of("plot=maybe") == "plot");
  CHECK(key_of("bogus=1") == "bogus");
  CHECK(key_of("lambda") == "lambda");
}

TEST_CASE("config file with overrides") {
  const fs::path dir = scratch_dir("file");
  const fs::path path = dir / "run.cfg";
  std::ofstream(path) << "# run\nlambda = 2\nmu = 0.5  # inline\n\ntruncation = 9\n";
  RunConfig c;
  c.load_file(path.string());
  c.apply_override("mu=0.75");
  CHECK(c.lambda == 2.0);
  CHECK(c.mu == 0.75);
  CHECK(c.truncation == 9);
  std::ofstream(dir / "bad.cfg") << "lambda 2\n";
  CHECK_THROWS_AS(c.load_file((dir / "bad.cfg").string()), ConfigError);
  CHECK_THROWS_AS(c.load_file((dir / "missing.cfg").string()), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("resolved configuration lists every key") {
  const auto pairs = RunConfig{}.resolved();
  CHECK(pairs.size() == 25u);
  CHECK(pairs.front().first == "lambda");
  RunConfig c;
  for (const auto& [k, v] : pairs) {
    if (k == "radii") continue;
    CHECK_NOTHROW(c.set(k, v));
  }
}

TEST_CASE("validation names the offending key") {
  RunConfig c;
  c.dimension = 2;
  CHECK(error_key(c, Command::spectrum) == "dimension");
  c = RunConfig{};
  c.q = 2.5;
  CHECK(error_key(c, Command::solve) == "q");
  c = RunConfig{};
  c.p = 3.0;
  CHECK(error_key(c, Command::psteklov) == "p");
  c = RunConfig{};
  c.truncation = 3;
  CHECK(error_key(c, Command::solve) == "truncation");
  c = RunConfig{};
  c.p = 2.0;
  c.grading = 1.15;
  CHECK(error_key(c, Command::psteklov) == "grading");
  c = RunConfig{};
  c.p = 2.0;
  c.radii = {11.0};
  CHECK(error_key(c, Command::psteklov) == "radii");
  c = RunConfig{};
  c.quadrature_order = 3;
  CHECK(error_key(c, Command::constants) == "quadrature_order");
  c = RunConfig{};
  c.dimension = 4;
  CHECK(error_key(c, Command::solve) == "dimension");
  CHECK(error_key(c, Command::spectrum).empty());
  CHECK(error_key(RunConfig{}, Command::solve).empty());
}

TEST_CASE("spectrum command") {
  const fs::path dir = scratch_dir("spectrum");
  std::ostringstream log;
  RunConfig c = config_in(dir);
  c.plot = true;
  const auto out = run_command(Command::spectrum, c, log);
  REQUIRE(out.status == kExitOk);
  REQUIRE(out.files.size() == 2u);
  const std::string csv = slurp(dir / "spectrum.csv");
  CHECK(csv.find("# lambda=1") != std::string::npos);
  CHECK(csv.find("l,multiplicity,delta_exact,delta_truncated") != std::string::npos);
  const auto rows = data_rows(csv);
  REQUIRE(rows.size() == 6u);
  const auto first = split(rows[0]);
  CHECK(first[0] == "0");
  CHECK(first[1] == "1");
  CHECK(first[2] == "1");
  CHECK(std::stod(first[3]) == doctest::Approx(1.1).epsilon(1e-4));
  CHECK(split(rows[5])[1] == "11");
  CHECK(slurp(dir / "spectrum.svg").find("<svg") != std::string::npos);

  c.dimension = 4;
  c.max_degree = 0;
  c.plot = false;
  REQUIRE(run_command(Command::spectrum, c, log).status == kExitOk);
  const auto four = data_rows(slurp(dir / "spectrum.csv"));
  REQUIRE(four.size() == 1u);
  CHECK(four[0] == "0,,2,");

  c.dimension = 2;
  std::ostringstream err;
  CHECK(run_command(Command::spectrum, c, err).status == kExitValidation);
  CHECK(err.str().find("N >= 3") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("constants command") {
  const fs::path dir = scratch_dir("constants");
  std::ostringstream log;
  RunConfig c = config_in(dir);
  c.truncation = 9;
  REQUIRE(run_command(Command::constants, c, log).status == kExitOk);
  auto rows = data_rows(slurp(dir / "constants.csv"));
  REQUIRE(rows.size() == 9u);
  double prev_alpha = INFINITY;
  for (const auto& row : rows) {
    const auto cells = split(row);
    REQUIRE(cells.size() == 8u);
    const int k = std::stoi(cells[0]);
    const double l = std::floor(std::sqrt(k - 1.0));
    CHECK(std::abs(std::stod(cells[7]) - 1.0 / std::sqrt(l + 1.0)) < 1e-8);
    CHECK(std::stod(cells[1]) <= prev_alpha);
    prev_alpha = std::stod(cells[1]);
  }

  c.mu = 0.0;
  REQUIRE(run_command(Command::constants, c, log).status == kExitOk);
  const std::string csv = slurp(dir / "constants.csv");
  CHECK(csv.find("# note=") != std::string::npos);
  rows = data_rows(csv);
  const auto cells = split(rows[0]);
  CHECK(cells[3].empty());
  CHECK(cells[4].empty());
  CHECK_FALSE(cells[5].empty());
  fs::remove_all(dir);
}

TEST_CASE("solve command is deterministic and self-describing") {
  const fs::path a = scratch_dir("solve_a"), b = scratch_dir("solve_b");
  std::ostringstream log;
  RunConfig c = config_in(a);
  c.truncation = 9;
  c.starts_per_rung = 3;
  c.embedding_starts = 2;
  REQUIRE(run_command(Command::solve, c, log).status == kExitOk);
  c.out_dir = b.string();
  REQUIRE(run_command(Command::solve, c, log).status == kExitOk);
  auto ja = nlohmann::json::parse(slurp(a / "solve.json"));
  auto jb = nlohmann::json::parse(slurp(b / "solve.json"));
  CHECK(ja["config"]["truncation"] == 9);
  CHECK(ja["config"]["seed"] == 7);
  CHECK(ja["constants"]["rungs"].size() == 9u);
  CHECK(ja["summary"]["starts"] == 9 * 6);
  ja.erase("timestamp");
  jb.erase("timestamp");
  ja["config"].erase("out_dir");
  jb["config"].erase("out_dir");
  CHECK(ja.dump() == jb.dump());
  for (const auto& s : ja["solutions"]) {
    CHECK(s["gradient_norm"].get<double>() <= 1e-9);
    CHECK(s["coefficients"].size() == 9u);
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("solve command with mu <= 0 notes the negative result") {
  const fs::path dir = scratch_dir("solve_mu");
  std::ostringstream log;
  RunConfig c = config_in(dir);
  c.lambda = 0.0;
  c.mu = -1.0;
  c.truncation = 4;
  c.plot = true;
  const auto out = run_command(Command::solve, c, log);
  REQUIRE(out.status == kExitOk);
  CHECK(out.files.size() == 2u);
  const auto j = nlohmann::json::parse(slurp(dir / "solve.json"));
  CHECK(j["summary"]["positive_levels"] == 0);
  bool noted = false;
  for (const auto& n : j["prop31"]["notes"]) noted |= n.get<std::string>().find("mu <= 0") != std::string::npos;
  CHECK(noted);
  fs::remove_all(dir);
}

TEST_CASE("psteklov command") {
  const fs::path dir = scratch_dir("psteklov");
  std::ostringstream log;
  RunConfig c = config_in(dir);
  c.p = 2.0;
  c.plot = true;
  const auto out = run_command(Command::psteklov, c, log);
  REQUIRE(out.status == kExitOk);
  CHECK(out.files.size() == 3u);
  const auto j = nlohmann::json::parse(slurp(dir / "psteklov.json"));
  REQUIRE(j["runs"].size() == 1u);
  CHECK(j["runs"][0]["delta"].get<double>() == doctest::Approx(1.1).epsilon(1e-4));
  CHECK(j["runs"][0]["eigenfunction"].size() == 401u);
  CHECK(j["runs"][0]["eigenfunction"].back() == 0.0);
  CHECK(j["runs"][0]["nodes"].back() == 11.0);
  CHECK(j["config"]["p"] == 2.0);
  CHECK(j["extrapolation"].is_null());

  c.p = 3.0;
  CHECK(run_command(Command::psteklov, c, log).status == kExitValidation);

  c.p = 1.5;
  c.flow_max_steps = 5;
  c.plot = false;
  CHECK(run_command(Command::psteklov, c, log).status == kExitRuntime);
  fs::remove_all(dir);
}

TEST_CASE("unwritable output directory is a runtime failure") {
  RunConfig c;
  c.out_dir = "/proc/exsteklov-no-such-dir";
  std::ostringstream log;
  CHECK(run_command(Command::spectrum, c, log).status == kExitRuntime);
}
