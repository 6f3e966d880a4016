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

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool plot = false;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "key = value configuration file");
  sub->add_option("--out", flags.out, "output directory");
  sub->add_option("--seed", flags.seed, "64-bit seed for all random starts");
  sub->add_option("--threads", flags.threads, "worker threads (1 reproduces bit for bit)");
  sub->add_flag("--plot", flags.plot, "also write SVG plots");
  sub->add_option("overrides", flags.overrides, "key=value overrides applied last");
}

}  // namespace

int main(int argc, char** argv) {
  using exsteklov::app::Command;
  CLI::App app{"exterior Steklov solver: spectra, critical points and p-Steklov eigenvalues"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EXSTEKLOV_VERSION);

  CommonFlags flags;
  struct Entry {
    const char* name;
    const char* help;
    Command command;
  };
  const Entry entries[] = {
      {"spectrum", "exterior Steklov eigenvalues and the truncated p = 2 spectrum", Command::spectrum},
      {"solve", "multistart critical-point search over the subspace ladder", Command::solve},
      {"psteklov", "first p-Steklov eigenpair by the normalized ascent flow", Command::psteklov},
      {"constants", "tail trace constants and fountain radii", Command::constants},
  };
  std::optional<Command> chosen;
  for (const auto& e : entries) {
    CLI::App* sub = app.add_subcommand(e.name, e.help);
    add_common(sub, flags);
    sub->callback([&chosen, c = e.command] { chosen = c; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exsteklov::app::kExitValidation;
  }

  exsteklov::app::RunConfig config;
  try {
    if (!flags.config_path.empty()) config.load_file(flags.config_path);
    if (flags.out) config.out_dir = *flags.out;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.threads) config.threads = *flags.threads;
    if (flags.plot) config.plot = true;
    for (const auto& token : flags.overrides) config.apply_override(token);
  } catch (const exsteklov::app::ConfigError& e) {
    std::cerr << "error: invalid configuration: " << e.what() << "\n";
    return exsteklov::app::kExitValidation;
  }

  const auto outcome = exsteklov::app::run_command(*chosen, config, std::cerr);
  for (const auto& f : outcome.files) std::cout << f << "\n";
  return outcome.status;
}
