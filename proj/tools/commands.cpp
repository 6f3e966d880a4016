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

#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>

#include <json.hpp>

#include "exsteklov/critical_point.hpp"
#include "exsteklov/errors.hpp"
#include "exsteklov/p_steklov.hpp"
#include "exsteklov/sphere_quadrature.hpp"
#include "exsteklov/steklov_basis.hpp"
#include "svg.hpp"

#ifndef EXSTEKLOV_VERSION
#define EXSTEKLOV_VERSION "0.0.0"
#endif

namespace exsteklov::app {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

std::string csv_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string csv_optional(const std::optional<double>& x) {
  return x ? csv_double(*x) : std::string();
}

Json json_optional(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

fs::path prepare_out_dir(const RunConfig& config) {
  fs::path dir(config.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

Json config_json(const RunConfig& c) {
  Json radii = Json::array();
  for (double r : c.radii) radii.push_back(r);
  return Json{{"lambda", c.lambda},
              {"mu", c.mu},
              {"q", c.q},
              {"p", c.p},
              {"dimension", c.dimension},
              {"truncation", c.truncation},
              {"max_degree", c.max_degree},
              {"quadrature_order", c.quadrature_order},
              {"seed", c.seed},
              {"starts_per_rung", c.starts_per_rung},
              {"solver_tolerance", c.solver_tolerance},
              {"max_iterations", c.max_iterations},
              {"regularization", c.regularization},
              {"embedding_starts", c.embedding_starts},
              {"embedding_tolerance", c.embedding_tolerance},
              {"flow_tolerance", c.flow_tolerance},
              {"flow_max_steps", c.flow_max_steps},
              {"truncation_radius", c.truncation_radius},
              {"radii", radii},
              {"mesh_nodes", c.mesh_nodes},
              {"grading", c.grading},
              {"out_dir", c.out_dir},
              {"plot", c.plot},
              {"threads", c.threads},
              {"allow_supercritical", c.allow_supercritical}};
}

Json metadata_json(Command command, const RunConfig& config) {
  return Json{{"command", to_string(command)},
              {"version", EXSTEKLOV_VERSION},
              {"timestamp", utc_timestamp()},
              {"config", config_json(config)}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_csv(const fs::path& path, const RunConfig& config,
               const std::vector<std::string>& notes, const std::string& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::string text;
  for (const auto& [k, v] : config.resolved()) text += "# " + k + "=" + v + "\n";
  for (const auto& n : notes) text += "# note=" + n + "\n";
  text += header + "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text += ",";
      text += row[i];
    }
    text += "\n";
  }
  write_text(path, text);
}

int quadrature_order_for(const RunConfig& config, int degree) {
  return config.quadrature_order > 0 ? config.quadrature_order : default_quadrature_order(degree);
}

SvgPlot base_plot(const RunConfig& config, std::string title, std::string x, std::string y) {
  SvgPlot plot;
  plot.title = std::move(title);
  plot.x_label = std::move(x);
  plot.y_label = std::move(y);
  plot.metadata = config.resolved();
  return plot;
}

}  // namespace

// --- spectrum ----------------------------------------------------------------

CommandOutcome cmd_spectrum(const RunConfig& config, std::ostream& log) {
  CommandOutcome outcome;
  const fs::path dir = prepare_out_dir(config);
  const int n = config.dimension;
  std::vector<ModeEigenvalue> truncated;
  std::vector<std::string> notes;
  if (n == 3) {
    const auto mesh = RadialMesh::geometric(config.truncation_radius, config.mesh_nodes,
                                            config.grading, n);
    truncated = p2_mode_spectrum(config.max_degree, mesh);
  } else {
    notes.emplace_back("multiplicity and delta_truncated are computed for N = 3 only");
  }

  std::vector<std::vector<std::string>> rows;
  SvgSeries exact{"exact exterior", {}, true, "#1f77b4"};
  SvgSeries trunc{"truncated R=" + format_double(config.truncation_radius), {}, false, "#d62728"};
  for (int l = 0; l <= config.max_degree; ++l) {
    const int delta = eigenvalue_exact(l, n);
    std::vector<std::string> row{std::to_string(l), n == 3 ? std::to_string(multiplicity(l, 3)) : "",
                                 csv_double(delta), ""};
    exact.points.emplace_back(l, delta);
    if (!truncated.empty()) {
      const double d = truncated[static_cast<std::size_t>(l)].delta;
      row[3] = csv_double(d);
      trunc.points.emplace_back(l, d);
    }
    rows.push_back(std::move(row));
  }
  const fs::path csv = dir / "spectrum.csv";
  write_csv(csv, config, notes, "l,multiplicity,delta_exact,delta_truncated", rows);
  outcome.files.push_back(csv.string());
  log << "spectrum: " << rows.size() << " degrees -> " << csv.string() << "\n";

  if (config.plot) {
    SvgPlot plot = base_plot(config, "Steklov eigenvalues", "degree l", "delta_l");
    plot.series.push_back(exact);
    if (!trunc.points.empty()) plot.series.push_back(trunc);
    const fs::path svg = dir / "spectrum.svg";
    write_svg(svg.string(), plot);
    outcome.files.push_back(svg.string());
  }
  return outcome;
}

// --- constants ---------------------------------------------------------------

CommandOutcome cmd_constants(const RunConfig& config, std::ostream& log) {
  CommandOutcome outcome;
  const fs::path dir = prepare_out_dir(config);
  const EnergyParams params = config.energy_params();
  const SteklovBasis basis = SteklovBasis::with_mode_count(3, config.truncation);
  const QuadratureRule rule = build_rule(quadrature_order_for(config, basis.max_degree()));
  const TraceTable table(basis, rule);
  const ScanOptions scan = config.scan_options();
  const EmbeddingConstants constants = compute_embedding_constants(table, params.q, params.p, scan.embedding);

  std::vector<std::string> notes;
  if (params.mu <= 0.0) notes.emplace_back("mu <= 0: rho_k and varrho_k are undefined");
  if (params.lambda <= 0.0) notes.emplace_back("lambda <= 0: dual_rho_k and dual_varrho_k are undefined");
  int unconverged = 0;
  std::vector<std::vector<std::string>> rows;
  SvgSeries alpha{"alpha_k", {}, false, "#1f77b4"};
  SvgSeries beta{"beta_k", {}, false, "#ff7f0e"};
  SvgSeries l2{"s=2", {}, false, "#2ca02c"};
  for (int k = 1; k <= constants.size; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    const FountainRadii r = fountain_radii(k, params, constants);
    rows.push_back({std::to_string(k), csv_double(constants.alpha[i]), csv_double(constants.beta[i]),
                    csv_optional(r.rho), csv_optional(r.varrho), csv_optional(r.dual_rho),
                    csv_optional(r.dual_varrho), csv_double(constants.l2[i])});
    alpha.points.emplace_back(k, constants.alpha[i]);
    beta.points.emplace_back(k, constants.beta[i]);
    l2.points.emplace_back(k, constants.l2[i]);
    if (!constants.converged[i]) ++unconverged;
  }
  if (unconverged > 0) {
    notes.push_back(std::to_string(unconverged) +
                    " rungs did not meet embedding_tolerance; values are the best found");
  }
  const fs::path csv = dir / "constants.csv";
  write_csv(csv, config, notes,
            "k,alpha_k,beta_k,rho_k,varrho_k,dual_rho_k,dual_varrho_k,s2_k", rows);
  outcome.files.push_back(csv.string());
  log << "constants: K=" << constants.size << " c1=" << constants.c1() << " c2=" << constants.c2()
      << " -> " << csv.string() << "\n";

  if (config.plot) {
    SvgPlot plot = base_plot(config, "Tail trace constants", "k", "sup ||u||_s / ||u||");
    plot.series = {alpha, beta, l2};
    const fs::path svg = dir / "constants.svg";
    write_svg(svg.string(), plot);
    outcome.files.push_back(svg.string());
  }
  return outcome;
}

// --- solve -------------------------------------------------------------------

CommandOutcome cmd_solve(const RunConfig& config, std::ostream& log) {
  CommandOutcome outcome;
  const fs::path dir = prepare_out_dir(config);
  const EnergyParams params = config.energy_params();
  if (auto warning = params.validate()) log << "warning: " << *warning << "\n";
  const SteklovBasis basis = SteklovBasis::with_mode_count(3, config.truncation);
  const QuadratureRule rule = build_rule(quadrature_order_for(config, basis.max_degree()));
  const Energy energy(params, basis, rule);

  const auto t0 = std::chrono::steady_clock::now();
  const FountainLadder ladder = fountain_scan(energy, config.scan_options());
  const Prop31Report report = check_prop31(ladder.solutions, params, ladder.constants);
  const std::vector<SolutionRecord> manufactured = radial_solutions(energy);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Json doc = metadata_json(Command::solve, config);
  doc["basis"] = {{"modes", basis.size()},
                  {"max_degree", basis.max_degree()},
                  {"quadrature_order", rule.order()},
                  {"quadrature_nodes", rule.size()}};

  Json rungs = Json::array();
  for (const auto& r : ladder.rungs) {
    rungs.push_back({{"k", r.k},
                     {"alpha", r.alpha},
                     {"beta", r.beta},
                     {"rho", json_optional(r.radii.rho)},
                     {"varrho", json_optional(r.radii.varrho)},
                     {"dual_rho", json_optional(r.radii.dual_rho)},
                     {"dual_varrho", json_optional(r.radii.dual_varrho)},
                     {"found", r.found.size()}});
  }
  doc["constants"] = {{"c1", ladder.constants.c1()}, {"c2", ladder.constants.c2()}, {"rungs", rungs}};

  std::vector<const Prop31Entry*> entry_of(ladder.solutions.size(), nullptr);
  for (const auto& e : report.entries) entry_of[e.record] = &e;
  Json solutions = Json::array();
  for (std::size_t i = 0; i < ladder.solutions.size(); ++i) {
    const SolutionRecord& s = ladder.solutions[i];
    Json coeffs = Json::array();
    for (Eigen::Index j = 0; j < s.element.size(); ++j) coeffs.push_back(s.element.coeffs()[j]);
    Json item{{"index", i},
              {"energy", s.energy},
              {"sign", to_string(s.sign)},
              {"rung", s.rung},
              {"start", to_string(s.start)},
              {"gradient_norm", s.gradient_norm},
              {"bvp_residual", s.bvp_residual},
              {"iterations", s.iterations},
              {"norm", s.element.gradient_norm()}};
    if (const Prop31Entry* e = entry_of[i]) {
      item["prop31"] = {{"bound", json_optional(e->bound)},
                        {"margin", e->bound ? Json(e->margin) : Json(nullptr)},
                        {"holds", e->holds},
                        {"theory_violation", e->theory_violation}};
    } else {
      item["prop31"] = nullptr;
    }
    item["coefficients"] = std::move(coeffs);
    solutions.push_back(std::move(item));
  }
  doc["solutions"] = std::move(solutions);

  Json failures = Json::array();
  for (const auto& f : ladder.failures) {
    failures.push_back({{"rung", f.rung},
                        {"start", to_string(f.kind)},
                        {"index", f.index},
                        {"reason", to_string(f.failure.reason)},
                        {"gradient_norm", f.failure.gradient_norm},
                        {"iterations", f.failure.iterations},
                        {"message", f.failure.message}});
  }
  doc["failures"] = std::move(failures);

  Json radial = Json::array();
  for (const auto& m : manufactured) {
    bool rediscovered = false;
    for (const auto& s : ladder.solutions) {
      rediscovered = rediscovered || same_solution(energy.eigenvalues(), s.element.coeffs(),
                                                   m.element.coeffs());
    }
    radial.push_back({{"coefficient", m.element.coeffs()[0]},
                      {"energy", m.energy},
                      {"gradient_norm", m.gradient_norm},
                      {"bvp_residual", m.bvp_residual},
                      {"rediscovered", rediscovered}});
  }
  doc["radial_solutions"] = std::move(radial);

  Json notes = Json::array();
  for (const auto& n : report.notes) notes.push_back(n);
  const auto neg = ladder.distinct_energies(SignClass::negative);
  const auto pos = ladder.distinct_energies(SignClass::positive);
  doc["prop31"] = {{"all_hold", report.all_hold()},
                   {"violations", report.violations()},
                   {"checked", report.entries.size()},
                   {"notes", notes}};
  doc["summary"] = {{"starts", ladder.starts_attempted},
                    {"converged", ladder.starts_attempted - static_cast<int>(ladder.failures.size())},
                    {"failures", ladder.failures.size()},
                    {"solutions", ladder.solutions.size()},
                    {"negative_levels", neg.size()},
                    {"positive_levels", pos.size()},
                    {"min_energy", neg.empty() ? (pos.empty() ? Json(nullptr) : Json(pos.front()))
                                               : Json(neg.front())},
                    {"max_energy", pos.empty() ? (neg.empty() ? Json(nullptr) : Json(neg.back()))
                                               : Json(pos.back())}};

  const fs::path json = dir / "solve.json";
  write_text(json, doc.dump(2) + "\n");
  outcome.files.push_back(json.string());
  log << "solve: " << ladder.solutions.size() << " solutions (" << neg.size() << " negative, "
      << pos.size() << " positive levels), " << ladder.failures.size() << " failed starts, "
      << seconds << " s -> " << json.string() << "\n";

  if (config.plot) {
    SvgPlot plot = base_plot(config, "Critical energies by rung", "rung k", "energy");
    SvgSeries negative{"negative", {}, true, "#1f77b4"};
    SvgSeries positive{"positive", {}, true, "#d62728"};
    SvgSeries zero{"zero", {}, true, "#7f7f7f"};
    for (const auto& s : ladder.solutions) {
      auto& target = s.sign == SignClass::negative ? negative
                     : s.sign == SignClass::positive ? positive : zero;
      target.points.emplace_back(s.rung, s.energy);
    }
    plot.series = {negative, positive, zero};
    const fs::path svg = dir / "solve.svg";
    write_svg(svg.string(), plot);
    outcome.files.push_back(svg.string());
  }
  return outcome;
}

// --- psteklov ----------------------------------------------------------------

CommandOutcome cmd_psteklov(const RunConfig& config, std::ostream& log) {
  CommandOutcome outcome;
  const fs::path dir = prepare_out_dir(config);
  const std::vector<double> radii =
      config.radii.empty() ? std::vector<double>{config.truncation_radius} : config.radii;

  Json doc = metadata_json(Command::psteklov, config);
  Json runs = Json::array();
  std::vector<double> deltas;
  bool all_converged = true;
  SvgPlot profile = base_plot(config, "First p-Steklov eigenfunction", "r", "v(r)");
  SvgPlot history = base_plot(config, "Ascent flow", "accepted step", "phi");
  const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double radius = radii[i];
    const RadialMesh mesh =
        RadialMesh::geometric(radius, config.mesh_nodes, config.grading, config.dimension);
    const PSteklovProblem problem(config.p, mesh);
    const PSteklovResult r = first_eigenpair(problem, config.flow_options());
    deltas.push_back(r.delta);
    all_converged = all_converged && r.converged;
    const double closed = truncated_first_delta(config.p, config.dimension, radius);

    Json nodes = Json::array(), values = Json::array();
    SvgSeries prof{"R=" + format_double(radius), {}, false, colors[i % 6]};
    for (Eigen::Index j = 0; j <= r.eigenfunction.values.size(); ++j) {
      const double rj = mesh.nodes()[static_cast<std::size_t>(j)];
      const double vj = j < r.eigenfunction.values.size() ? r.eigenfunction.values[j] : 0.0;
      nodes.push_back(rj);
      values.push_back(vj);
      prof.points.emplace_back(rj, vj);
    }
    SvgSeries hist{"R=" + format_double(radius), {}, false, colors[i % 6]};
    for (std::size_t s = 0; s < r.history.size(); ++s) hist.points.emplace_back(s, r.history[s].phi);
    profile.series.push_back(std::move(prof));
    history.series.push_back(std::move(hist));

    runs.push_back({{"radius", radius},
                    {"p", r.p},
                    {"dimension", r.dimension},
                    {"cells", r.cells},
                    {"kappa", r.kappa},
                    {"delta", r.delta},
                    {"iterations", r.iterations},
                    {"converged", r.converged},
                    {"duality_norm", r.duality_norm},
                    {"weak_residual", r.weak_residual},
                    {"delta_closed_form", closed},
                    {"relative_error", r.delta / closed - 1.0},
                    {"message", r.message},
                    {"nodes", nodes},
                    {"eigenfunction", values}});
    log << "psteklov: p=" << r.p << " R=" << radius << " delta=" << r.delta << " steps=" << r.iterations
        << (r.converged ? "" : " (not converged)") << "\n";
  }
  doc["runs"] = std::move(runs);
  const double limit = exterior_first_delta(config.p, config.dimension);
  if (radii.size() >= 2) {
    const Extrapolation ex = extrapolate_delta(config.p, config.dimension, radii, deltas);
    doc["extrapolation"] = {{"delta", ex.delta},
                            {"intercept", ex.intercept},
                            {"slope", ex.slope},
                            {"fit_residual", ex.residual},
                            {"delta_exterior_closed_form", limit},
                            {"absolute_error", ex.delta - limit}};
    log << "psteklov: extrapolated delta=" << ex.delta << " (closed form " << limit << ")\n";
  } else {
    doc["extrapolation"] = nullptr;
  }

  const fs::path json = dir / "psteklov.json";
  write_text(json, doc.dump(2) + "\n");
  outcome.files.push_back(json.string());
  if (config.plot) {
    const fs::path a = dir / "psteklov_profile.svg";
    const fs::path b = dir / "psteklov_flow.svg";
    write_svg(a.string(), profile);
    write_svg(b.string(), history);
    outcome.files.push_back(a.string());
    outcome.files.push_back(b.string());
  }
  if (!all_converged) {
    log << "error: ascent flow did not converge for every radius\n";
    outcome.status = kExitRuntime;
  }
  return outcome;
}

CommandOutcome run_command(Command command, const RunConfig& config, std::ostream& log) {
  try {
    config.validate(command);
  } catch (const std::invalid_argument& e) {
    log << "error: invalid configuration: " << e.what() << "\n";
    return {kExitValidation, {}};
  }
  try {
    switch (command) {
      case Command::spectrum: return cmd_spectrum(config, log);
      case Command::solve: return cmd_solve(config, log);
      case Command::psteklov: return cmd_psteklov(config, log);
      case Command::constants: return cmd_constants(config, log);
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
  }
  return {kExitRuntime, {}};
}

}  // namespace exsteklov::app
