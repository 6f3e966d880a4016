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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "exsteklov/critical_point.hpp"
#include "exsteklov/energy.hpp"
#include "exsteklov/p_steklov.hpp"
#include "exsteklov/steklov_basis.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace exsteklov;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail.clear();
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<Outcome()> run;
};

Energy make_energy(const EnergyParams& params, const SteklovBasis& basis, const QuadratureRule& rule) {
  return Energy(params, basis, rule);
}

EnergyParams params(double lambda, double mu, double q = 1.5, double p = 3.0) {
  EnergyParams out;
  out.lambda = lambda;
  out.mu = mu;
  out.q = q;
  out.p = p;
  return out;
}

// ---------------------------------------------------------------------------

Outcome analytic_spectrum() {
  Outcome o;
  gen::Source src(101);
  const double h = 1e-5;
  double worst = 0.0;
  for (int n = 3; n <= 5; ++n) {
    for (int l = 0; l <= 20; ++l) {
      o.require(eigenvalue_exact(l, n) == l + n - 2, "integer eigenvalue mismatch");
      const double delta = eigenvalue(l, n);
      // One-sided second-order difference toward the origin.
      const double f0 = radial_factor(l, n, 1.0), f1 = radial_factor(l, n, 1 + h),
                   f2 = radial_factor(l, n, 1 + 2 * h);
      const double inward = (3 * f0 - 4 * f1 + f2) / (2 * h);
      worst = std::max(worst, std::abs(inward - delta * f0) / (delta * f0));
      if (n != 3) continue;
      for (int trial = 0; trial < 4; ++trial) {
        const Point3 x = src.unit_vector();
        const ModeIndex mode{l, src.integer(-l, l), 1};
        const double y = boundary_trace(mode, x);
        if (std::abs(y) < 1e-3) continue;
        const double u0 = exterior_value(mode, x), u1 = exterior_value(mode, (1 + h) * x),
                     u2 = exterior_value(mode, (1 + 2 * h) * x);
        worst = std::max(worst, std::abs((3 * u0 - 4 * u1 + u2) / (2 * h) - delta * y) / std::abs(delta * y));
      }
    }
  }
  o.require(worst <= 1e-6, "Steklov relation error " + fmt("%.2e", worst));
  o.note("max relative error " + fmt("%.2e", worst));
  return o;
}

Outcome truncated_p2_spectrum() {
  Outcome o;
  const double radius = 11.0;
  RadialMesh mesh = RadialMesh::geometric(radius, kDefaultMeshCells, kDefaultMeshGrading);
  std::vector<std::vector<double>> err;
  for (int level = 0; level < 3; ++level) {
    const auto spectrum = p2_mode_spectrum(10, mesh);
    std::vector<double> e;
    for (const auto& m : spectrum) e.push_back(std::abs(m.delta / oracle::shell_mode_delta(m.degree, radius) - 1.0));
    err.push_back(e);
    mesh = mesh.bisected();
  }
  const double worst = *std::max_element(err[0].begin(), err[0].end());
  o.require(worst <= 1e-4, "relative error " + fmt("%.2e", worst));
  double min_rate = INFINITY, max_rate = 0.0;
  for (int l = 0; l <= 10; ++l) {
    for (int level = 0; level < 2; ++level) {
      const double rate = std::log2(err[level][l] / err[level + 1][l]);
      min_rate = std::min(min_rate, rate);
      max_rate = std::max(max_rate, rate);
    }
  }
  o.require(min_rate >= 1.8 && max_rate <= 2.2,
            "observed order in [" + fmt("%.3f", min_rate) + ", " + fmt("%.3f", max_rate) + "]");
  o.note("max relative error " + fmt("%.2e", worst) + ", order " + fmt("%.3f", min_rate) + ".." +
         fmt("%.3f", max_rate));
  return o;
}

Outcome general_p_eigenvalue() {
  Outcome o;
  const int cells = 2000;
  const double grading = 1.003;
  for (double p : {1.5, 2.5}) {
    std::vector<double> radii{11.0, 21.0, 41.0}, deltas;
    for (double radius : radii) {
      const PSteklovProblem problem(p, RadialMesh::geometric(radius, cells, grading));
      const PSteklovResult r = first_eigenpair(problem);
      o.require(r.converged, "flow did not converge at p=" + fmt("%g", p) + ": " + r.message);
      deltas.push_back(r.delta);
      if (radius == 21.0) {
        const double rel = std::abs(r.delta / oracle::shell_delta(p, 3, radius) - 1.0);
        o.require(rel <= 1e-5, "p=" + fmt("%g", p) + " R=21 relative error " + fmt("%.2e", rel));
        o.note("p=" + fmt("%g", p) + " R=21 rel " + fmt("%.1e", rel));
      }
    }
    const Extrapolation ex = extrapolate_delta(p, 3, radii, deltas);
    const double target = oracle::exterior_delta(p, 3);
    const double abs_err = std::abs(ex.delta - target);
    o.require(abs_err <= 1e-3 && abs_err <= 1e-3 * target,
              "p=" + fmt("%g", p) + " extrapolated " + fmt("%.9f", ex.delta));
    o.note("extrapolated " + fmt("%.7f", ex.delta) + " vs " + fmt("%.7f", target));
  }
  return o;
}

nlohmann::json run_solve(double lambda, double mu, const fs::path& dir, Outcome& o) {
  app::RunConfig c;
  c.lambda = lambda;
  c.mu = mu;
  c.q = 1.5;
  c.p = 3.0;
  c.truncation = 16;
  c.embedding_starts = 2;
  c.out_dir = dir.string();
  std::ostringstream log;
  const auto out = app::run_command(app::Command::solve, c, log);
  o.require(out.status == app::kExitOk, "solve exited with " + std::to_string(out.status));
  std::ifstream in(dir / "solve.json");
  return nlohmann::json::parse(in, nullptr, false);
}

Outcome manufactured_solutions() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "exsteklov_acceptance_solve";
  fs::create_directories(dir);
  const double target = 2.0 * oracle::pi / 3.0;
  for (auto [lambda, mu, sign] : {std::tuple{1.0, 0.0, -1.0}, std::tuple{0.0, 1.0, 1.0}}) {
    const auto doc = run_solve(lambda, mu, dir, o);
    if (doc.is_discarded()) {
      o.require(false, "unreadable solve.json");
      continue;
    }
    double best = INFINITY, residual = INFINITY;
    for (const auto& s : doc["solutions"]) {
      const double err = std::abs(s["energy"].get<double>() - sign * target);
      if (err < best) {
        best = err;
        residual = s["bvp_residual"].get<double>();
      }
    }
    const std::string tag = sign < 0 ? "-2pi/3" : "+2pi/3";
    o.require(best <= 1e-8, tag + " not recovered (closest " + fmt("%.2e", best) + ")");
    o.require(residual <= 1e-9, tag + " bvp residual " + fmt("%.2e", residual));
    o.note(tag + " error " + fmt("%.1e", best) + " residual " + fmt("%.1e", residual));
  }
  fs::remove_all(dir);
  return o;
}

struct FountainRuns {
  SteklovBasis basis25 = SteklovBasis::with_mode_count(3, 25);
  SteklovBasis basis36 = SteklovBasis::with_mode_count(3, 36);
  QuadratureRule rule25 = build_rule(default_quadrature_order(basis25.max_degree()));
  QuadratureRule rule36 = build_rule(default_quadrature_order(basis36.max_degree()));
  Energy energy25 = make_energy(params(1, 1), basis25, rule25);
  Energy energy36 = make_energy(params(1, 1), basis36, rule36);
  FountainLadder ladder25, ladder36;
};

FountainRuns& fountain_runs() {
  static FountainRuns runs;
  return runs;
}

Outcome fountain_multiplicity() {
  Outcome o;
  FountainRuns& f = fountain_runs();
  ScanOptions options;
  options.starts_per_rung = 12;
  options.seed = 7;
  f.ladder25 = fountain_scan(f.energy25, options);
  f.ladder36 = fountain_scan(f.energy36, options);

  const auto neg25 = f.ladder25.distinct_energies(SignClass::negative);
  const auto pos25 = f.ladder25.distinct_energies(SignClass::positive);
  const auto neg36 = f.ladder36.distinct_energies(SignClass::negative);
  const auto pos36 = f.ladder36.distinct_energies(SignClass::positive);
  o.require(neg25.size() >= 5, "K=25 negative levels " + std::to_string(neg25.size()));
  o.require(pos25.size() >= 3, "K=25 positive levels " + std::to_string(pos25.size()));
  o.require(std::none_of(neg25.begin(), neg25.end(), [](double e) { return e >= 0.0; }),
            "negative levels not below 0");

  // Best negative energy by discovery rung rises toward 0.
  int first = 0, last = 0;
  for (const auto& r : f.ladder25.rungs) {
    if (!f.ladder25.best_energy_at(r.k, SignClass::negative)) continue;
    if (first == 0) first = r.k;
    last = r.k;
  }
  o.require(first > 0, "no negative rung");
  if (first > 0) {
    const double lo = *f.ladder25.best_energy_at(first, SignClass::negative);
    const double hi = *f.ladder25.best_energy_at(last, SignClass::negative);
    o.require(hi >= lo, "best negative energy at rung " + std::to_string(last) + " (" + fmt("%.6f", hi) +
                            ") below rung " + std::to_string(first) + " (" + fmt("%.6f", lo) + ")");
    o.note("best negative rung " + std::to_string(first) + ": " + fmt("%.4f", lo) + ", rung " +
           std::to_string(last) + ": " + fmt("%.4f", hi));
  }
  o.require(neg36.size() >= neg25.size(), "K=36 negative count decreased");
  o.require(pos36.size() >= pos25.size(), "K=36 positive count decreased");
  if (!pos25.empty() && !pos36.empty()) {
    o.require(pos36.back() >= pos25.back(), "K=36 max positive energy decreased");
    o.note("max positive " + fmt("%.2f", pos25.back()) + " -> " + fmt("%.2f", pos36.back()));
  }
  o.note("levels K=25 " + std::to_string(neg25.size()) + "-/" + std::to_string(pos25.size()) + "+, K=36 " +
         std::to_string(neg36.size()) + "-/" + std::to_string(pos36.size()) + "+");
  return o;
}

Outcome proposition_bounds() {
  Outcome o;
  FountainRuns& f = fountain_runs();
  int checked = 0;
  for (auto* pair : {&f.ladder25, &f.ladder36}) {
    const Energy& e = pair == &f.ladder25 ? f.energy25 : f.energy36;
    const Prop31Report report = check_prop31(pair->solutions, e.params(), pair->constants);
    for (const auto& entry : report.entries) {
      o.require(entry.holds && entry.margin >= 0.0,
                "record " + std::to_string(entry.record) + " margin " + fmt("%.3e", entry.margin));
    }
    checked += static_cast<int>(report.entries.size());
  }
  o.require(checked > 0, "no records checked");

  const SteklovBasis basis = SteklovBasis::with_mode_count(3, 16);
  const QuadratureRule rule = build_rule(default_quadrature_order(basis.max_degree()));
  ScanOptions options;
  options.starts_per_rung = 6;
  options.random_starts_per_rung = 2;
  options.embedding.random_starts = 2;
  struct Case {
    double lambda, mu;
    SignClass forbidden;
  };
  for (const Case c : {Case{1.0, -1.0, SignClass::positive}, Case{1.0, 0.0, SignClass::positive},
                       Case{-1.0, 1.0, SignClass::negative}, Case{0.0, 1.0, SignClass::negative}}) {
    const Energy energy(params(c.lambda, c.mu), basis, rule);
    const FountainLadder ladder = fountain_scan(energy, options);
    const auto bad = std::count_if(ladder.solutions.begin(), ladder.solutions.end(),
                                   [&](const SolutionRecord& r) { return r.sign == c.forbidden; });
    o.require(bad == 0, std::to_string(bad) + " forbidden records at lambda=" + fmt("%g", c.lambda) +
                            " mu=" + fmt("%g", c.mu));
    const Prop31Report report = check_prop31(ladder.solutions, energy.params(), ladder.constants);
    o.require(report.all_hold(), "bound violated at lambda=" + fmt("%g", c.lambda) + " mu=" + fmt("%g", c.mu));
    checked += static_cast<int>(report.entries.size());
  }
  o.note(std::to_string(checked) + " records checked");
  return o;
}

Outcome identities_and_derivatives() {
  Outcome o;
  gen::Source src(707);
  const SteklovBasis basis = SteklovBasis::with_mode_count(3, 25);
  const QuadratureRule rule = build_rule(default_quadrature_order(basis.max_degree()));
  const double lambda = 1.0, mu = 1.0, q = 1.5, p = 3.0;
  const Energy energy(params(lambda, mu, q, p), basis, rule);

  double ps = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto u = energy.element(src.coefficients(25, src.uniform(0.1, 3.0)));
    const double scale = std::max(1.0, u.gradient_norm() * u.gradient_norm());
    for (PsExponent r : {PsExponent::p, PsExponent::q}) {
      const PsIdentity id = energy.ps_identity(u, r);
      ps = std::max(ps, std::abs(id.lhs - id.rhs) / scale);
    }
  }
  o.require(ps <= 1e-12, "ps identity gap " + fmt("%.2e", ps));

  double fd = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd c = src.coefficients(25);
    const Eigen::VectorXd g = energy.gradient(energy.element(c));
    for (int j = 0; j < 25; ++j) {
      Eigen::VectorXd a = c, b = c;
      a[j] += 1e-6;
      b[j] -= 1e-6;
      const double d = (energy.value(energy.element(a)) - energy.value(energy.element(b))) / 2e-6;
      fd = std::max(fd, std::abs(d - g[j]) / std::max(1.0, std::abs(g[j])));
    }
  }
  o.require(fd <= 1e-6, "gradient difference " + fmt("%.2e", fd));

  bool even = true;
  double scaling = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd c = src.coefficients(25, 2.0);
    const auto u = energy.element(c), v = energy.element(-c);
    even = even && energy.value(u) == energy.value(v) && energy.gradient(u) == -energy.gradient(v);
    const double nq = std::pow(energy.boundary_norm(u, q), q), np = std::pow(energy.boundary_norm(u, p), p);
    for (double t : {0.05, 0.5, 2.0, 10.0}) {
      const double expected = 0.5 * t * t * u.gradient_norm() * u.gradient_norm() -
                              lambda * std::pow(t, q) / q * nq - mu * std::pow(t, p) / p * np;
      scaling = std::max(scaling, std::abs(energy.value(energy.element(t * c)) - expected) /
                                      std::max(1.0, std::abs(expected)));
    }
  }
  o.require(even, "evenness is not exact");
  o.require(scaling <= 1e-12, "scaling expansion gap " + fmt("%.2e", scaling));
  o.note("ps " + fmt("%.1e", ps) + ", gradient " + fmt("%.1e", fd) + ", scaling " + fmt("%.1e", scaling));
  return o;
}

Outcome tail_constants() {
  Outcome o;
  const SteklovBasis basis = SteklovBasis::with_mode_count(3, 36);
  const QuadratureRule rule = build_rule(default_quadrature_order(basis.max_degree()));
  const EnergyParams prm = params(1, 1);
  const Energy energy(prm, basis, rule);
  const EmbeddingConstants ec = compute_embedding_constants(energy.table(), prm.q, prm.p);
  double l2 = 0.0;
  for (int k = 0; k < 36; ++k) {
    if (k > 0) {
      o.require(ec.alpha[k] <= ec.alpha[k - 1], "alpha increases at k=" + std::to_string(k + 1));
      o.require(ec.beta[k] <= ec.beta[k - 1], "beta increases at k=" + std::to_string(k + 1));
    }
    l2 = std::max(l2, std::abs(ec.l2[k] - 1.0 / std::sqrt(basis.eigenvalues()[k])));
  }
  o.require(l2 <= 1e-8, "s=2 column error " + fmt("%.2e", l2));
  o.require(ec.alpha.back() <= 0.5 * ec.alpha.front(), "alpha_K above alpha_1 / 2");
  double formula = 0.0;
  std::vector<double> varrho, dual;
  for (int k = 1; k <= 36; ++k) {
    const FountainRadii r = fountain_radii(k, prm, ec);
    varrho.push_back(*r.varrho);
    dual.push_back(*r.dual_rho);
    const double vr = std::pow(prm.mu * std::pow(ec.alpha[k - 1], prm.p), -1.0 / (prm.p - 2.0));
    const double dr = std::pow(4.0 * prm.lambda * std::pow(ec.beta[k - 1], prm.q) / prm.q, 1.0 / (2.0 - prm.q));
    formula = std::max({formula, std::abs(*r.varrho / vr - 1.0), std::abs(*r.dual_rho / dr - 1.0),
                        std::abs(*r.rho / (2 * vr) - 1.0), std::abs(*r.dual_varrho / (dr / 2) - 1.0)});
  }
  o.require(formula <= 1e-13, "radius formula mismatch " + fmt("%.2e", formula));
  o.require(std::is_sorted(varrho.begin(), varrho.end()), "varrho_k not nondecreasing");
  o.require(std::is_sorted(dual.rbegin(), dual.rend()) && dual.front() > dual.back(),
            "dual rho_k not decreasing");
  o.note("alpha " + fmt("%.4f", ec.alpha.front()) + " -> " + fmt("%.4f", ec.alpha.back()) + ", beta " +
         fmt("%.4f", ec.beta.front()) + " -> " + fmt("%.4f", ec.beta.back()) + ", s=2 error " + fmt("%.1e", l2));
  return o;
}

RadialFunction random_unit(const PSteklovProblem& problem, gen::Source& src) {
  const double radius = problem.mesh().radius();
  const double a = src.uniform(0.2, 2.0), b = src.uniform(-1.0, 1.0), e = src.uniform(0.5, 3.0);
  RadialFunction v = problem.interpolate([&](double r) {
    return a * (std::pow(r, -e) - std::pow(radius, -e)) + b * (radius - r) / radius;
  });
  if (v.at_boundary() == 0.0) v.values[0] = 1.0;
  return problem.normalized(v);
}

Outcome flow_contract() {
  Outcome o;
  gen::Source src(909);
  const RadialMesh mesh = RadialMesh::geometric(11.0, kDefaultMeshCells, kDefaultMeshGrading);

  // Accepted ascent steps keep unit norm and nondecreasing phi.
  const PSteklovProblem slow(1.5, mesh);
  RadialFunction v = random_unit(slow, src);
  const auto same = slow.flow_step(v, 0.0);
  o.require(same && same->values == v.values, "H(v, 0) differs from v");
  double drift = 0.0, drop = 0.0, t = 0.1;
  int accepted = 0, attempts = 0;
  double phi = slow.phi_psi(v).phi;
  while (accepted < 1000 && attempts < 100000) {
    ++attempts;
    const RadialFunction u = slow.duality_element(v);
    const auto w = slow.flow_step(v, u, t);
    if (!w) {
      t *= 0.5;
      continue;
    }
    const double next = slow.phi_psi(*w).phi;
    if (next < phi) {
      t *= 0.5;
      continue;
    }
    drop = std::max(drop, phi - next);
    drift = std::max(drift, std::abs(slow.gradient_norm(*w) - 1.0));
    v = *w;
    phi = next;
    if (++accepted % 3 == 0) t *= 2.0;
  }
  o.require(accepted == 1000, "only " + std::to_string(accepted) + " accepted steps");
  o.require(drift <= 1e-13, "norm drift " + fmt("%.2e", drift));

  // First-order remainder shrinks with t.
  int monotone = 0, total = 0;
  std::string offenders;
  for (double p : {1.5, 2.0, 2.5}) {
    const PSteklovProblem problem(p, mesh);
    for (int trial = 0; trial < 10; ++trial) {
      const RadialFunction s = random_unit(problem, src);
      const RadialFunction u = problem.duality_element(s);
      const double uu = problem.inner(u, u), phi0 = problem.phi_psi(s).phi;
      double previous = INFINITY;
      bool ok = true;
      for (double step : {1e-2, 1e-3, 1e-4}) {
        const double ell = std::abs((problem.phi_psi(*problem.flow_step(s, u, step)).phi - phi0) / step - uu);
        ok = ok && ell < previous;
        previous = ell;
      }
      if (!ok) offenders += " p=" + fmt("%g", p) + "#" + std::to_string(trial);
      monotone += ok;
      ++total;
    }
  }
  o.require(monotone == total, "remainder not monotone for " + std::to_string(total - monotone) + " starts:" + offenders);
  o.note("1000 steps, norm drift " + fmt("%.1e", drift) + ", remainder monotone " + std::to_string(monotone) +
         "/" + std::to_string(total));
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "analytic exterior spectrum", 1.0, analytic_spectrum},
      {2, "truncated p=2 spectrum", 10.0, truncated_p2_spectrum},
      {3, "general-p first eigenvalue", 30.0, general_p_eigenvalue},
      {4, "manufactured nonlinear solutions", 10.0, manufactured_solutions},
      {5, "fountain multiplicity", 300.0, fountain_multiplicity},
      {6, "norm bounds and sign exclusions", 60.0, proposition_bounds},
      {7, "identities and derivatives", 30.0, identities_and_derivatives},
      {8, "tail constants", 60.0, tail_constants},
      {9, "flow contract", 30.0, flow_contract},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds > c.limit_seconds) {
      o.pass = false;
      o.detail += (o.detail.empty() ? "" : "; ") + fmt("runtime over %.0f s", c.limit_seconds);
    }
    failed += !o.pass;
    std::printf("criterion %d: %s  %s (%.2f s / %.0f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.title,
                seconds, c.limit_seconds, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
