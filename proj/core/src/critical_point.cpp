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

#include "exsteklov/critical_point.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

#include <Eigen/Eigenvalues>

#include "exsteklov/errors.hpp"
#include "internal/pow_kernels.hpp"
#include "internal/seeding.hpp"

namespace exsteklov {

std::string_view to_string(SignClass sign) {
  switch (sign) {
    case SignClass::negative: return "negative";
    case SignClass::zero: return "zero";
    case SignClass::positive: return "positive";
  }
  return "unknown";
}

std::string_view to_string(StartKind kind) {
  switch (kind) {
    case StartKind::y_ball: return "y_ball";
    case StartKind::z_sphere: return "z_sphere";
    case StartKind::random: return "random";
    case StartKind::manufactured: return "manufactured";
  }
  return "unknown";
}

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::max_iterations: return "max_iterations";
    case FailureReason::line_search_stall: return "line_search_stall";
    case FailureReason::diverged: return "diverged";
    case FailureReason::numerical: return "numerical";
  }
  return "unknown";
}

SignClass classify_energy(double energy) {
  if (std::abs(energy) < kEnergyDeadBand) return SignClass::zero;
  return energy > 0.0 ? SignClass::positive : SignClass::negative;
}

double bvp_residual(const Energy& energy, const HarmonicElement& u) {
  const TraceTable& table = energy.table();
  const auto& params = energy.params();
  const Eigen::VectorXd flux =
      table.evaluate((table.eigenvalues().array() * u.coeffs().array()).matrix());
  const Eigen::VectorXd trace = table.evaluate(u.coeffs());
  double sum = 0.0;
  for (Eigen::Index n = 0; n < trace.size(); ++n) {
    const double r = flux[n] - params.lambda * detail::signed_power(trace[n], params.q - 1.0) -
                     params.mu * detail::signed_power(trace[n], params.p - 1.0);
    sum += table.weights()[n] * r * r;
  }
  return std::sqrt(sum);
}

namespace {

SolutionRecord make_record(const Energy& energy, HarmonicElement u, double gradient_norm,
                           int rung, StartKind kind, int iterations) {
  SolutionRecord rec{std::move(u)};
  rec.energy = energy.value(rec.element);
  rec.gradient_norm = gradient_norm;
  rec.sign = classify_energy(rec.energy);
  rec.rung = rung;
  rec.start = kind;
  rec.bvp_residual = bvp_residual(energy, rec.element);
  rec.iterations = iterations;
  return rec;
}

// Pseudo-inverse Newton direction -H^+ g; directions with |eigenvalue| below
// a relative cutoff are dropped.
std::optional<Eigen::VectorXd> newton_direction(const Eigen::MatrixXd& h,
                                                const Eigen::VectorXd& g,
                                                double relative_cutoff = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  if (es.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cutoff = relative_cutoff * ev.cwiseAbs().maxCoeff();
  const Eigen::VectorXd proj = es.eigenvectors().transpose() * g;
  Eigen::VectorXd scaled = Eigen::VectorXd::Zero(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev[i]) > cutoff) scaled[i] = -proj[i] / ev[i];
  }
  Eigen::VectorXd d = es.eigenvectors() * scaled;
  if (!d.allFinite()) return std::nullopt;
  return d;
}

}  // namespace

RefineResult refine(const Energy& energy, const Eigen::VectorXd& start,
                    const SolverOptions& options, int rung, StartKind kind) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (start.size() != energy.size()) throw std::invalid_argument("start has wrong size");

  auto fail = [&](const Eigen::VectorXd& c, FailureReason reason, double gnorm, int it,
                  std::string msg) {
    return RefineResult{RefineFailure{c, reason, gnorm, it, std::move(msg)}};
  };

  Eigen::VectorXd c = start;
  double gnorm = 0.0;
  try {
    Eigen::VectorXd g = energy.gradient(energy.element(c));
    gnorm = g.norm();
    for (int it = 0;; ++it) {
      if (gnorm <= options.tolerance) {
        // Polishing Newton steps, kept only if they lower the gradient. The
        // coarser cutoff skips nearly flat orbit directions.
        const Eigen::MatrixXd h = energy.hessian(energy.element(c), options.regularization);
        const Eigen::VectorXd c0 = c;
        for (double cutoff : {1e-12, 1e-8}) {
          if (auto d = newton_direction(h, g, cutoff)) {
            Eigen::VectorXd trial = c0 + *d;
            const double gt = energy.gradient(energy.element(trial)).norm();
            if (gt < gnorm) {
              c = std::move(trial);
              gnorm = gt;
            }
          }
        }
        return make_record(energy, energy.element(c), gnorm, rung, kind, it);
      }
      if (it >= options.max_iterations) {
        return fail(c, FailureReason::max_iterations, gnorm, it, "iteration limit reached");
      }
      if (c.norm() > options.divergence_bound) {
        return fail(c, FailureReason::diverged, gnorm, it, "iterate left the bounded region");
      }
      const HarmonicElement u = energy.element(c);
      const Eigen::MatrixXd h = energy.hessian(u, options.regularization);
      const double merit = gnorm * gnorm;

      bool accepted = false;
      if (auto d = newton_direction(h, g)) {
        double t = 1.0;
        for (int bt = 0; bt < 12 && !accepted; ++bt, t *= options.armijo_factor) {
          Eigen::VectorXd trial = c + t * *d;
          Eigen::VectorXd gt = energy.gradient(energy.element(trial));
          const double mt = gt.squaredNorm();
          // Full step: any decrease. Damped steps: Armijo on the merit.
          const bool ok = bt == 0 ? mt < merit
                                  : mt <= (1.0 - 2.0 * options.armijo_slope * t) * merit;
          if (ok) {
            c = std::move(trial);
            g = std::move(gt);
            accepted = true;
          }
        }
      }
      if (!accepted) {
        // Steepest descent on M = 1/2 |g|^2, whose gradient is H g.
        const Eigen::VectorXd hg = h * g;
        const double slope = hg.squaredNorm();
        const Eigen::VectorXd hhg = h * hg;
        double t = hhg.squaredNorm() > 0.0 ? slope / hhg.squaredNorm() : 1.0;
        for (int bt = 0; bt < 60 && !accepted; ++bt, t *= options.armijo_factor) {
          Eigen::VectorXd trial = c - t * hg;
          Eigen::VectorXd gt = energy.gradient(energy.element(trial));
          if (0.5 * gt.squaredNorm() <= 0.5 * merit - options.armijo_slope * t * slope) {
            c = std::move(trial);
            g = std::move(gt);
            accepted = true;
          }
        }
      }
      if (!accepted) {
        return fail(c, FailureReason::line_search_stall, gnorm, it + 1,
                    "line search found no decrease of the gradient norm");
      }
      gnorm = g.norm();
    }
  } catch (const NumericalError& e) {
    return fail(c, FailureReason::numerical, gnorm, 0, e.what());
  }
}

std::vector<SolutionRecord> radial_solutions(const Energy& energy) {
  if (energy.params().dimension != 3) {
    throw std::invalid_argument("radial_solutions requires N = 3");
  }
  const auto& prm = energy.params();
  const double delta1 = energy.eigenvalues()[0];
  auto f = [&](double t) {
    return delta1 * t - prm.lambda * std::pow(t, prm.q - 1.0) - prm.mu * std::pow(t, prm.p - 1.0);
  };

  // Scan a log grid of trace values for sign changes, then bisect.
  constexpr double kLo = 1e-14, kHi = 1e8;
  constexpr int kSamples = 4000;
  std::vector<double> roots;
  double t_prev = kLo, f_prev = f(kLo);
  for (int i = 1; i <= kSamples; ++i) {
    const double t = kLo * std::pow(kHi / kLo, static_cast<double>(i) / kSamples);
    const double ft = f(t);
    if (ft == 0.0) {
      roots.push_back(t);
    } else if (f_prev != 0.0 && (ft > 0.0) != (f_prev > 0.0)) {
      double a = t_prev, b = t, fa = f_prev;
      for (int it = 0; it < 200 && b - a > 1e-16 * b; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = f(mid);
        if ((fm > 0.0) == (fa > 0.0)) {
          a = mid;
          fa = fm;
        } else {
          b = mid;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    t_prev = t;
    f_prev = ft;
  }

  const double lift = std::sqrt(4.0 * std::numbers::pi);  // 1 / Y_00
  std::vector<SolutionRecord> out;
  for (double t : roots) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd c = Eigen::VectorXd::Zero(energy.size());
      c[0] = sign * t * lift;
      HarmonicElement u = energy.element(c);
      const double gnorm = energy.gradient(u).norm();
      out.push_back(make_record(energy, std::move(u), gnorm, 0, StartKind::manufactured, 0));
    }
  }
  return out;
}

bool same_solution(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) {
  const double scale = 1.0 + weighted_norm(eigenvalues, a);
  const double d = std::min(weighted_norm(eigenvalues, a - b), weighted_norm(eigenvalues, a + b));
  return d <= 1e-6 * scale;
}

std::vector<double> distinct_levels(std::vector<double> energies) {
  std::sort(energies.begin(), energies.end());
  std::vector<double> out;
  for (double e : energies) {
    if (!out.empty() &&
        std::abs(e - out.back()) <= 1e-7 * std::max(std::abs(e), std::abs(out.back())) + 1e-14) {
      continue;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<double> FountainLadder::distinct_energies(SignClass sign) const {
  std::vector<double> e;
  for (const auto& s : solutions) {
    if (s.sign == sign) e.push_back(s.energy);
  }
  return distinct_levels(std::move(e));
}

std::optional<double> FountainLadder::best_energy_at(int k, SignClass sign) const {
  std::optional<double> best;
  for (const auto& rung : rungs) {
    if (rung.k != k) continue;
    for (std::size_t idx : rung.found) {
      const auto& s = solutions[idx];
      if (s.sign == sign && (!best || s.energy < *best)) best = s.energy;
    }
  }
  return best;
}

namespace {

struct StartTask {
  int rung;
  StartKind kind;
  int index;
  Eigen::VectorXd start;
};

// Point on the gradient-norm sphere of `radius` within coordinates [lo, hi).
Eigen::VectorXd sphere_point(const Eigen::VectorXd& delta, int lo, int hi, double radius,
                             std::mt19937_64* rng, int axis) {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(delta.size());
  if (rng == nullptr) {
    a[axis] = 1.0;
  } else {
    std::normal_distribution<double> normal;
    for (int j = lo; j < hi; ++j) a[j] = normal(*rng);
  }
  a *= radius / a.norm();
  return (a.array() / delta.array().sqrt()).matrix();
}

}  // namespace

FountainLadder fountain_scan(const Energy& energy, const ScanOptions& options) {
  const auto size = static_cast<int>(energy.size());
  if (size < 4) throw std::invalid_argument("fountain_scan requires K >= 4");
  if (options.starts_per_rung < 0) throw std::invalid_argument("starts_per_rung must be >= 0");
  const auto& params = energy.params();
  const Eigen::VectorXd& delta = energy.eigenvalues();

  FountainLadder ladder;
  ladder.size = size;
  ladder.constants = compute_embedding_constants(energy.table(), params.q, params.p,
                                                 options.embedding);

  std::vector<StartTask> tasks;
  for (int k = 1; k <= size; ++k) {
    FountainRung rung;
    rung.k = k;
    rung.alpha = ladder.constants.alpha[static_cast<std::size_t>(k - 1)];
    rung.beta = ladder.constants.beta[static_cast<std::size_t>(k - 1)];
    rung.radii = fountain_radii(k, params, ladder.constants);
    ladder.rungs.push_back(rung);

    if (rung.radii.dual_varrho) {
      for (int i = 0; i < options.starts_per_rung; ++i) {
        std::mt19937_64 rng(detail::mix_seed(options.seed, k, 1, i));
        tasks.push_back({k, StartKind::y_ball, i,
                         sphere_point(delta, 0, k, *rung.radii.dual_varrho,
                                      i == 0 ? nullptr : &rng, k - 1)});
      }
    }
    if (rung.radii.varrho) {
      for (int i = 0; i < options.starts_per_rung; ++i) {
        std::mt19937_64 rng(detail::mix_seed(options.seed, k, 2, i));
        tasks.push_back({k, StartKind::z_sphere, i,
                         sphere_point(delta, k - 1, size, *rung.radii.varrho,
                                      i == 0 ? nullptr : &rng, k - 1)});
      }
    }
    for (int i = 0; i < options.random_starts_per_rung; ++i) {
      std::mt19937_64 rng(detail::mix_seed(options.seed, k, 3, i));
      std::uniform_real_distribution<double> unit;
      const double lo = rung.radii.dual_varrho.value_or(0.1);
      const double hi = rung.radii.varrho.value_or(10.0);
      const double radius = lo * std::pow(hi / lo, unit(rng));
      tasks.push_back({k, StartKind::random, i, sphere_point(delta, 0, size, radius, &rng, 0)});
    }
  }
  ladder.starts_attempted = static_cast<int>(tasks.size());

  std::vector<std::optional<RefineResult>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      results[i] = refine(energy, tasks[i].start, options.solver, tasks[i].rung, tasks[i].kind);
    }
  };
  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const StartTask& task = tasks[i];
    FountainRung& rung = ladder.rungs[static_cast<std::size_t>(task.rung - 1)];
    if (auto* failure = std::get_if<RefineFailure>(&*results[i])) {
      ladder.failures.push_back({task.rung, task.kind, task.index, std::move(*failure)});
      continue;
    }
    auto& rec = std::get<SolutionRecord>(*results[i]);
    std::optional<std::size_t> match;
    for (std::size_t s = 0; s < ladder.solutions.size(); ++s) {
      if (same_solution(delta, ladder.solutions[s].element.coeffs(), rec.element.coeffs())) {
        match = s;
        break;
      }
    }
    if (!match) {
      ladder.solutions.push_back(std::move(rec));
      match = ladder.solutions.size() - 1;
      rung.found.push_back(*match);
    }
    rung.hits.push_back(*match);
  }
  return ladder;
}

bool Prop31Report::all_hold() const {
  return std::all_of(entries.begin(), entries.end(), [](const auto& e) { return e.holds; });
}

int Prop31Report::violations() const {
  return static_cast<int>(std::count_if(entries.begin(), entries.end(),
                                        [](const auto& e) { return e.theory_violation; }));
}

Prop31Report check_prop31(const std::vector<SolutionRecord>& records,
                          const EnergyParams& params, const EmbeddingConstants& constants) {
  Prop31Report report;
  const double q = params.q, p = params.p;
  bool any_positive = false, any_negative = false;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.sign == SignClass::zero) continue;
    Prop31Entry entry;
    entry.record = i;
    entry.sign = rec.sign;
    entry.norm = rec.element.gradient_norm();
    if (rec.sign == SignClass::positive) {
      any_positive = true;
      if (params.mu <= 0.0) {
        entry.theory_violation = true;
      } else {
        const double c2 = constants.c2();
        entry.bound = std::pow((1.0 / q - 0.5) / (params.mu * std::pow(c2, p) * (1.0 / q - 1.0 / p)),
                               1.0 / (p - 2.0));
        entry.margin = entry.norm - *entry.bound;
        entry.holds = entry.margin >= 0.0;
      }
    } else {
      any_negative = true;
      if (params.lambda <= 0.0) {
        entry.theory_violation = true;
      } else {
        const double c1 = constants.c1();
        entry.bound = std::pow(params.lambda * std::pow(c1, q) * (1.0 / q - 1.0 / p) / (0.5 - 1.0 / p),
                               1.0 / (2.0 - q));
        entry.margin = *entry.bound - entry.norm;
        entry.holds = entry.margin >= 0.0;
      }
    }
    report.entries.push_back(entry);
  }
  if (params.mu <= 0.0 && !any_positive) {
    report.notes.emplace_back(
        "mu <= 0: no positive-energy solutions found, consistent with nonexistence of "
        "positive-energy solutions for mu <= 0");
  }
  if (params.lambda <= 0.0 && !any_negative) {
    report.notes.emplace_back(
        "lambda <= 0: no negative-energy solutions found, consistent with nonexistence of "
        "negative-energy solutions for lambda <= 0");
  }
  return report;
}

}  // namespace exsteklov
