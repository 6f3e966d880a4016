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

#include "exsteklov/energy.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "exsteklov/errors.hpp"
#include "internal/pow_kernels.hpp"
#include "internal/seeding.hpp"

namespace exsteklov {

// --- EnergyParams ------------------------------------------------------------

double EnergyParams::trace_critical_exponent() const {
  return 2.0 * (dimension - 1.0) / (dimension - 2.0);
}

std::optional<std::string> EnergyParams::validate() const {
  if (dimension != 3) {
    throw std::invalid_argument("dimension: only N = 3 is computable, got " +
                                std::to_string(dimension));
  }
  if (!std::isfinite(lambda)) throw std::invalid_argument("lambda: must be finite");
  if (!std::isfinite(mu)) throw std::invalid_argument("mu: must be finite");
  if (!(q > 1.0 && q < 2.0)) throw std::invalid_argument("q: must satisfy 1 < q < 2");
  if (!(p > 2.0) || !std::isfinite(p)) throw std::invalid_argument("p: must satisfy p > 2");
  const double critical = trace_critical_exponent();
  if (!(p < critical)) {
    if (!allow_supercritical) {
      throw std::invalid_argument("p: must be below the trace-critical exponent " +
                                  std::to_string(critical) +
                                  " (set allow_supercritical to override)");
    }
    return "p = " + std::to_string(p) + " is at or above the trace-critical exponent " +
           std::to_string(critical) + "; discrete constants may not converge";
  }
  return std::nullopt;
}

// --- HarmonicElement ----------------------------------------------------------

double weighted_norm(const Eigen::VectorXd& eigenvalues, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() > eigenvalues.size()) {
    throw std::invalid_argument("coefficient vector longer than the basis");
  }
  return std::sqrt((eigenvalues.head(coeffs.size()).array() * coeffs.array().square()).sum());
}

HarmonicElement::HarmonicElement(const Eigen::VectorXd& eigenvalues, Eigen::VectorXd coeffs)
    : coeffs_(std::move(coeffs)), norm_(weighted_norm(eigenvalues, coeffs_)) {}

// --- TraceTable ----------------------------------------------------------------

TraceTable::TraceTable(const SteklovBasis& basis, const QuadratureRule& rule)
    : values_(static_cast<Eigen::Index>(rule.size()), basis.size()),
      weights_(static_cast<Eigen::Index>(rule.size())),
      eigenvalues_(basis.eigenvalues()) {
  if (rule.exactness() < 2 * basis.max_degree()) {
    throw std::invalid_argument(
        "quadrature order too low: exactness must reach twice the basis degree");
  }
  Eigen::VectorXd row(basis.size());
  for (std::size_t n = 0; n < rule.size(); ++n) {
    const auto& node = rule[n];
    basis.traces(node.cos_theta, node.phi,
                 std::span<double>(row.data(), static_cast<std::size_t>(row.size())));
    values_.row(static_cast<Eigen::Index>(n)) = row.transpose();
    weights_[static_cast<Eigen::Index>(n)] = node.weight;
  }
}

double TraceTable::integrate_power(const Eigen::VectorXd& trace, double s) const {
  double sum = 0.0;
  for (Eigen::Index n = 0; n < trace.size(); ++n) {
    sum += weights_[n] * detail::abs_power(trace[n], s);
  }
  if (!std::isfinite(sum)) throw NumericalError("non-finite boundary integral");
  return sum;
}

Eigen::VectorXd TraceTable::project(const Eigen::VectorXd& nodal) const {
  return values_.transpose() * (weights_.array() * nodal.array()).matrix();
}

// --- Energy ---------------------------------------------------------------------

Energy::Energy(EnergyParams params, const SteklovBasis& basis, const QuadratureRule& rule)
    : params_(params), table_(basis, rule) {
  params_.validate();
}

HarmonicElement Energy::element(Eigen::VectorXd coeffs) const {
  if (coeffs.size() != size()) throw std::invalid_argument("coefficient size mismatch");
  return HarmonicElement(eigenvalues(), std::move(coeffs));
}

double Energy::value(const HarmonicElement& u) const {
  const Eigen::VectorXd trace = table_.evaluate(u.coeffs());
  const auto [lambda, mu, q, p] = powers();
  const double norm = u.gradient_norm();
  double result = 0.5 * norm * norm;
  if (lambda != 0.0) result -= lambda / q * table_.integrate_power(trace, q);
  if (mu != 0.0) result -= mu / p * table_.integrate_power(trace, p);
  if (!std::isfinite(result)) throw NumericalError("non-finite energy value");
  return result;
}

Eigen::VectorXd Energy::gradient(const HarmonicElement& u) const {
  const Eigen::VectorXd trace = table_.evaluate(u.coeffs());
  const auto [lambda, mu, q, p] = powers();
  Eigen::VectorXd nonlinear(trace.size());
  for (Eigen::Index n = 0; n < trace.size(); ++n) {
    const double t = trace[n];
    nonlinear[n] = lambda * detail::signed_power(t, q - 1.0) +
                   mu * detail::signed_power(t, p - 1.0);
  }
  Eigen::VectorXd g = (eigenvalues().array() * u.coeffs().array()).matrix() -
                      table_.project(nonlinear);
  if (!g.allFinite()) throw NumericalError("non-finite energy gradient");
  return g;
}

Eigen::MatrixXd Energy::hessian(const HarmonicElement& u, double regularization) const {
  if (!(regularization >= 0.0)) throw std::invalid_argument("regularization must be >= 0");
  const Eigen::VectorXd trace = table_.evaluate(u.coeffs());
  const auto [lambda, mu, q, p] = powers();
  const double eps2 = regularization * regularization;
  Eigen::VectorXd weight(trace.size());
  for (Eigen::Index n = 0; n < trace.size(); ++n) {
    const double m2 = trace[n] * trace[n] + eps2;
    if (m2 == 0.0 && lambda != 0.0) {
      throw NumericalError("singular Hessian integrand: zero trace at quadrature node " +
                           std::to_string(n) + " with q < 2 and no regularization");
    }
    double w = 0.0;
    if (lambda != 0.0) w += lambda * (q - 1.0) * std::pow(m2, 0.5 * (q - 2.0));
    if (mu != 0.0) w += mu * (p - 1.0) * std::pow(m2, 0.5 * (p - 2.0));
    weight[n] = table_.weights()[n] * w;
  }
  const Eigen::MatrixXd& b = table_.values();
  Eigen::MatrixXd h = -(b.transpose() * weight.asDiagonal() * b);
  h = 0.5 * (h + h.transpose()).eval();
  h.diagonal() += eigenvalues();
  if (!h.allFinite()) throw NumericalError("non-finite Hessian entry");
  return h;
}

double Energy::boundary_norm(const HarmonicElement& u, double s) const {
  const Eigen::VectorXd trace = table_.evaluate(u.coeffs());
  return std::pow(table_.integrate_power(trace, s), 1.0 / s);
}

PsIdentity Energy::ps_identity(const HarmonicElement& u, PsExponent exponent) const {
  const auto [lambda, mu, q, p] = powers();
  const double r = exponent == PsExponent::p ? p : q;
  const double derivative_along_u = gradient(u).dot(u.coeffs());

  const Eigen::VectorXd trace = table_.evaluate(u.coeffs());
  const double norm2 = u.gradient_norm() * u.gradient_norm();
  PsIdentity out;
  out.lhs = value(u) - derivative_along_u / r;
  if (exponent == PsExponent::p) {
    out.rhs = (0.5 - 1.0 / p) * norm2 -
              lambda * (1.0 / q - 1.0 / p) * table_.integrate_power(trace, q);
  } else {
    out.rhs = (0.5 - 1.0 / q) * norm2 -
              mu * (1.0 / p - 1.0 / q) * table_.integrate_power(trace, p);
  }
  return out;
}

// --- Embedding constants --------------------------------------------------------

namespace {

struct AscentOutcome {
  double value = 0.0;
  Eigen::VectorXd direction;  // whitened tail coordinates, unit length
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

// Normalized-gradient ascent of F(a) = sum_n w_n |(B_T D a)_n|^s on |a| = 1,
// where D = diag(delta_T)^{-1/2}. F is convex for s >= 1, so each step
// a <- grad F / |grad F| does not decrease F.
class TailAscent {
 public:
  TailAscent(const TraceTable& table, int tail_start, double s)
      : s_(s),
        scaled_(table.values().rightCols(table.size() - tail_start + 1)),
        weights_(table.weights()) {
    const Eigen::VectorXd delta = table.eigenvalues().tail(scaled_.cols());
    scaled_ = scaled_ * delta.cwiseSqrt().cwiseInverse().asDiagonal();
  }

  Eigen::Index dimension() const { return scaled_.cols(); }

  double objective(const Eigen::VectorXd& a, Eigen::VectorXd* grad) const {
    const Eigen::VectorXd u = scaled_ * a;
    double f = 0.0;
    Eigen::VectorXd kernel(u.size());
    for (Eigen::Index n = 0; n < u.size(); ++n) {
      f += weights_[n] * detail::abs_power(u[n], s_);
      kernel[n] = weights_[n] * detail::signed_power(u[n], s_ - 1.0);
    }
    if (grad) *grad = s_ * (scaled_.transpose() * kernel);
    return f;
  }

  AscentOutcome run(Eigen::VectorXd a, double tolerance, int max_iterations) const {
    AscentOutcome out;
    a.normalize();
    Eigen::VectorXd grad;
    double f = objective(a, &grad);
    out.value = f;
    out.direction = a;
    for (int it = 0; it < max_iterations; ++it) {
      const double gnorm = grad.norm();
      if (!(gnorm > 0.0)) {  // start in the null set of the trace
        out.residual = 0.0;
        return out;
      }
      const double radial = grad.dot(a);
      out.residual = (grad - radial * a).norm() / gnorm;
      if (out.residual <= tolerance) {
        out.converged = true;
        return out;
      }
      a = grad / gnorm;
      f = objective(a, &grad);
      ++out.iterations;
      if (f >= out.value) {
        out.value = f;
        out.direction = a;
      }
    }
    return out;
  }

  double ratio(double f) const { return std::pow(f, 1.0 / s_); }

 private:
  double s_;
  Eigen::MatrixXd scaled_;
  Eigen::VectorXd weights_;
};

}  // namespace

EmbeddingResult embedding_constant(const TraceTable& table, int tail_start, double exponent,
                                   const EmbeddingOptions& options,
                                   const std::vector<Eigen::VectorXd>& extra_starts) {
  const auto size = static_cast<int>(table.size());
  if (tail_start < 1 || tail_start > size) {
    throw std::invalid_argument("tail start k must satisfy 1 <= k <= K");
  }
  if (!(exponent >= 1.0)) throw std::invalid_argument("exponent must be >= 1");

  const TailAscent ascent(table, tail_start, exponent);
  const Eigen::Index dim = ascent.dimension();
  const Eigen::VectorXd sqrt_delta = table.eigenvalues().tail(dim).cwiseSqrt();

  std::vector<Eigen::VectorXd> starts;
  starts.push_back(Eigen::VectorXd::Unit(dim, 0));
  for (const auto& c : extra_starts) {
    if (c.size() != table.size()) throw std::invalid_argument("extra start has wrong size");
    Eigen::VectorXd a = (c.tail(dim).array() * sqrt_delta.array()).matrix();
    if (a.norm() > 0.0) starts.push_back(a);
  }
  std::mt19937_64 rng(detail::mix_seed(options.seed, static_cast<std::uint64_t>(tail_start),
                                       static_cast<std::uint64_t>(exponent * 1e6)));
  std::normal_distribution<double> normal;
  for (int i = 0; i < options.random_starts; ++i) {
    Eigen::VectorXd a(dim);
    for (Eigen::Index j = 0; j < dim; ++j) a[j] = normal(rng);
    starts.push_back(a);
  }

  EmbeddingResult result;
  AscentOutcome best;
  best.value = -1.0;
  for (const auto& start : starts) {
    AscentOutcome run = ascent.run(start, options.tolerance, options.max_iterations);
    result.iterations += run.iterations;
    if (run.value > best.value) best = std::move(run);
  }
  result.value = ascent.ratio(best.value);
  result.converged = best.converged;
  result.projected_gradient = best.residual;
  result.maximizer = Eigen::VectorXd::Zero(table.size());
  result.maximizer.tail(dim) = (best.direction.array() / sqrt_delta.array()).matrix();
  return result;
}

EmbeddingConstants compute_embedding_constants(const TraceTable& table, double q, double p,
                                               const EmbeddingOptions& options) {
  const auto size = static_cast<int>(table.size());
  EmbeddingConstants out;
  out.size = size;
  out.q = q;
  out.p = p;
  out.alpha.assign(static_cast<std::size_t>(size), 0.0);
  out.beta.assign(static_cast<std::size_t>(size), 0.0);
  out.l2.assign(static_cast<std::size_t>(size), 0.0);
  out.converged.assign(static_cast<std::size_t>(size), true);

  struct Column {
    double exponent;
    std::vector<double>* store;
    Eigen::VectorXd warm;
  };
  std::vector<Column> columns{{p, &out.alpha, {}}, {q, &out.beta, {}}, {2.0, &out.l2, {}}};
  for (int k = size; k >= 1; --k) {
    const auto idx = static_cast<std::size_t>(k - 1);
    for (auto& col : columns) {
      std::vector<Eigen::VectorXd> extra;
      if (col.warm.size() > 0) extra.push_back(col.warm);
      EmbeddingResult r = embedding_constant(table, k, col.exponent, options, extra);
      // The warm start certifies the larger tail's value; keep it exactly.
      if (k < size) r.value = std::max(r.value, (*col.store)[idx + 1]);
      (*col.store)[idx] = r.value;
      out.converged[idx] = out.converged[idx] && r.converged;
      col.warm = std::move(r.maximizer);
    }
  }
  return out;
}

double positive_branch_radius(double mu, double alpha_k, double p) {
  if (!(mu > 0.0)) throw std::domain_error("varrho_k is undefined for mu <= 0");
  if (!(alpha_k > 0.0)) throw std::domain_error("alpha_k must be positive");
  return std::pow(mu * std::pow(alpha_k, p), -1.0 / (p - 2.0));
}

double negative_branch_radius(double lambda, double beta_k, double q) {
  if (!(lambda > 0.0)) throw std::domain_error("dual rho_k is undefined for lambda <= 0");
  if (!(beta_k > 0.0)) throw std::domain_error("beta_k must be positive");
  return std::pow(4.0 * lambda * std::pow(beta_k, q) / q, 1.0 / (2.0 - q));
}

FountainRadii fountain_radii(int k, const EnergyParams& params,
                             const EmbeddingConstants& constants) {
  if (k < 1 || k > constants.size) throw std::invalid_argument("rung k out of range");
  const auto idx = static_cast<std::size_t>(k - 1);
  FountainRadii out;
  if (params.mu > 0.0) {
    out.varrho = positive_branch_radius(params.mu, constants.alpha[idx], params.p);
    out.rho = 2.0 * *out.varrho;
  }
  if (params.lambda > 0.0) {
    out.dual_rho = negative_branch_radius(params.lambda, constants.beta[idx], params.q);
    out.dual_varrho = 0.5 * *out.dual_rho;
  }
  return out;
}

}  // namespace exsteklov
