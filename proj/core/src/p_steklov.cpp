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

#include "exsteklov/p_steklov.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "exsteklov/errors.hpp"
#include "internal/pow_kernels.hpp"

namespace exsteklov {

// --- RadialMesh -------------------------------------------------------------

RadialMesh::RadialMesh(std::vector<double> nodes, int dimension, double grading)
    : nodes_(std::move(nodes)), dimension_(dimension), grading_(grading) {}

RadialMesh RadialMesh::geometric(double radius, int cells, double grading, int dimension) {
  if (!(radius > 1.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("truncation radius must satisfy R > 1");
  }
  if (cells < 1) throw std::invalid_argument("mesh needs at least one cell");
  if (!(grading > 0.0)) throw std::invalid_argument("mesh grading must be positive");
  if (dimension < 2) throw std::invalid_argument("dimension must be >= 2");

  std::vector<double> widths(static_cast<std::size_t>(cells));
  double w = 1.0, total = 0.0;
  for (auto& h : widths) {
    h = w;
    total += w;
    w *= grading;
  }
  const double h0 = (radius - 1.0) / total;
  if (!(h0 > 1e-14)) {
    throw std::invalid_argument("mesh grading too strong: first cell width " +
                                std::to_string(h0) + " underflows");
  }
  std::vector<double> nodes(static_cast<std::size_t>(cells) + 1);
  nodes[0] = 1.0;
  for (std::size_t i = 0; i < widths.size(); ++i) nodes[i + 1] = nodes[i] + h0 * widths[i];
  nodes.back() = radius;
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) throw std::invalid_argument("degenerate mesh cell");
  }
  return RadialMesh(std::move(nodes), dimension, grading);
}

RadialMesh RadialMesh::from_nodes(std::vector<double> nodes, int dimension) {
  if (nodes.size() < 2) throw std::invalid_argument("mesh needs at least two nodes");
  if (nodes.front() != 1.0) throw std::invalid_argument("first mesh node must be 1");
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    if (!(nodes[i] > nodes[i - 1])) {
      throw std::invalid_argument("mesh nodes must be strictly increasing");
    }
  }
  if (dimension < 2) throw std::invalid_argument("dimension must be >= 2");
  return RadialMesh(std::move(nodes), dimension, 0.0);
}

RadialMesh RadialMesh::bisected() const {
  std::vector<double> fine;
  fine.reserve(2 * nodes_.size() - 1);
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    fine.push_back(nodes_[i]);
    fine.push_back(0.5 * (nodes_[i] + nodes_[i + 1]));
  }
  fine.push_back(nodes_.back());
  return RadialMesh(std::move(fine), dimension_, std::sqrt(grading_));
}

double RadialMesh::width(int cell) const {
  const auto i = static_cast<std::size_t>(cell);
  return nodes_[i + 1] - nodes_[i];
}

double RadialMesh::weight(int cell) const {
  const auto i = static_cast<std::size_t>(cell);
  const double a = nodes_[i], b = nodes_[i + 1];
  // (b^N - a^N) / N without cancellation: sum of a^j b^{N-1-j}, times h / N.
  double sum = 0.0, ak = 1.0;
  for (int j = 0; j < dimension_; ++j) {
    sum += ak * std::pow(b, dimension_ - 1 - j);
    ak *= a;
  }
  return (b - a) * sum / dimension_;
}

double unit_sphere_area(int dimension) {
  if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
  const double half = 0.5 * dimension;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double RadialFunction::slope(const RadialMesh& mesh, int cell) const {
  const auto i = static_cast<Eigen::Index>(cell);
  const double right = i + 1 < values.size() ? values[i + 1] : 0.0;
  return (right - values[i]) / mesh.width(cell);
}

// --- PSteklovProblem --------------------------------------------------------

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Tridiagonal stiffness of c * int a' b' r^{N-1} + m * int a b r^{N-3} on the
// hats of nodes 0..n-1 (the hat at R is dropped).
SparseMatrix radial_stiffness(const RadialMesh& mesh, double mass_coeff) {
  const int n = mesh.cells();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(3 * n));
  // 3-point Gauss on [0, 1].
  constexpr double kG = 0.7745966692414834;
  const double gx[3] = {0.5 * (1.0 - kG), 0.5, 0.5 * (1.0 + kG)};
  const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  const int power = mesh.dimension() - 3;
  for (int i = 0; i < n; ++i) {
    const double h = mesh.width(i);
    const double stiff = mesh.weight(i) / (h * h);
    double maa = 0.0, mab = 0.0, mbb = 0.0;
    if (mass_coeff != 0.0) {
      const double r0 = mesh.nodes()[static_cast<std::size_t>(i)];
      for (int g = 0; g < 3; ++g) {
        const double w = gw[g] * h * std::pow(r0 + gx[g] * h, power);
        maa += w * (1.0 - gx[g]) * (1.0 - gx[g]);
        mab += w * (1.0 - gx[g]) * gx[g];
        mbb += w * gx[g] * gx[g];
      }
    }
    entries.emplace_back(i, i, stiff + mass_coeff * maa);
    if (i + 1 < n) {
      entries.emplace_back(i + 1, i + 1, stiff + mass_coeff * mbb);
      entries.emplace_back(i, i + 1, -stiff + mass_coeff * mab);
      entries.emplace_back(i + 1, i, -stiff + mass_coeff * mab);
    }
  }
  SparseMatrix k(n, n);
  k.setFromTriplets(entries.begin(), entries.end());
  return k;
}

// |a + d|^p - |a|^p without cancellation for small d.
double power_increment(double a, double d, double p) {
  if (a == 0.0) return detail::abs_power(d, p);
  const double x = d / a;
  if (x > -0.5) return detail::abs_power(a, p) * std::expm1(p * std::log1p(x));
  return detail::abs_power(a + d, p) - detail::abs_power(a, p);
}

}  // namespace

struct PSteklovProblem::Factor {
  SparseMatrix stiffness;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

PSteklovProblem::PSteklovProblem(double p, RadialMesh mesh)
    : p_(p), mesh_(std::move(mesh)), omega_(unit_sphere_area(mesh_.dimension())) {
  if (!(p > 1.0 && p < mesh_.dimension())) {
    throw std::invalid_argument("p: must satisfy 1 < p < N = " +
                                std::to_string(mesh_.dimension()));
  }
  const int n = mesh_.cells();
  widths_.resize(static_cast<std::size_t>(n));
  weights_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    widths_[static_cast<std::size_t>(i)] = mesh_.width(i);
    weights_[static_cast<std::size_t>(i)] = mesh_.weight(i);
  }
  factor_ = std::make_unique<Factor>();
  factor_->stiffness = radial_stiffness(mesh_, 0.0);
  factor_->ldlt.compute(factor_->stiffness);
  if (factor_->ldlt.info() != Eigen::Success) {
    throw NumericalError("radial stiffness factorization failed");
  }
}

PSteklovProblem::~PSteklovProblem() = default;
PSteklovProblem::PSteklovProblem(PSteklovProblem&&) noexcept = default;
PSteklovProblem& PSteklovProblem::operator=(PSteklovProblem&&) noexcept = default;

RadialFunction PSteklovProblem::interpolate(const std::function<double(double)>& f) const {
  RadialFunction v{Eigen::VectorXd(unknowns())};
  for (Eigen::Index i = 0; i < v.values.size(); ++i) {
    v.values[i] = f(mesh_.nodes()[static_cast<std::size_t>(i)]);
  }
  return v;
}

PhiPsi PSteklovProblem::phi_psi(const RadialFunction& v) const {
  if (v.values.size() != unknowns()) throw std::invalid_argument("radial function size mismatch");
  PhiPsi out;
  out.phi = omega_ / p_ * detail::abs_power(v.at_boundary(), p_);
  double sum = 0.0;
  for (int i = 0; i < mesh_.cells(); ++i) {
    sum += detail::abs_power(v.slope(mesh_, i), p_) * weights_[static_cast<std::size_t>(i)];
  }
  out.psi = omega_ / p_ * sum;
  return out;
}

double PSteklovProblem::gradient_norm(const RadialFunction& v) const {
  return std::pow(p_ * phi_psi(v).psi, 1.0 / p_);
}

RadialFunction PSteklovProblem::normalized(const RadialFunction& v) const {
  const double norm = gradient_norm(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NumericalError("cannot normalize a radial function with zero gradient norm");
  }
  return RadialFunction{v.values / norm};
}

Eigen::VectorXd PSteklovProblem::phi_derivative(const RadialFunction& v) const {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(unknowns());
  d[0] = omega_ * detail::signed_power(v.at_boundary(), p_ - 1.0);
  return d;
}

Eigen::VectorXd PSteklovProblem::psi_derivative(const RadialFunction& v) const {
  const int n = mesh_.cells();
  Eigen::VectorXd d = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(i);
    const double flux =
        omega_ * detail::signed_power(v.slope(mesh_, i), p_ - 1.0) * weights_[c] / widths_[c];
    d[i] -= flux;
    if (i + 1 < n) d[i + 1] += flux;
  }
  return d;
}

Eigen::VectorXd PSteklovProblem::duality_functional(const RadialFunction& v) const {
  const double phi = phi_psi(v).phi;
  return phi_derivative(v) - p_ * phi * psi_derivative(v);
}

RadialFunction PSteklovProblem::duality_element(const RadialFunction& v) const {
  RadialFunction u{factor_->ldlt.solve(duality_functional(v))};
  if (!u.values.allFinite()) throw NumericalError("duality element solve produced non-finite values");
  return u;
}

double PSteklovProblem::duality_pairing(const RadialFunction& v, const RadialFunction& w) const {
  return duality_functional(v).dot(w.values);
}

double PSteklovProblem::inner(const RadialFunction& a, const RadialFunction& b) const {
  return a.values.dot(factor_->stiffness * b.values);
}

double PSteklovProblem::dual_norm(const Eigen::VectorXd& functional) const {
  const Eigen::VectorXd rep = factor_->ldlt.solve(functional);
  return std::sqrt(std::max(0.0, functional.dot(rep)));
}

std::optional<RadialFunction> PSteklovProblem::flow_step(const RadialFunction& v,
                                                          double t) const {
  if (t == 0.0) return v;
  return flow_step(v, duality_element(v), t);
}

std::optional<RadialFunction> PSteklovProblem::flow_step(const RadialFunction& v,
                                                          const RadialFunction& u_b,
                                                          double t) const {
  if (t == 0.0) return v;
  RadialFunction w{v.values + t * u_b.values};
  const double norm = gradient_norm(w);
  if (!(norm >= 1e-14) || !std::isfinite(norm)) return std::nullopt;
  w.values /= norm;
  return w;
}

double PSteklovProblem::weak_form_residual(const RadialFunction& v) const {
  const double phi = phi_psi(v).phi;
  if (!(phi > 0.0)) throw NumericalError("weak-form residual needs phi(v) > 0");
  const double delta = 1.0 / (p_ * phi);
  return dual_norm(psi_derivative(v) - delta * phi_derivative(v));
}

// --- Ascent flow ------------------------------------------------------------

namespace {

// log(phi(H(v, t)) / phi(v)), evaluated from increments so that gains far
// below the rounding level of phi keep their sign.
double log_phi_gain(const PSteklovProblem& problem, const RadialFunction& v,
                    const RadialFunction& u, double t) {
  const double p = problem.p();
  const RadialMesh& mesh = problem.mesh();
  const double v0 = v.at_boundary();
  const double boundary = p * std::log1p(t * u.at_boundary() / v0);
  double base = 0.0, increment = 0.0;
  for (int i = 0; i < mesh.cells(); ++i) {
    const double w = problem.cell_weights()[static_cast<std::size_t>(i)];
    const double s = v.slope(mesh, i);
    base += w * detail::abs_power(s, p);
    increment += w * power_increment(s, t * u.slope(mesh, i), p);
  }
  return boundary - std::log1p(increment / base);
}

}  // namespace

PSteklovResult first_eigenpair(const PSteklovProblem& problem, const FlowOptions& options,
                               std::optional<RadialFunction> start) {
  if (!(options.tolerance > 0.0)) throw std::invalid_argument("flow tolerance must be > 0");
  if (options.max_steps < 0) throw std::invalid_argument("flow max steps must be >= 0");
  const RadialMesh& mesh = problem.mesh();
  const double radius = mesh.radius();

  RadialFunction v = start ? *start
                           : problem.interpolate([radius](double r) { return (radius - r) / (radius - 1.0); });
  if (v.at_boundary() < 0.0) v.values = -v.values;
  v = problem.normalized(v);
  if (v.at_boundary() == 0.0) throw NumericalError("flow start vanishes on the boundary");

  PSteklovResult result;
  result.p = problem.p();
  result.dimension = mesh.dimension();
  result.radius = radius;
  result.cells = mesh.cells();

  double phi = problem.phi_psi(v).phi;
  double t = options.initial_step;
  int streak = 0;
  if (options.record_history) result.history.push_back({0.0, phi});

  RadialFunction u = problem.duality_element(v);
  double unorm = std::sqrt(std::max(0.0, problem.inner(u, u)));
  while (true) {
    if (unorm <= options.tolerance) {
      result.converged = true;
      break;
    }
    if (result.iterations >= options.max_steps) {
      result.message = "flow did not converge within " + std::to_string(options.max_steps) +
                       " steps (||u_B|| = " + std::to_string(unorm) + ")";
      break;
    }
    bool accepted = false;
    while (t >= options.min_step) {
      auto w = problem.flow_step(v, u, t);
      if (w && log_phi_gain(problem, v, u, t) >= 0.0) {
        v = std::move(*w);
        accepted = true;
        break;
      }
      t *= 0.5;
      streak = 0;
    }
    if (!accepted) {
      result.message = "step size fell below the floor (||u_B|| = " + std::to_string(unorm) + ")";
      break;
    }
    ++result.iterations;
    phi = problem.phi_psi(v).phi;
    if (options.record_history) result.history.push_back({t, phi});
    if (++streak >= options.growth_after) {
      t *= 2.0;
      streak = 0;
    }
    u = problem.duality_element(v);
    unorm = std::sqrt(std::max(0.0, problem.inner(u, u)));
  }

  result.kappa = problem.phi_psi(v).phi;
  result.delta = 1.0 / (problem.p() * result.kappa);
  result.duality_norm = unorm;
  result.weak_residual = problem.weak_form_residual(v);
  result.eigenfunction = std::move(v);
  return result;
}

// --- p = 2 spectrum and closed forms -------------------------------------------

std::vector<ModeEigenvalue> p2_mode_spectrum(int lmax, const RadialMesh& mesh) {
  if (lmax < 0) throw std::invalid_argument("lmax must be >= 0");
  std::vector<ModeEigenvalue> out;
  const int n = mesh.cells();
  const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(n, 0);
  for (int l = 0; l <= lmax; ++l) {
    const double coeff = static_cast<double>(l) * (l + mesh.dimension() - 2);
    const SparseMatrix a = radial_stiffness(mesh, coeff);
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
    if (ldlt.info() != Eigen::Success) {
      throw NumericalError("mode " + std::to_string(l) + ": stiffness factorization failed");
    }
    const double g00 = ldlt.solve(e0)[0];
    if (!(g00 > 0.0) || !std::isfinite(g00)) {
      throw NumericalError("mode " + std::to_string(l) + ": eigensolve failed");
    }
    out.push_back({l, 1.0 / g00});
  }
  return out;
}

double truncated_first_delta(double p, int dimension, double radius) {
  const double a = (dimension - 1.0) / (p - 1.0);
  return std::pow((a - 1.0) / (1.0 - std::pow(radius, 1.0 - a)), p - 1.0);
}

double exterior_first_delta(double p, int dimension) {
  return std::pow((dimension - p) / (p - 1.0), p - 1.0);
}

double truncated_mode_delta(int degree, double radius) {
  const double tail = std::pow(radius, -(2.0 * degree + 1.0));
  return ((degree + 1.0) + degree * tail) / (1.0 - tail);
}

Extrapolation extrapolate_delta(double p, int dimension, const std::vector<double>& radii,
                                const std::vector<double>& deltas) {
  if (radii.size() != deltas.size() || radii.size() < 2) {
    throw std::invalid_argument("extrapolation needs at least two (R, delta) pairs");
  }
  if (!(p > 1.0 && p < dimension)) throw std::invalid_argument("p: must satisfy 1 < p < N");
  const double a = (dimension - 1.0) / (p - 1.0);
  const auto m = static_cast<Eigen::Index>(radii.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (!(radii[k] > 1.0) || !(deltas[k] > 0.0)) {
      throw std::invalid_argument("extrapolation needs R > 1 and delta > 0");
    }
    design(i, 0) = 1.0;
    design(i, 1) = std::pow(radii[k], 1.0 - a);
    y[i] = std::pow(deltas[k], -1.0 / (p - 1.0));
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(y);
  Extrapolation out;
  out.intercept = coef[0];
  out.slope = coef[1];
  out.residual = std::sqrt((design * coef - y).squaredNorm() / static_cast<double>(m));
  if (!(out.intercept > 0.0)) throw NumericalError("extrapolated intercept is not positive");
  out.delta = std::pow(out.intercept, -(p - 1.0));
  return out;
}

}  // namespace exsteklov
