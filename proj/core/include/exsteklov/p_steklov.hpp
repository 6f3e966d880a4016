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

#ifndef EXSTEKLOV_P_STEKLOV_HPP_
#define EXSTEKLOV_P_STEKLOV_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace exsteklov {

inline constexpr double kDefaultMeshGrading = 1.012;
inline constexpr int kDefaultMeshCells = 400;

/// Nodes 1 = r_0 < ... < r_n = R of the truncated radial domain.
class RadialMesh {
 public:
  /// Cell widths h_{i+1} = grading * h_i. grading = 1 gives a uniform mesh.
  static RadialMesh geometric(double radius, int cells, double grading = kDefaultMeshGrading,
                              int dimension = 3);
  /// Arbitrary strictly increasing nodes from 1 to R.
  static RadialMesh from_nodes(std::vector<double> nodes, int dimension = 3);

  /// Every cell split at its midpoint.
  RadialMesh bisected() const;

  const std::vector<double>& nodes() const { return nodes_; }
  int cells() const { return static_cast<int>(nodes_.size()) - 1; }
  double radius() const { return nodes_.back(); }
  int dimension() const { return dimension_; }
  double grading() const { return grading_; }
  double width(int cell) const;
  /// int_{cell} r^{N-1} dr, evaluated exactly.
  double weight(int cell) const;

 private:
  RadialMesh(std::vector<double> nodes, int dimension, double grading);

  std::vector<double> nodes_;
  int dimension_;
  double grading_;
};

/// Surface measure of the unit sphere in R^N, 2 pi^{N/2} / Gamma(N/2).
[[nodiscard]] double unit_sphere_area(int dimension);

/// Piecewise-linear radial profile. values[i] sits at r_i for i < n; v(R) = 0.
struct RadialFunction {
  Eigen::VectorXd values;

  double at_boundary() const { return values[0]; }
  /// Slope on cell i.
  double slope(const RadialMesh& mesh, int cell) const;
};

struct PhiPsi {
  double phi = 0.0;  ///< (1/p) int_{|x|=1} |v|^p
  double psi = 0.0;  ///< (1/p) int_{1<|x|<R} |grad v|^p
};

/// Radial reduction of the p-Steklov eigenproblem on 1 < |x| < R with the
/// weighted H1 inner product <a, b> = int a' b' r^{N-1} dr on the unknowns.
class PSteklovProblem {
 public:
  /// Throws std::invalid_argument unless 1 < p < N.
  PSteklovProblem(double p, RadialMesh mesh);
  ~PSteklovProblem();
  PSteklovProblem(PSteklovProblem&&) noexcept;
  PSteklovProblem& operator=(PSteklovProblem&&) noexcept;

  double p() const { return p_; }
  const RadialMesh& mesh() const { return mesh_; }
  Eigen::Index unknowns() const { return mesh_.cells(); }
  const std::vector<double>& cell_weights() const { return weights_; }

  RadialFunction interpolate(const std::function<double(double)>& f) const;

  PhiPsi phi_psi(const RadialFunction& v) const;
  /// (p psi(v))^{1/p}.
  double gradient_norm(const RadialFunction& v) const;
  /// v scaled to unit gradient norm. Throws NumericalError for v = 0.
  RadialFunction normalized(const RadialFunction& v) const;

  /// phi'(v)(w) and psi'(v)(w) for every hat function w.
  Eigen::VectorXd phi_derivative(const RadialFunction& v) const;
  Eigen::VectorXd psi_derivative(const RadialFunction& v) const;
  /// B_v(w) = phi'(v)(w) - p phi(v) psi'(v)(w), tabulated on hat functions.
  Eigen::VectorXd duality_functional(const RadialFunction& v) const;
  /// Representer u_B of B_v in the weighted H1 inner product.
  RadialFunction duality_element(const RadialFunction& v) const;
  double duality_pairing(const RadialFunction& v, const RadialFunction& w) const;
  double inner(const RadialFunction& a, const RadialFunction& b) const;
  /// ||f||_* = (f^T K^{-1} f)^{1/2} for a functional tabulated on hats.
  double dual_norm(const Eigen::VectorXd& functional) const;

  /// (v + t u_B) / ||v + t u_B||; empty when the norm falls below 1e-14.
  std::optional<RadialFunction> flow_step(const RadialFunction& v, double t) const;
  std::optional<RadialFunction> flow_step(const RadialFunction& v, const RadialFunction& u_b,
                                          double t) const;

  /// ||psi'(v) - delta phi'(v)||_* with delta = 1 / (p phi(v)).
  double weak_form_residual(const RadialFunction& v) const;

 private:
  double p_;
  RadialMesh mesh_;
  double omega_;
  std::vector<double> widths_;
  std::vector<double> weights_;
  struct Factor;
  std::unique_ptr<Factor> factor_;
};

struct FlowOptions {
  double tolerance = 1e-10;  ///< on ||u_B||
  int max_steps = 20000;
  double initial_step = 0.1;
  double min_step = 1e-12;
  int growth_after = 3;  ///< consecutive accepts before the step doubles
  bool record_history = true;
};

struct FlowSample {
  double t = 0.0;
  double phi = 0.0;
};

struct PSteklovResult {
  double p = 0.0;
  int dimension = 3;
  double kappa = 0.0;
  double delta = 0.0;  ///< 1 / (p kappa)
  RadialFunction eigenfunction;
  double radius = 0.0;
  int cells = 0;
  int iterations = 0;
  bool converged = false;
  double duality_norm = 0.0;  ///< ||u_B|| at the returned iterate
  double weak_residual = 0.0;
  std::vector<FlowSample> history;
  std::string message;
};

/// Ascends phi on the unit gradient-norm sphere with the normalized flow,
/// halving rejected steps and doubling after `growth_after` accepts.
/// Non-convergence is reported through `converged` and `message`.
[[nodiscard]] PSteklovResult first_eigenpair(const PSteklovProblem& problem,
                                             const FlowOptions& options = {},
                                             std::optional<RadialFunction> start = std::nullopt);

struct ModeEigenvalue {
  int degree = 0;
  double delta = 0.0;
};

/// Smallest Steklov eigenvalue of each degree l <= lmax for p = 2, from the
/// per-mode radial stiffness with a rank-one boundary mass at r = 1.
[[nodiscard]] std::vector<ModeEigenvalue> p2_mode_spectrum(int lmax, const RadialMesh& mesh);

/// Closed forms on the truncated ball shell 1 < r < R.
[[nodiscard]] double truncated_first_delta(double p, int dimension, double radius);
[[nodiscard]] double exterior_first_delta(double p, int dimension);
[[nodiscard]] double truncated_mode_delta(int degree, double radius);  // N = 3, p = 2

struct Extrapolation {
  double delta = 0.0;      ///< estimate at R = infinity
  double intercept = 0.0;  ///< y at x = 0
  double slope = 0.0;
  double residual = 0.0;   ///< rms misfit of the affine fit in y
};

/// Fits y = delta^{-1/(p-1)} as affine in x = R^{1-a}, a = (N-1)/(p-1), by
/// least squares and returns delta at x = 0. Needs at least two radii.
[[nodiscard]] Extrapolation extrapolate_delta(double p, int dimension,
                                              const std::vector<double>& radii,
                                              const std::vector<double>& deltas);

}  // namespace exsteklov

#endif  // EXSTEKLOV_P_STEKLOV_HPP_
