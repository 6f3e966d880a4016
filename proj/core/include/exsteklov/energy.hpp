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

#ifndef EXSTEKLOV_ENERGY_HPP_
#define EXSTEKLOV_ENERGY_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "exsteklov/sphere_quadrature.hpp"
#include "exsteklov/steklov_basis.hpp"

namespace exsteklov {

/// Coefficients (lambda, mu, q, p) of the boundary nonlinearity
/// lambda |u|^{q-2} u + mu |u|^{p-2} u, plus the space dimension.
struct EnergyParams {
  double lambda = 1.0;
  double mu = 1.0;
  double q = 1.5;
  double p = 3.0;
  int dimension = 3;
  /// Accept p at or above the trace-critical exponent 2(N-1)/(N-2).
  bool allow_supercritical = false;

  /// 2(N-1)/(N-2).
  double trace_critical_exponent() const;

  /// Throws std::invalid_argument naming the offending field. Returns a
  /// warning string when allow_supercritical lets an out-of-range p through.
  std::optional<std::string> validate() const;
};

/// u = sum_j c_j s_j in H(U), with the cached gradient norm
/// ||u||_grad = (sum_j delta_j c_j^2)^{1/2}.
class HarmonicElement {
 public:
  HarmonicElement(const Eigen::VectorXd& eigenvalues, Eigen::VectorXd coeffs);
  HarmonicElement(const SteklovBasis& basis, Eigen::VectorXd coeffs)
      : HarmonicElement(basis.eigenvalues(), std::move(coeffs)) {}

  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  double gradient_norm() const { return norm_; }
  Eigen::Index size() const { return coeffs_.size(); }

 private:
  Eigen::VectorXd coeffs_;
  double norm_;
};

/// ||c||_grad for eigenvalue weights delta.
[[nodiscard]] double weighted_norm(const Eigen::VectorXd& eigenvalues,
                                   const Eigen::VectorXd& coeffs);

/// Basis traces tabulated on a quadrature rule. Row n holds s_j(x_n).
class TraceTable {
 public:
  TraceTable(const SteklovBasis& basis, const QuadratureRule& rule);

  Eigen::Index size() const { return values_.cols(); }
  Eigen::Index node_count() const { return values_.rows(); }
  const Eigen::MatrixXd& values() const { return values_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  double min_weight() const { return weights_.minCoeff(); }

  /// Trace values u(x_n).
  Eigen::VectorXd evaluate(const Eigen::VectorXd& coeffs) const { return values_ * coeffs; }
  /// sum_n w_n |u_n|^s for precomputed trace values.
  double integrate_power(const Eigen::VectorXd& trace, double s) const;
  /// sum_n w_n f_n s_j(x_n), the projection of a nodal field onto the basis.
  Eigen::VectorXd project(const Eigen::VectorXd& nodal) const;

 private:
  Eigen::MatrixXd values_;
  Eigen::VectorXd weights_;
  Eigen::VectorXd eigenvalues_;
};

/// The two sides of the Palais-Smale identity for exponent r in {p, q}.
struct PsIdentity {
  double lhs = 0.0;  ///< phi(u) - phi'(u)(u) / r
  double rhs = 0.0;  ///< closed combination of ||u||^2 and one boundary term
};

enum class PsExponent { p, q };

/// phi(u) = 1/2 ||u||_grad^2 - lambda/q int |u|^q - mu/p int |u|^p, with the
/// boundary integrals evaluated by quadrature in coefficient space.
class Energy {
 public:
  Energy(EnergyParams params, const SteklovBasis& basis, const QuadratureRule& rule);

  const EnergyParams& params() const { return params_; }
  const TraceTable& table() const { return table_; }
  const Eigen::VectorXd& eigenvalues() const { return table_.eigenvalues(); }
  Eigen::Index size() const { return table_.size(); }

  HarmonicElement element(Eigen::VectorXd coeffs) const;

  double value(const HarmonicElement& u) const;
  /// delta_j c_j - lambda int |u|^{q-2} u s_j - mu int |u|^{p-2} u s_j.
  Eigen::VectorXd gradient(const HarmonicElement& u) const;
  /// Second derivative with |u| replaced by (u^2 + eps^2)^{1/2} in the
  /// power weights. eps = 0 with q < 2 throws NumericalError at zero nodes.
  Eigen::MatrixXd hessian(const HarmonicElement& u, double regularization = 1e-10) const;

  /// ||u||_{s, boundary} = (int |u|^s)^{1/s}.
  double boundary_norm(const HarmonicElement& u, double s) const;

  PsIdentity ps_identity(const HarmonicElement& u, PsExponent exponent) const;

 private:
  struct Powers {
    double lambda, mu, q, p;
  };
  Powers powers() const { return {params_.lambda, params_.mu, params_.q, params_.p}; }

  EnergyParams params_;
  TraceTable table_;
};

// --- Embedding constants -----------------------------------------------------

struct EmbeddingOptions {
  int random_starts = 8;
  double tolerance = 1e-10;  ///< relative projected-gradient norm
  int max_iterations = 20000;
  std::uint64_t seed = 0x5eed;
};

struct EmbeddingResult {
  double value = 0.0;          ///< best ||u||_s / ||u||_grad found
  Eigen::VectorXd maximizer;   ///< coefficients, unit gradient norm
  bool converged = false;      ///< best start met the tolerance
  int iterations = 0;          ///< total over all starts
  double projected_gradient = 0.0;
};

/// Maximizes ||u||_{s, boundary} / ||u||_grad over span(modes k..K) by
/// normalized-gradient ascent on the unit gradient-norm sphere, with
/// multistart. `tail_start` is 1-based. Extra starts (e.g. the maximizer of
/// a smaller tail) are projected onto the tail and included.
[[nodiscard]] EmbeddingResult embedding_constant(
    const TraceTable& table, int tail_start, double exponent,
    const EmbeddingOptions& options = {},
    const std::vector<Eigen::VectorXd>& extra_starts = {});

/// Discrete trace constants on a truncated space. Index i holds rung k = i+1.
struct EmbeddingConstants {
  int size = 0;               ///< truncation K
  double q = 0.0;
  double p = 0.0;
  std::vector<double> alpha;  ///< sup over span(modes k..K) of ||u||_p / ||u||
  std::vector<double> beta;   ///< same for q
  std::vector<double> l2;     ///< same for exponent 2 (equals delta_k^{-1/2})
  std::vector<bool> converged;

  double c1() const { return beta.front(); }
  double c2() const { return alpha.front(); }
};

/// Computes alpha_k, beta_k and the exponent-2 column for all k by descending
/// k and warm-starting each rung from the next-smaller tail, so every column
/// is nonincreasing by construction.
[[nodiscard]] EmbeddingConstants compute_embedding_constants(
    const TraceTable& table, double q, double p, const EmbeddingOptions& options = {});

/// varrho_k = (mu alpha_k^p)^{-1/(p-2)}. Throws std::domain_error for mu <= 0.
[[nodiscard]] double positive_branch_radius(double mu, double alpha_k, double p);
/// dual rho_k = (4 lambda beta_k^q / q)^{1/(2-q)}. Throws std::domain_error
/// for lambda <= 0.
[[nodiscard]] double negative_branch_radius(double lambda, double beta_k, double q);

/// Fountain radii for one rung. Radii whose branch is disabled (mu <= 0 for
/// rho/varrho, lambda <= 0 for the duals) are empty.
struct FountainRadii {
  std::optional<double> rho;          ///< 2 varrho
  std::optional<double> varrho;
  std::optional<double> dual_rho;
  std::optional<double> dual_varrho;  ///< dual_rho / 2
};

/// `k` is 1-based.
[[nodiscard]] FountainRadii fountain_radii(int k, const EnergyParams& params,
                                           const EmbeddingConstants& constants);

}  // namespace exsteklov

#endif  // EXSTEKLOV_ENERGY_HPP_
