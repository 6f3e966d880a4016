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

#ifndef EXSTEKLOV_CRITICAL_POINT_HPP_
#define EXSTEKLOV_CRITICAL_POINT_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "exsteklov/energy.hpp"

namespace exsteklov {

enum class SignClass { negative, zero, positive };
enum class StartKind { y_ball, z_sphere, random, manufactured };

std::string_view to_string(SignClass sign);
std::string_view to_string(StartKind kind);

/// Energies with |phi| below this are classified as zero.
inline constexpr double kEnergyDeadBand = 1e-10;

[[nodiscard]] SignClass classify_energy(double energy);

/// A converged critical point of the discrete energy.
struct SolutionRecord {
  HarmonicElement element;
  double energy = 0.0;
  double gradient_norm = 0.0;
  SignClass sign = SignClass::zero;
  int rung = 0;  ///< ladder index k of the start; 0 when not from a ladder
  StartKind start = StartKind::random;
  double bvp_residual = 0.0;
  int iterations = 0;
};

struct SolverOptions {
  double tolerance = 1e-9;  ///< on the Euclidean norm of the coefficient gradient
  int max_iterations = 200;
  double armijo_factor = 0.5;
  double armijo_slope = 1e-4;
  double regularization = 1e-10;
  double divergence_bound = 1e6;  ///< abort when ||c|| exceeds this
};

enum class FailureReason { max_iterations, line_search_stall, diverged, numerical };

std::string_view to_string(FailureReason reason);

struct RefineFailure {
  Eigen::VectorXd last_iterate;
  FailureReason reason = FailureReason::max_iterations;
  double gradient_norm = 0.0;
  int iterations = 0;
  std::string message;
};

using RefineResult = std::variant<SolutionRecord, RefineFailure>;

/// Damped Newton on the discrete gradient with a regularized Hessian. When
/// the Newton step does not reduce the gradient norm, falls back to
/// Armijo-backtracked descent on the merit 1/2 ||grad phi||^2, so saddles
/// of phi are reachable.
[[nodiscard]] RefineResult refine(const Energy& energy, const Eigen::VectorXd& start,
                                  const SolverOptions& options = {}, int rung = 0,
                                  StartKind kind = StartKind::random);

/// Boundary L2 norm (by quadrature) of
/// sum_j delta_j c_j s_j - lambda |u|^{q-2} u - mu |u|^{p-2} u.
[[nodiscard]] double bvp_residual(const Energy& energy, const HarmonicElement& u);

/// Constant-trace solutions u = t/r: roots of t = lambda |t|^{q-2} t +
/// mu |t|^{p-2} t (delta_1 = 1), returned as +/- pairs on mode (0,0).
[[nodiscard]] std::vector<SolutionRecord> radial_solutions(const Energy& energy);

/// Two records coincide when min(||c - c'||, ||c + c'||) <= 1e-6 (1 + ||c||)
/// in the eigenvalue-weighted norm.
[[nodiscard]] bool same_solution(const Eigen::VectorXd& eigenvalues,
                                 const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Energies merged into levels when within 1e-7 relative.
[[nodiscard]] std::vector<double> distinct_levels(std::vector<double> energies);

struct ScanOptions {
  int starts_per_rung = 12;
  std::uint64_t seed = 7;
  int threads = 1;
  /// Extra starts per rung drawn as Gaussians in the whole truncated space.
  int random_starts_per_rung = 0;
  SolverOptions solver{};
  EmbeddingOptions embedding{};
};

struct StartFailure {
  int rung = 0;
  StartKind kind = StartKind::random;
  int index = 0;
  RefineFailure failure;
};

struct FountainRung {
  int k = 0;
  double alpha = 0.0;
  double beta = 0.0;
  FountainRadii radii;
  /// Indices into FountainLadder::solutions first found at this rung.
  std::vector<std::size_t> found;
  /// Indices of every solution a start at this rung converged to.
  std::vector<std::size_t> hits;
};

struct FountainLadder {
  int size = 0;  ///< truncation K
  EmbeddingConstants constants;
  std::vector<FountainRung> rungs;
  /// Deduplicated, in order of discovery.
  std::vector<SolutionRecord> solutions;
  std::vector<StartFailure> failures;
  int starts_attempted = 0;

  /// Sorted ascending, merged by distinct_levels.
  std::vector<double> distinct_energies(SignClass sign) const;
  /// Lowest energy of sign `sign` among solutions discovered at rung k.
  std::optional<double> best_energy_at(int k, SignClass sign) const;
};

/// Launches multistart refinements per rung k = 1..K: negative-branch starts
/// on the sphere of radius dual varrho_k in Y_k = span(modes 1..k) when
/// lambda > 0, positive-branch starts on the sphere of radius varrho_k in
/// Z_k = span(modes k..K) when mu > 0. The first start of each set lies on
/// mode k itself. Starts are seeded per (rung, branch, index), so results do
/// not depend on `threads`.
[[nodiscard]] FountainLadder fountain_scan(const Energy& energy, const ScanOptions& options);

/// One checked record of the norm bounds for critical points: positive
/// energy implies ||u|| >= {(1/q-1/2) / (mu c2^p (1/q-1/p))}^{1/(p-2)};
/// negative energy implies ||v|| <= (lambda c1^q (1/q-1/p)/(1/2-1/p))^{1/(2-q)}.
struct Prop31Entry {
  std::size_t record = 0;
  SignClass sign = SignClass::zero;
  double norm = 0.0;
  std::optional<double> bound;
  double margin = 0.0;  ///< >= 0 when the bound holds
  bool holds = false;
  /// Positive energy with mu <= 0, or negative energy with lambda <= 0.
  bool theory_violation = false;
};

struct Prop31Report {
  std::vector<Prop31Entry> entries;
  std::vector<std::string> notes;

  bool all_hold() const;
  int violations() const;
};

[[nodiscard]] Prop31Report check_prop31(const std::vector<SolutionRecord>& records,
                                        const EnergyParams& params,
                                        const EmbeddingConstants& constants);

}  // namespace exsteklov

#endif  // EXSTEKLOV_CRITICAL_POINT_HPP_
