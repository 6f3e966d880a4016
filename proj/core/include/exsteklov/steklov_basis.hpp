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

#ifndef EXSTEKLOV_STEKLOV_BASIS_HPP_
#define EXSTEKLOV_STEKLOV_BASIS_HPP_

#include <span>
#include <vector>

#include <Eigen/Core>

namespace exsteklov {

using Point3 = Eigen::Vector3d;

/// Degree/order label of one exterior Steklov eigenfunction. `flat` is the
/// 1-based position in the nondecreasing-eigenvalue enumeration.
struct ModeIndex {
  int degree = 0;
  int order = 0;
  int flat = 1;

  friend bool operator==(const ModeIndex&, const ModeIndex&) = default;
};

/// Harmonic Steklov eigenvalue of degree `degree` on the exterior of the unit
/// ball in R^dimension. The decaying harmonic r^{-(l+N-2)} Y_l has inward
/// normal derivative (l+N-2) Y_l at r = 1. Throws for dimension < 3.
[[nodiscard]] int eigenvalue_exact(int degree, int dimension);
[[nodiscard]] double eigenvalue(int degree, int dimension);

/// Number of real spherical harmonics of degree `degree` on S^2.
/// Only dimension 3 is supported.
[[nodiscard]] int multiplicity(int degree, int dimension = 3);

/// Flat index of (l, m) in the enumeration l = 0, 1, ...; m = -l..l.
[[nodiscard]] int flat_index(int degree, int order);
[[nodiscard]] ModeIndex mode_from_flat(int flat);

/// Radial factor r^{-(l+N-2)} of the decaying exterior harmonic, any N >= 3.
[[nodiscard]] double radial_factor(int degree, int dimension, double r);

/// Real spherical harmonic with unit L2 norm on the unit sphere.
/// Throws std::invalid_argument unless |point| = 1 within 1e-12.
[[nodiscard]] double boundary_trace(const ModeIndex& mode, const Point3& point);

/// Decaying harmonic extension r^{-(l+1)} Y_lm(x/r) (N = 3).
/// Throws std::invalid_argument for |point| < 1.
[[nodiscard]] double exterior_value(const ModeIndex& mode, const Point3& point);

/// Evaluates every real spherical harmonic up to `max_degree` at the
/// direction (cos_theta, phi). `out` must hold (max_degree+1)^2 entries and
/// is filled in flat order.
void real_spherical_harmonics(int max_degree, double cos_theta, double phi,
                              std::span<double> out);

/// The first `size()` exterior Steklov eigenpairs of the unit ball (N = 3),
/// with boundary-orthonormal traces. Immutable after construction.
class SteklovBasis {
 public:
  /// All modes of degree <= max_degree.
  SteklovBasis(int dimension, int max_degree);

  /// The first `count` modes; max_degree is the smallest degree covering them.
  static SteklovBasis with_mode_count(int dimension, int count);

  int dimension() const { return dimension_; }
  int max_degree() const { return max_degree_; }
  int size() const { return static_cast<int>(modes_.size()); }

  const std::vector<ModeIndex>& modes() const { return modes_; }
  /// 1-based, like ModeIndex::flat.
  const ModeIndex& mode(int flat) const;
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  /// Boundary traces of all modes at a unit-sphere point.
  Eigen::VectorXd traces(const Point3& point) const;
  void traces(double cos_theta, double phi, std::span<double> out) const;

 private:
  SteklovBasis(int dimension, int max_degree, int count);

  int dimension_;
  int max_degree_;
  std::vector<ModeIndex> modes_;
  Eigen::VectorXd eigenvalues_;
};

}  // namespace exsteklov

#endif  // EXSTEKLOV_STEKLOV_BASIS_HPP_
