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

#include "exsteklov/steklov_basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace exsteklov {
namespace {

constexpr double kUnitTolerance = 1e-12;

void require_dimension(int dimension) {
  if (dimension < 3) {
    throw std::invalid_argument("dimension must satisfy N >= 3, got " +
                                std::to_string(dimension));
  }
}

void require_degree(int degree) {
  if (degree < 0) {
    throw std::invalid_argument("degree must be nonnegative, got " +
                                std::to_string(degree));
  }
}

void require_mode(const ModeIndex& mode) {
  require_degree(mode.degree);
  if (std::abs(mode.order) > mode.degree) {
    throw std::invalid_argument("order must satisfy |m| <= l");
  }
}

// Triangular index of the normalized associated Legendre value (l, m >= 0).
inline int tri(int l, int m) { return l * (l + 1) / 2 + m; }

}  // namespace

int eigenvalue_exact(int degree, int dimension) {
  require_dimension(dimension);
  require_degree(degree);
  return degree + dimension - 2;
}

double eigenvalue(int degree, int dimension) {
  return static_cast<double>(eigenvalue_exact(degree, dimension));
}

int multiplicity(int degree, int dimension) {
  if (dimension != 3) {
    throw std::invalid_argument(
        "multiplicity is implemented for N = 3 only, got N = " +
        std::to_string(dimension));
  }
  require_degree(degree);
  return 2 * degree + 1;
}

int flat_index(int degree, int order) {
  require_mode({degree, order, 1});
  return degree * degree + (order + degree) + 1;
}

ModeIndex mode_from_flat(int flat) {
  if (flat < 1) throw std::invalid_argument("flat index must be >= 1");
  int l = static_cast<int>(std::sqrt(static_cast<double>(flat - 1)));
  while (l * l > flat - 1) --l;
  while ((l + 1) * (l + 1) <= flat - 1) ++l;
  return {l, flat - 1 - l * l - l, flat};
}

double radial_factor(int degree, int dimension, double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("radius must satisfy r >= 1");
  return std::pow(r, -static_cast<double>(eigenvalue_exact(degree, dimension)));
}

void real_spherical_harmonics(int max_degree, double cos_theta, double phi,
                              std::span<double> out) {
  require_degree(max_degree);
  const auto count = static_cast<std::size_t>((max_degree + 1) * (max_degree + 1));
  if (out.size() < count) {
    throw std::invalid_argument("output span too small for requested degree");
  }
  const double x = cos_theta;
  const double s = std::sqrt(std::max(0.0, 1.0 - x * x));

  std::vector<double> plm(static_cast<std::size_t>(tri(max_degree, max_degree) + 1));
  plm[0] = 0.5 / std::sqrt(std::numbers::pi);
  for (int m = 1; m <= max_degree; ++m) {
    plm[tri(m, m)] = std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s * plm[tri(m - 1, m - 1)];
  }
  for (int m = 0; m < max_degree; ++m) {
    plm[tri(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * plm[tri(m, m)];
  }
  for (int m = 0; m <= max_degree; ++m) {
    for (int l = m + 2; l <= max_degree; ++l) {
      const double ll = l, mm = m;
      const double a = std::sqrt((4.0 * ll * ll - 1.0) / (ll * ll - mm * mm));
      const double b = std::sqrt(((ll - 1.0) * (ll - 1.0) - mm * mm) /
                                 (4.0 * (ll - 1.0) * (ll - 1.0) - 1.0));
      plm[tri(l, m)] = a * (x * plm[tri(l - 1, m)] - b * plm[tri(l - 2, m)]);
    }
  }

  for (int l = 0; l <= max_degree; ++l) {
    const int base = l * l + l;
    out[base] = plm[tri(l, 0)];
    for (int m = 1; m <= l; ++m) {
      const double scaled = std::numbers::sqrt2 * plm[tri(l, m)];
      out[base + m] = scaled * std::cos(m * phi);
      out[base - m] = scaled * std::sin(m * phi);
    }
  }
}

double boundary_trace(const ModeIndex& mode, const Point3& point) {
  require_mode(mode);
  const double norm = point.norm();
  if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
    throw std::invalid_argument("boundary_trace requires a unit-sphere point");
  }
  std::vector<double> values(static_cast<std::size_t>((mode.degree + 1) * (mode.degree + 1)));
  real_spherical_harmonics(mode.degree, std::clamp(point.z() / norm, -1.0, 1.0),
                           std::atan2(point.y(), point.x()), values);
  return values[static_cast<std::size_t>(mode.degree * mode.degree + mode.degree + mode.order)];
}

double exterior_value(const ModeIndex& mode, const Point3& point) {
  require_mode(mode);
  const double r = point.norm();
  if (!(r >= 1.0 - kUnitTolerance)) {
    throw std::invalid_argument("exterior_value requires |point| >= 1");
  }
  const Point3 direction = point / r;
  return std::pow(r, -static_cast<double>(mode.degree + 1)) *
         boundary_trace(mode, direction);
}

// --- SteklovBasis ----------------------------------------------------------

SteklovBasis::SteklovBasis(int dimension, int max_degree)
    : SteklovBasis(dimension, max_degree, (max_degree + 1) * (max_degree + 1)) {}

SteklovBasis::SteklovBasis(int dimension, int max_degree, int count)
    : dimension_(dimension), max_degree_(max_degree) {
  require_dimension(dimension);
  if (dimension != 3) {
    throw std::invalid_argument(
        "SteklovBasis evaluation is implemented for N = 3 only");
  }
  require_degree(max_degree);
  modes_.reserve(static_cast<std::size_t>(count));
  eigenvalues_.resize(count);
  for (int j = 1; j <= count; ++j) {
    modes_.push_back(mode_from_flat(j));
    eigenvalues_[j - 1] = eigenvalue(modes_.back().degree, dimension);
  }
}

SteklovBasis SteklovBasis::with_mode_count(int dimension, int count) {
  if (count < 1) throw std::invalid_argument("mode count must be >= 1");
  int degree = 0;
  while ((degree + 1) * (degree + 1) < count) ++degree;
  return SteklovBasis(dimension, degree, count);
}

const ModeIndex& SteklovBasis::mode(int flat) const {
  if (flat < 1 || flat > size()) throw std::out_of_range("mode index out of range");
  return modes_[static_cast<std::size_t>(flat - 1)];
}

Eigen::VectorXd SteklovBasis::traces(const Point3& point) const {
  const double norm = point.norm();
  if (!(std::abs(norm - 1.0) <= kUnitTolerance)) {
    throw std::invalid_argument("traces requires a unit-sphere point");
  }
  Eigen::VectorXd out(size());
  traces(std::clamp(point.z() / norm, -1.0, 1.0), std::atan2(point.y(), point.x()),
         std::span<double>(out.data(), static_cast<std::size_t>(out.size())));
  return out;
}

void SteklovBasis::traces(double cos_theta, double phi, std::span<double> out) const {
  if (out.size() < modes_.size()) throw std::invalid_argument("output span too small");
  std::vector<double> full(static_cast<std::size_t>((max_degree_ + 1) * (max_degree_ + 1)));
  real_spherical_harmonics(max_degree_, cos_theta, phi, full);
  std::copy_n(full.begin(), modes_.size(), out.begin());
}

}  // namespace exsteklov
