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

#ifndef EXSTEKLOV_SPHERE_QUADRATURE_HPP_
#define EXSTEKLOV_SPHERE_QUADRATURE_HPP_

#include <cmath>
#include <concepts>
#include <cstddef>
#include <sstream>
#include <vector>

#include "exsteklov/errors.hpp"
#include "exsteklov/steklov_basis.hpp"

namespace exsteklov {

/// Product rule on the unit sphere: Gauss-Legendre in cos(theta) times an
/// equispaced azimuthal trapezoid. Exact for spherical polynomials of degree
/// <= exactness().
class QuadratureRule {
 public:
  struct Node {
    Point3 point;
    double cos_theta;
    double phi;
    double weight;
  };

  int order() const { return order_; }
  int exactness() const { return 2 * order_ - 1; }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& operator[](std::size_t i) const { return nodes_[i]; }

  friend QuadratureRule build_rule(int order);

 private:
  int order_ = 0;
  std::vector<Node> nodes_;
};

/// `order` Gauss-Legendre nodes in cos(theta), 2*order azimuthal nodes.
/// Throws std::invalid_argument for order < 1.
[[nodiscard]] QuadratureRule build_rule(int order);

/// Default order 2L + 8 for a basis of max degree L.
[[nodiscard]] inline int default_quadrature_order(int max_degree) {
  return 2 * max_degree + 8;
}

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// Sum of w_i f(x_i). Throws NumericalError naming the node on a non-finite
/// evaluation.
template <typename F>
  requires std::invocable<F&, const Point3&>
double integrate(const QuadratureRule& rule, F&& f) {
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto& node = rule[i];
    const double value = static_cast<double>(f(node.point));
    if (!std::isfinite(value)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "non-finite integrand at quadrature node " << i << " ("
          << node.point.x() << ", " << node.point.y() << ", " << node.point.z() << ")";
      throw NumericalError(msg.str());
    }
    sum += node.weight * value;
  }
  return sum;
}

}  // namespace exsteklov

#endif  // EXSTEKLOV_SPHERE_QUADRATURE_HPP_
