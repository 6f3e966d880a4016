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

#include "exsteklov/sphere_quadrature.hpp"

#include <algorithm>
#include <numbers>
#include <utility>
#include <stdexcept>

namespace exsteklov {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double x) {
  double prev = 1.0, cur = x;
  for (int k = 2; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0) * x * cur - (k - 1.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  return {cur, n * (x * cur - prev) / (x * x - 1.0)};
}

}  // namespace

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw std::invalid_argument("Gauss-Legendre order must be >= 1");
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  if (n == 1) {
    weights[0] = 2.0;
    return;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [pn, dpn] = legendre_with_derivative(n, x);
      const double dx = pn / dpn;
      x -= dx;
      if (std::abs(dx) <= 1e-16) break;
    }
    const double dpn = legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dpn * dpn);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    nodes[lo] = -x;
    nodes[hi] = x;
    weights[lo] = w;
    weights[hi] = w;
  }
  if (n % 2 == 1) nodes[static_cast<std::size_t>(n / 2)] = 0.0;
}

QuadratureRule build_rule(int order) {
  if (order < 1) {
    throw std::invalid_argument("quadrature order must be >= 1");
  }
  std::vector<double> z, wz;
  gauss_legendre(order, z, wz);
  const int azimuthal = 2 * order;
  const double dphi = 2.0 * std::numbers::pi / azimuthal;

  QuadratureRule rule;
  rule.order_ = order;
  rule.nodes_.reserve(static_cast<std::size_t>(order * azimuthal));
  for (int i = 0; i < order; ++i) {
    const double ct = z[static_cast<std::size_t>(i)];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int k = 0; k < azimuthal; ++k) {
      const double phi = k * dphi;
      QuadratureRule::Node node;
      node.point = Point3(st * std::cos(phi), st * std::sin(phi), ct);
      node.point.normalize();
      node.cos_theta = ct;
      node.phi = phi;
      node.weight = wz[static_cast<std::size_t>(i)] * dphi;
      rule.nodes_.push_back(node);
    }
  }
  return rule;
}

}  // namespace exsteklov
