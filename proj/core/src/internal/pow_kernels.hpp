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

#ifndef EXSTEKLOV_INTERNAL_POW_KERNELS_HPP_
#define EXSTEKLOV_INTERNAL_POW_KERNELS_HPP_

#include <cmath>

namespace exsteklov::detail {

// |x|^s, with exact shortcuts for the exponents that dominate the runtime.
inline double abs_power(double x, double s) {
  const double a = std::abs(x);
  if (s == 2.0) return a * a;
  if (s == 3.0) return a * a * a;
  if (s == 1.5) return a * std::sqrt(a);
  if (s == 1.0) return a;
  return a == 0.0 ? 0.0 : std::pow(a, s);
}

// sign(x) |x|^e for e > 0; zero at x = 0.
inline double signed_power(double x, double e) {
  if (e == 1.0) return x;
  if (e == 2.0) return x * std::abs(x);
  if (e == 0.5) return std::copysign(std::sqrt(std::abs(x)), x);
  if (x == 0.0) return 0.0;
  return std::copysign(std::pow(std::abs(x), e), x);
}

}  // namespace exsteklov::detail

#endif  // EXSTEKLOV_INTERNAL_POW_KERNELS_HPP_
