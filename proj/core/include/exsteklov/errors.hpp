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

#ifndef EXSTEKLOV_ERRORS_HPP_
#define EXSTEKLOV_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace exsteklov {

// Raised when a computation produces a non-finite value or a solve breaks
// down. Precondition violations use std::invalid_argument / std::domain_error.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace exsteklov

#endif  // EXSTEKLOV_ERRORS_HPP_
