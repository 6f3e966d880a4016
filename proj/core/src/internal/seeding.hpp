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

#ifndef EXSTEKLOV_INTERNAL_SEEDING_HPP_
#define EXSTEKLOV_INTERNAL_SEEDING_HPP_

#include <cstdint>
#include <initializer_list>

namespace exsteklov::detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Derives an independent stream seed from a base seed and stream labels, so
// results do not depend on the order (or thread) in which streams run.
template <typename... Labels>
std::uint64_t mix_seed(std::uint64_t seed, Labels... labels) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t label : {static_cast<std::uint64_t>(labels)...}) {
    h = splitmix64(h ^ splitmix64(label + 0x632be59bd9b4e019ULL));
  }
  return h;
}

}  // namespace exsteklov::detail

#endif  // EXSTEKLOV_INTERNAL_SEEDING_HPP_
