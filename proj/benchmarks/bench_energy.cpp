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

#include <benchmark/benchmark.h>

#include "exsteklov/critical_point.hpp"
#include "exsteklov/energy.hpp"

#include <random>

namespace {

using namespace exsteklov;

struct Fixture {
  SteklovBasis basis;
  QuadratureRule rule;
  Energy energy;
  Eigen::VectorXd coeffs;

  explicit Fixture(int modes)
      : basis(SteklovBasis::with_mode_count(3, modes)),
        rule(build_rule(default_quadrature_order(basis.max_degree()))),
        energy(EnergyParams{}, basis, rule),
        coeffs(modes) {
    std::mt19937_64 rng(modes);
    std::normal_distribution<double> n;
    for (auto& c : coeffs) c = n(rng);
  }
};

void BM_EnergyValue(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const auto u = f.energy.element(f.coeffs);
  for (auto _ : state) benchmark::DoNotOptimize(f.energy.value(u));
  state.counters["nodes"] = static_cast<double>(f.rule.size());
}
BENCHMARK(BM_EnergyValue)->Arg(16)->Arg(25)->Arg(36);

void BM_EnergyGradient(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const auto u = f.energy.element(f.coeffs);
  for (auto _ : state) benchmark::DoNotOptimize(f.energy.gradient(u));
}
BENCHMARK(BM_EnergyGradient)->Arg(16)->Arg(25)->Arg(36);

void BM_EnergyHessian(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  const auto u = f.energy.element(f.coeffs);
  for (auto _ : state) benchmark::DoNotOptimize(f.energy.hessian(u));
}
BENCHMARK(BM_EnergyHessian)->Arg(16)->Arg(25)->Arg(36);

void BM_Refine(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  Eigen::VectorXd start = Eigen::VectorXd::Zero(f.coeffs.size());
  start[0] = 1.05 * std::sqrt(4.0 * 3.14159265358979323846);
  EnergyParams prm;
  prm.lambda = 0.0;
  const Energy energy(prm, f.basis, f.rule);
  for (auto _ : state) benchmark::DoNotOptimize(refine(energy, start));
}
BENCHMARK(BM_Refine)->Arg(16)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_EmbeddingConstants(benchmark::State& state) {
  Fixture f(static_cast<int>(state.range(0)));
  EmbeddingOptions options;
  options.random_starts = 2;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_embedding_constants(f.energy.table(), 1.5, 3.0, options));
  }
}
BENCHMARK(BM_EmbeddingConstants)->Arg(9)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
