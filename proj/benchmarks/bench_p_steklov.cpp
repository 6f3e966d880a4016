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

#include "exsteklov/p_steklov.hpp"

namespace {

using namespace exsteklov;

void BM_FlowStep(benchmark::State& state) {
  const int cells = static_cast<int>(state.range(0));
  const PSteklovProblem problem(1.5, RadialMesh::geometric(11.0, cells, 1.003));
  const RadialFunction v = problem.normalized(problem.interpolate([](double r) { return 1.0 / r - 1.0 / 11.0; }));
  for (auto _ : state) benchmark::DoNotOptimize(problem.flow_step(v, 1e-3));
  state.SetComplexityN(cells);
}
BENCHMARK(BM_FlowStep)->RangeMultiplier(4)->Range(100, 1600)->Complexity(benchmark::oN);

void BM_FirstEigenpair(benchmark::State& state) {
  const double p = static_cast<double>(state.range(0)) / 10.0;
  const PSteklovProblem problem(p, RadialMesh::geometric(11.0, kDefaultMeshCells, kDefaultMeshGrading));
  FlowOptions options;
  options.record_history = false;
  int steps = 0;
  for (auto _ : state) {
    const PSteklovResult r = first_eigenpair(problem, options);
    steps = r.iterations;
    benchmark::DoNotOptimize(r.delta);
  }
  state.counters["steps"] = steps;
}
BENCHMARK(BM_FirstEigenpair)->Arg(15)->Arg(20)->Arg(25)->Unit(benchmark::kMillisecond);

void BM_P2ModeSpectrum(benchmark::State& state) {
  const RadialMesh mesh = RadialMesh::geometric(11.0, kDefaultMeshCells, kDefaultMeshGrading);
  for (auto _ : state) benchmark::DoNotOptimize(p2_mode_spectrum(static_cast<int>(state.range(0)), mesh));
}
BENCHMARK(BM_P2ModeSpectrum)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
