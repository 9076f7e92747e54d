// Copyright 2026 The macroent Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <random>

#include <benchmark/benchmark.h>

#include "macroent/correlation.h"
#include "macroent/observables.h"
#include "macroent/optimizer.h"
#include "macroent/states.h"

using namespace macroent;

static void BM_Apply(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    std::mt19937_64 rng(1);
    auto a = AdditiveObservable::random(n, rng);
    ComplexVector v = make_random_pure(n, 2).vector();
    for (auto _ : state) {
        benchmark::DoNotOptimize(macroent::apply(a, v));
    }
}
BENCHMARK(BM_Apply)->DenseRange(8, 20, 4);

static void BM_BuildKPure(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    MixedState s = make_psi1(n);
    auto a = AdditiveObservable::magnetization(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_k(a, s));
    }
}
BENCHMARK(BM_BuildKPure)->DenseRange(8, 20, 4);

static void BM_EtaOptimalEnsemble(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    MixedState s = make_ex3_ensemble(n);
    auto a = AdditiveObservable::magnetization(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eta_optimal(a, s));
    }
}
BENCHMARK(BM_EtaOptimalEnsemble)->Arg(9)->Arg(12)->Arg(15)->Arg(18);

static void BM_EtaOptimalDense(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    MixedState s = mix(make_ex1(n), make_random_state(n), 0.5);
    auto a = AdditiveObservable::magnetization(n);
    for (auto _ : state) {
        benchmark::DoNotOptimize(eta_optimal(a, s));
    }
}
BENCHMARK(BM_EtaOptimalDense)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

static void BM_MaximizeCat(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    MixedState s = make_cat(n);
    OptimizerConfig cfg;
    cfg.restarts = 4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(maximize_c(s, cfg));
    }
}
BENCHMARK(BM_MaximizeCat)->DenseRange(4, 10, 2)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
