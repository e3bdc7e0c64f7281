// Copyright 2026 The StORM Ordinal Authors
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

#include <random>
#include <span>
#include <vector>

#include "storm/batch_inference.hpp"
#include "storm/chain_crf.hpp"
#include "storm/storm_model.hpp"

namespace {

using namespace storm;

struct Problem {
  ChainCrfParams params;
  Eigen::MatrixXd x;
  std::vector<int> labels;
};

Problem make_problem(int num_classes, int rows, int dim) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal(0.0, 0.3);
  Eigen::VectorXd theta(static_cast<Eigen::Index>(ChainCrfParams::parameter_count(num_classes, dim)));
  for (auto& v : theta) v = normal(rng);
  Eigen::MatrixXd x(rows, dim);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index d = 0; d + 1 < dim; ++d) x(i, d) = normal(rng) * 3.0;
    x(i, dim - 1) = 1.0;
  }
  std::uniform_int_distribution<int> pick(1, num_classes);
  std::vector<int> labels(static_cast<std::size_t>(rows));
  for (auto& y : labels) y = pick(rng);
  return {ChainCrfParams(num_classes, dim, theta), std::move(x), std::move(labels)};
}

void BM_PerInstanceForwardBackward(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)), 100, 3);
  const InferenceMode mode{static_cast<Domain>(state.range(1)), false};
  for (auto _ : state) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < p.x.rows(); ++i) {
      const Eigen::VectorXd row = p.x.row(i).transpose();
      total += infer(p.params, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())), mode).log_z;
    }
    benchmark::DoNotOptimize(total);
  }
  state.SetItemsProcessed(state.iterations() * p.x.rows());
}

void BM_BatchForwardBackward(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)), 100, 3);
  const InferenceMode mode{static_cast<Domain>(state.range(1)), false};
  for (auto _ : state) {
    const BatchChainInference batch(p.params, p.x, mode);
    benchmark::DoNotOptimize(batch.log_z().sum());
  }
  state.SetItemsProcessed(state.iterations() * p.x.rows());
}

void BM_ObjectiveAndGradient(benchmark::State& state) {
  const auto p = make_problem(static_cast<int>(state.range(0)), 100, 3);
  Eigen::VectorXd grad(p.params.values().size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(storm_objective(p.params, p.x, p.labels, 1.0, {}, &grad));
  }
}

void BM_FitSpiral(benchmark::State& state) {
  const auto data = make_synthetic(ManifoldKind::spiral, 100, static_cast<int>(state.range(0)),
                                   kDefaultSyntheticNoise, 3);
  TrainConfig config;
  config.l2_strength = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(StormModel::fit(data, config).params().values().sum());
}

void InferenceArgs(benchmark::internal::Benchmark* b) {
  for (int k : {5, 10, 20}) {
    for (auto domain : {Domain::exp, Domain::log}) b->Args({k, static_cast<long>(domain)});
  }
  b->ArgNames({"K", "domain"});
}

BENCHMARK(BM_PerInstanceForwardBackward)->Apply(InferenceArgs);
BENCHMARK(BM_BatchForwardBackward)->Apply(InferenceArgs);
BENCHMARK(BM_ObjectiveAndGradient)->Arg(5)->Arg(10)->ArgName("K");
BENCHMARK(BM_FitSpiral)->Arg(5)->Arg(10)->ArgName("K")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
