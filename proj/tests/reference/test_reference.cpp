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

// Reference results on the synthetic manifolds: loose bounds on mean test
// macro 0/1 loss over 20 repetitions (100 train / 1000 test, K = 5).

#include <gtest/gtest.h>

#include <numeric>

#include "benchmark.hpp"

namespace storm::cli {
namespace {

double mean_loss(const std::string& dataset, ModelKind model) {
  BenchmarkOptions o;
  o.datasets = {dataset};
  o.models = {model};
  const auto run = run_benchmark(o);
  std::vector<double> v;
  for (const auto& c : run.cells) {
    EXPECT_TRUE(c.ok) << c.error;
    v.push_back(c.zero_one);
  }
  EXPECT_EQ(v.size(), 20u);
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  ::testing::Test::RecordProperty("mean_zero_one", std::to_string(m));
  return m;
}

TEST(ReferenceResults, StormSeparatesTheSpiral) {
  EXPECT_LE(mean_loss("synth:spiral:5", ModelKind::storm), 0.15);
}

TEST(ReferenceResults, OrderedLogitOnLinear) {
  EXPECT_LE(mean_loss("synth:linear:5", ModelKind::ordlog), 0.25);
}

TEST(ReferenceResults, NestedBinaryOnSpiral) {
  const double loss = mean_loss("synth:spiral:5", ModelKind::nest);
  EXPECT_GE(loss, 0.2);
  EXPECT_LE(loss, 0.45);
}

TEST(ReferenceResults, MultinomialLogisticOnCircle) {
  EXPECT_LE(mean_loss("synth:circle:5", ModelKind::logreg), 0.12);
}

TEST(ReferenceNystroem, RbfFeaturesDoNotHurtStormOnSpiral) {
  BenchmarkOptions o;
  o.datasets = {"synth:spiral:5"};
  o.models = {ModelKind::storm};
  o.prediction = PredictionRule::marginal;
  const auto linear = run_benchmark(o);
  o.nystroem_landmarks = 50;
  o.gamma = 10.0;
  const auto rbf = run_benchmark(o);
  const auto mean_of = [](const BenchmarkRun& run) {
    double total = 0.0;
    for (const auto& c : run.cells) total += c.zero_one;
    return total / static_cast<double>(run.cells.size());
  };
  RecordProperty("linear_features", std::to_string(mean_of(linear)));
  RecordProperty("nystroem_features", std::to_string(mean_of(rbf)));
  EXPECT_LE(mean_of(rbf), mean_of(linear));
}

}  // namespace
}  // namespace storm::cli
