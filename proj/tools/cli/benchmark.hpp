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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commands.hpp"

namespace storm::cli {

/// The 4 synthetic kinds at K = 5 and K = 10.
std::vector<std::string> default_benchmark_datasets();

struct BenchmarkOptions {
  std::vector<std::string> datasets = default_benchmark_datasets();
  std::vector<ModelKind> models = {ModelKind::storm, ModelKind::ordlog, ModelKind::nest, ModelKind::logreg};
  int repetitions = 20;
  std::uint64_t seed = 0;
  int jobs = 1;
  int n_train = 100;
  /// Synthetic test size; CSV datasets test on the rows left after training.
  int n_test = 1000;
  double noise = kDefaultSyntheticNoise;
  std::vector<double> l2_grid = kDefaultL2Grid;
  std::optional<double> l2;
  int folds = 5;
  InferenceMode mode{};
  PredictionRule prediction = PredictionRule::viterbi;
  int nystroem_landmarks = 0;
  double gamma = 1.0;
  /// Runs a single repetition when >= 0.
  int only_repetition = -1;
  double alpha = 0.01;
};

struct BenchmarkCell {
  std::string dataset;
  ModelKind model = ModelKind::storm;
  int repetition = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  double selected_l2 = 0.0;
  double zero_one = 0.0;
  double mae = 0.0;
  double seconds = 0.0;
  std::vector<std::string> warnings;
  std::string error;
};

struct BenchmarkRun {
  BenchmarkOptions options;
  /// Dataset-major, then repetition, then model, in option order.
  std::vector<BenchmarkCell> cells;
  nlohmann::json report;
};

/// Seed of one repetition; the CV folds, synthetic draws and feature map of
/// that repetition all derive from it.
std::uint64_t repetition_seed(std::uint64_t master, const std::string& dataset, int repetition);

BenchmarkRun run_benchmark(const BenchmarkOptions& options, std::ostream* progress = nullptr);

/// Report document text: deterministic given the options.
std::string report_text(const BenchmarkRun& run);
/// dataset,model,repetition,seed,selected_l2,zero_one,mae
std::string scores_csv(const BenchmarkRun& run);
/// dataset,model,repetition,seconds
std::string timings_csv(const BenchmarkRun& run);

/// Writes <out>, <out>.scores.csv and <out>.timings.csv atomically.
void write_benchmark(const BenchmarkRun& run, const std::filesystem::path& out);

}  // namespace storm::cli
