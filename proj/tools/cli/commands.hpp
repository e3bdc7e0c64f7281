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

// Command implementations behind the storm-ordinal executable. Each command
// takes a plain options struct so it can be driven from tests without
// going through argument parsing.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "storm/dataset.hpp"
#include "storm/model.hpp"

namespace storm::cli {

/// Bad flags or flag combinations. Maps to exit code 2 like DataError.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

/// "synth:<kind>:<K>" or "csv:<path>:<label column>:<K>".
struct DatasetSpec {
  enum class Source { synthetic, csv };
  Source source = Source::synthetic;
  ManifoldKind kind = ManifoldKind::linear;
  int num_classes = 5;
  std::filesystem::path path;
  std::string label_column;
  std::string text;
};

DatasetSpec parse_dataset_spec(std::string_view text);

/// "unconstrained" or "constrained".
bool parse_constrained(std::string_view text);

/// Comma separated list of non-negative reals.
std::vector<double> parse_l2_grid(std::string_view text);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct SynthOptions {
  ManifoldKind kind = ManifoldKind::linear;
  int n_train = 100;
  int n_test = 1000;
  int num_classes = 5;
  double noise = kDefaultSyntheticNoise;
  std::uint64_t seed = 0;
  /// Output prefix: writes <out>.train.csv and <out>.test.csv.
  std::filesystem::path out;
};

struct SynthFiles {
  std::filesystem::path train;
  std::filesystem::path test;
};

/// Seeds of the train and test draws under `seed`; shared with the
/// benchmark so a synthetic repetition can be regenerated from the CLI.
std::uint64_t synth_train_seed(std::uint64_t seed);
std::uint64_t synth_test_seed(std::uint64_t seed);

SynthFiles run_synth(const SynthOptions& options, std::ostream& log);

struct TrainOptions {
  ModelKind model = ModelKind::storm;
  std::filesystem::path train_csv;
  std::string label_column = "label";
  int num_classes = 0;
  /// Fixed strength; skips cross-validation when set.
  std::optional<double> l2;
  std::vector<double> l2_grid = kDefaultL2Grid;
  int folds = 5;
  InferenceMode mode{};
  PredictionRule prediction = PredictionRule::viterbi;
  int nystroem_landmarks = 0;
  double gamma = 1.0;
  std::uint64_t seed = 0;
  std::filesystem::path out;
};

struct TrainResult {
  ModelBundle bundle;
  double selected_l2 = 0.0;
  std::vector<std::string> warnings;
};

/// Fits on `data` with the options' model, mode and feature map. Shared by
/// the train and benchmark commands.
TrainResult train_bundle(const TrainOptions& options, const OrdinalDataset& data);

TrainResult run_train(const TrainOptions& options, std::ostream& log);

struct PredictOptions {
  std::filesystem::path model;
  std::filesystem::path csv;
  /// Dropped from the input when present.
  std::string label_column = "label";
  bool proba = false;
  std::filesystem::path out;
};

void run_predict(const PredictOptions& options, std::ostream& log);

struct GridOptions {
  std::filesystem::path model;
  double x_min = -1.5;
  double x_max = 1.5;
  double y_min = -1.5;
  double y_max = 1.5;
  int resolution = 100;
  /// "label", "proba:<k>" or "interval:<a>:<b>".
  std::string query = "label";
  std::filesystem::path out;
};

void run_grid(const GridOptions& options, std::ostream& log);

}  // namespace storm::cli
