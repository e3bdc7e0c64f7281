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

// Common estimator surface shared by StORM and the three baselines:
// training configuration, the abstract model, cross-validated fitting and
// the serialized model document.

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "storm/chain_crf.hpp"
#include "storm/dataset.hpp"
#include "storm/nystroem.hpp"
#include "storm/optimizer.hpp"

namespace storm {

inline constexpr int kModelSchemaVersion = 1;

enum class ModelKind { storm, ordlog, nest, logreg };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

enum class PredictionRule { viterbi, marginal };

std::string_view to_string(PredictionRule rule);
PredictionRule parse_prediction_rule(std::string_view name);
std::string_view to_string(Domain domain);
Domain parse_domain(std::string_view name);

struct TrainConfig {
  double l2_strength = 1.0;
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;
  std::uint64_t seed = 0;
  InferenceMode mode{};
  PredictionRule prediction = PredictionRule::viterbi;

  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
  MinimizerOptions minimizer_options() const;
};

nlohmann::json to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

inline const std::vector<double> kDefaultL2Grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};

/// Outcome of the final optimiser run of a fit.
struct FitSummary {
  int iterations = 0;
  MinimizerStatus status = MinimizerStatus::max_iterations;
  double objective = 0.0;
};

/// A fitted ordinal regressor. Inputs are raw feature rows; every model
/// standardises with statistics recorded at fit time.
class OrdinalModel {
 public:
  virtual ~OrdinalModel() = default;

  virtual ModelKind kind() const = 0;
  virtual int num_classes() const = 0;

  /// P(label = k | x) for k = 1..K.
  virtual std::vector<double> predict_proba(std::span<const double> x) const = 0;

  /// Default: argmax of predict_proba, ties to the smaller label.
  virtual int predict(std::span<const double> x) const;

  /// P(a <= label <= b | x). Default sums predict_proba.
  virtual double interval_probability(std::span<const double> x, int a, int b) const;

  /// Model-specific fields of the serialized document.
  virtual nlohmann::json to_json() const = 0;

  Eigen::Index input_dim() const { return standardizer_.input_dim(); }
  std::vector<int> predict_all(const Eigen::MatrixXd& x) const;

  const TrainConfig& config() const { return config_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  const std::vector<FitSummary>& fit_summaries() const { return fit_summaries_; }

 protected:
  OrdinalModel(Standardizer standardizer, TrainConfig config)
      : standardizer_(std::move(standardizer)), config_(std::move(config)) {}

  /// Shared header fields: kind, K, raw_dim, standardisation, config.
  nlohmann::json envelope() const;
  Eigen::VectorXd prepare(std::span<const double> x) const;

  Standardizer standardizer_;
  TrainConfig config_;
  std::vector<std::string> warnings_;
  std::vector<FitSummary> fit_summaries_;
};

std::unique_ptr<OrdinalModel> fit_model(ModelKind kind, const OrdinalDataset& data, const TrainConfig& config);

/// Rebuilds any model from its to_json() document.
std::unique_ptr<OrdinalModel> model_from_json(const nlohmann::json& j);

struct CvOutcome {
  std::unique_ptr<OrdinalModel> model;
  double selected_l2 = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_fold_mae;  // aligned with grid
  bool stratified = true;
  std::vector<std::string> warnings;
};

/// Stratified k-fold selection of the l2 strength by mean macro MAE (ties
/// to the larger value), then a refit on all of `data`. Falls back to
/// unstratified folds, with a warning, when some class has fewer members
/// than folds.
CvOutcome fit_cv(ModelKind kind, const OrdinalDataset& data, std::span<const double> grid, const TrainConfig& config,
                 int n_folds = 5);

/// Optional feature map in front of a model, as stored in a model file.
class ModelBundle {
 public:
  ModelBundle(std::shared_ptr<const OrdinalModel> model, std::optional<NystroemMap> feature_map = std::nullopt);

  const OrdinalModel& model() const { return *model_; }
  const std::optional<NystroemMap>& feature_map() const { return feature_map_; }
  Eigen::Index input_dim() const;
  int num_classes() const { return model_->num_classes(); }

  int predict(std::span<const double> x) const;
  std::vector<double> predict_proba(std::span<const double> x) const;
  double interval_probability(std::span<const double> x, int a, int b) const;

  nlohmann::json to_json() const;
  static ModelBundle from_json(const nlohmann::json& j);

 private:
  Eigen::VectorXd mapped(std::span<const double> x) const;

  std::shared_ptr<const OrdinalModel> model_;
  std::optional<NystroemMap> feature_map_;
};

std::string serialize_model(const ModelBundle& bundle);
ModelBundle load_model(const std::filesystem::path& path);

}  // namespace storm
