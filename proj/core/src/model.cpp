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

#include "storm/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "json_util.hpp"
#include "storm/baselines.hpp"
#include "storm/evaluation.hpp"
#include "storm/storm_model.hpp"

namespace storm {

// ---------------------------------------------------------------------------
// Names

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::storm:
      return "storm";
    case ModelKind::ordlog:
      return "ordlog";
    case ModelKind::nest:
      return "nest";
    case ModelKind::logreg:
      return "logreg";
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "storm") return ModelKind::storm;
  if (name == "ordlog") return ModelKind::ordlog;
  if (name == "nest") return ModelKind::nest;
  if (name == "logreg") return ModelKind::logreg;
  throw std::invalid_argument("unknown model kind '" + std::string(name) + "' (expected storm, ordlog, nest or logreg)");
}

std::string_view to_string(PredictionRule rule) { return rule == PredictionRule::viterbi ? "viterbi" : "marginal"; }

PredictionRule parse_prediction_rule(std::string_view name) {
  if (name == "viterbi") return PredictionRule::viterbi;
  if (name == "marginal") return PredictionRule::marginal;
  throw std::invalid_argument("unknown prediction rule '" + std::string(name) + "' (expected viterbi or marginal)");
}

std::string_view to_string(Domain domain) {
  switch (domain) {
    case Domain::automatic:
      return "automatic";
    case Domain::exp:
      return "exp";
    case Domain::log:
      return "log";
  }
  return "unknown";
}

Domain parse_domain(std::string_view name) {
  if (name == "automatic") return Domain::automatic;
  if (name == "exp") return Domain::exp;
  if (name == "log") return Domain::log;
  throw std::invalid_argument("unknown inference domain '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// TrainConfig

void TrainConfig::validate() const {
  if (!(l2_strength >= 0.0) || !std::isfinite(l2_strength)) {
    throw std::invalid_argument("TrainConfig: l2_strength must be a finite non-negative number");
  }
  if (max_iterations < 1) throw std::invalid_argument("TrainConfig: max_iterations must be >= 1");
  if (!(gradient_tolerance > 0.0)) throw std::invalid_argument("TrainConfig: gradient_tolerance must be > 0");
}

MinimizerOptions TrainConfig::minimizer_options() const {
  MinimizerOptions options;
  options.max_iterations = max_iterations;
  options.gradient_tolerance = gradient_tolerance;
  return options;
}

nlohmann::json to_json(const TrainConfig& c) {
  return {{"l2_strength", c.l2_strength},
          {"max_iterations", c.max_iterations},
          {"gradient_tolerance", c.gradient_tolerance},
          {"seed", c.seed},
          {"domain", to_string(c.mode.domain)},
          {"constrain_transitions", c.mode.constrain_transitions},
          {"prediction", to_string(c.prediction)}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.l2_strength = j.at("l2_strength").get<double>();
  c.max_iterations = j.at("max_iterations").get<int>();
  c.gradient_tolerance = j.at("gradient_tolerance").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.mode.domain = parse_domain(j.at("domain").get<std::string>());
  c.mode.constrain_transitions = j.at("constrain_transitions").get<bool>();
  c.prediction = parse_prediction_rule(j.at("prediction").get<std::string>());
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// OrdinalModel

int OrdinalModel::predict(std::span<const double> x) const {
  const auto p = predict_proba(x);
  return 1 + static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

double OrdinalModel::interval_probability(std::span<const double> x, int a, int b) const {
  if (a < 1 || b > num_classes() || a > b) {
    throw std::invalid_argument("interval_probability: need 1 <= a <= b <= K");
  }
  const auto p = predict_proba(x);
  double total = 0.0;
  for (int k = a; k <= b; ++k) total += p[k - 1];
  return total;
}

std::vector<int> OrdinalModel::predict_all(const Eigen::MatrixXd& x) const {
  std::vector<int> out(static_cast<std::size_t>(x.rows()));
  Eigen::VectorXd row(x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    row = x.row(i).transpose();
    out[static_cast<std::size_t>(i)] = predict(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
  }
  return out;
}

nlohmann::json OrdinalModel::envelope() const {
  return {{"schema_version", kModelSchemaVersion},
          {"model_kind", to_string(kind())},
          {"num_classes", num_classes()},
          {"raw_dim", input_dim()},
          {"standardization",
           {{"mean", detail::vector_to_json(standardizer_.mean())}, {"scale", detail::vector_to_json(standardizer_.scale())}}},
          {"train_config", storm::to_json(config_)},
          {"warnings", warnings_}};
}

Eigen::VectorXd OrdinalModel::prepare(std::span<const double> x) const { return standardizer_.apply_row(x); }

// ---------------------------------------------------------------------------
// Dispatch

std::unique_ptr<OrdinalModel> fit_model(ModelKind kind, const OrdinalDataset& data, const TrainConfig& config) {
  switch (kind) {
    case ModelKind::storm:
      return std::make_unique<StormModel>(StormModel::fit(data, config));
    case ModelKind::ordlog:
      return std::make_unique<OrderedLogitModel>(OrderedLogitModel::fit(data, config));
    case ModelKind::nest:
      return std::make_unique<NestedBinaryModel>(NestedBinaryModel::fit(data, config));
    case ModelKind::logreg:
      return std::make_unique<MultinomialLogisticModel>(MultinomialLogisticModel::fit(data, config));
  }
  throw std::invalid_argument("fit_model: unknown model kind");
}

std::unique_ptr<OrdinalModel> model_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kModelSchemaVersion) {
      throw DataError("model document: unsupported schema_version " + std::to_string(version));
    }
    switch (parse_model_kind(j.at("model_kind").get<std::string>())) {
      case ModelKind::storm:
        return std::make_unique<StormModel>(StormModel::from_json(j));
      case ModelKind::ordlog:
        return std::make_unique<OrderedLogitModel>(OrderedLogitModel::from_json(j));
      case ModelKind::nest:
        return std::make_unique<NestedBinaryModel>(NestedBinaryModel::from_json(j));
      case ModelKind::logreg:
        return std::make_unique<MultinomialLogisticModel>(MultinomialLogisticModel::from_json(j));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model document: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model document: ") + e.what());
  }
  throw DataError("model document: unknown model kind");
}

// ---------------------------------------------------------------------------
// Cross-validation

CvOutcome fit_cv(ModelKind kind, const OrdinalDataset& data, std::span<const double> grid, const TrainConfig& config,
                 int n_folds) {
  if (grid.empty()) throw std::invalid_argument("fit_cv: empty l2 grid");
  if (n_folds < 2) throw std::invalid_argument("fit_cv: need at least 2 folds");
  if (data.rows() < n_folds) {
    throw std::invalid_argument("fit_cv: need at least " + std::to_string(n_folds) + " rows, got " +
                                std::to_string(data.rows()));
  }
  config.validate();

  CvOutcome outcome;
  outcome.grid.assign(grid.begin(), grid.end());
  outcome.mean_fold_mae.assign(grid.size(), std::numeric_limits<double>::quiet_NaN());

  std::size_t best = 0;
  if (grid.size() > 1) {
    std::map<int, int> class_counts;
    for (int y : data.labels()) ++class_counts[y];
    outcome.stratified =
        std::all_of(class_counts.begin(), class_counts.end(), [&](const auto& kv) { return kv.second >= n_folds; });
    const auto folds = outcome.stratified
                           ? stratified_folds(data.labels(), n_folds, config.seed)
                           : unstratified_folds(static_cast<std::size_t>(data.rows()), n_folds, config.seed);
    if (!outcome.stratified) {
      outcome.warnings.push_back("fit_cv: a class has fewer than " + std::to_string(n_folds) +
                                 " instances; using unstratified folds");
    }

    std::vector<OrdinalDataset> train_parts;
    std::vector<OrdinalDataset> valid_parts;
    for (int f = 0; f < n_folds; ++f) {
      std::vector<std::size_t> train_rows;
      std::vector<std::size_t> valid_rows;
      for (std::size_t i = 0; i < folds.size(); ++i) (folds[i] == f ? valid_rows : train_rows).push_back(i);
      train_parts.push_back(data.subset(train_rows));
      valid_parts.push_back(data.subset(valid_rows));
    }

    for (std::size_t g = 0; g < grid.size(); ++g) {
      TrainConfig fold_config = config;
      fold_config.l2_strength = grid[g];
      double total = 0.0;
      for (int f = 0; f < n_folds; ++f) {
        const auto model = fit_model(kind, train_parts[f], fold_config);
        const auto predicted = model->predict_all(valid_parts[f].features());
        total += macro_mae(valid_parts[f].labels(), predicted, data.num_classes());
      }
      outcome.mean_fold_mae[g] = total / n_folds;
    }
    constexpr double tie = 1e-12;
    for (std::size_t g = 1; g < grid.size(); ++g) {
      const double diff = outcome.mean_fold_mae[g] - outcome.mean_fold_mae[best];
      if (diff < -tie || (std::abs(diff) <= tie && grid[g] > grid[best])) best = g;
    }
  }

  outcome.selected_l2 = grid[best];
  TrainConfig final_config = config;
  final_config.l2_strength = outcome.selected_l2;
  outcome.model = fit_model(kind, data, final_config);
  for (const auto& w : outcome.model->warnings()) outcome.warnings.push_back(w);
  return outcome;
}

// ---------------------------------------------------------------------------
// ModelBundle

ModelBundle::ModelBundle(std::shared_ptr<const OrdinalModel> model, std::optional<NystroemMap> feature_map)
    : model_(std::move(model)), feature_map_(std::move(feature_map)) {
  if (!model_) throw std::invalid_argument("ModelBundle: null model");
  if (feature_map_ && feature_map_->output_dim() != model_->input_dim()) {
    throw DataError("ModelBundle: feature map produces " + std::to_string(feature_map_->output_dim()) +
                    " features but the model expects " + std::to_string(model_->input_dim()));
  }
}

Eigen::Index ModelBundle::input_dim() const {
  return feature_map_ ? feature_map_->input_dim() : model_->input_dim();
}

Eigen::VectorXd ModelBundle::mapped(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != input_dim()) {
    throw std::invalid_argument("model expects " + std::to_string(input_dim()) + " features, got " +
                                std::to_string(x.size()));
  }
  const Eigen::Map<const Eigen::RowVectorXd> row(x.data(), static_cast<Eigen::Index>(x.size()));
  if (!feature_map_) return row.transpose();
  return feature_map_->transform(Eigen::MatrixXd(row)).row(0).transpose();
}

int ModelBundle::predict(std::span<const double> x) const {
  const auto z = mapped(x);
  return model_->predict(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
}

std::vector<double> ModelBundle::predict_proba(std::span<const double> x) const {
  const auto z = mapped(x);
  return model_->predict_proba(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())));
}

double ModelBundle::interval_probability(std::span<const double> x, int a, int b) const {
  const auto z = mapped(x);
  return model_->interval_probability(std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), a, b);
}

nlohmann::json ModelBundle::to_json() const {
  auto doc = model_->to_json();
  doc["feature_map"] = feature_map_ ? feature_map_->to_json() : nlohmann::json(nullptr);
  return doc;
}

ModelBundle ModelBundle::from_json(const nlohmann::json& j) {
  std::optional<NystroemMap> map;
  try {
    if (j.contains("feature_map") && !j.at("feature_map").is_null()) map = NystroemMap::from_json(j.at("feature_map"));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("model document: feature_map: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("model document: feature_map: ") + e.what());
  }
  return ModelBundle(model_from_json(j), std::move(map));
}

std::string serialize_model(const ModelBundle& bundle) { return bundle.to_json().dump(2) + "\n"; }

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buffer.str());
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": not a valid model document: " + e.what());
  }
  return ModelBundle::from_json(doc);
}

}  // namespace storm
