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

// Comparison models: ordered logit, nested binary classifiers and
// multinomial logistic regression. Each is linear in its parameters, takes
// the same standardised-plus-bias design matrix as StORM, and penalises
// only non-bias weights.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "storm/model.hpp"

namespace storm {

// ---------------------------------------------------------------------------
// Ordered logit (proportional odds)

/// Ordered logit NLL over theta = [w (D, bias last), increments (K-2)].
/// Thresholds are t_1 = 0, t_{k+1} = t_k + exp(increment_k); the penalty
/// covers non-bias entries of w only.
double ordered_logit_objective(const Eigen::VectorXd& theta, const Eigen::MatrixXd& x, std::span<const int> labels,
                               int num_classes, double l2, Eigen::VectorXd* gradient);

/// Realised thresholds t_1..t_{K-1} from the increments.
std::vector<double> ordered_logit_thresholds(std::span<const double> increments);

/// sigma(t_k - s) - sigma(t_{k-1} - s) over k = 1..K, with t_0 = -inf and
/// t_K = +inf, for latent score s = w^T x.
std::vector<double> ordered_logit_proba(double score, std::span<const double> thresholds);

class OrderedLogitModel final : public OrdinalModel {
 public:
  /// Receives the realised thresholds at the start point and every iterate.
  using ThresholdObserver = std::function<void(std::span<const double> thresholds)>;

  OrderedLogitModel(Eigen::VectorXd weights, Eigen::VectorXd increments, Standardizer standardizer,
                    TrainConfig config);

  static OrderedLogitModel fit(const OrdinalDataset& data, const TrainConfig& config,
                               const ThresholdObserver& observer = {});
  static OrderedLogitModel from_json(const nlohmann::json& j);

  ModelKind kind() const override { return ModelKind::ordlog; }
  int num_classes() const override { return static_cast<int>(increments_.size()) + 2; }
  std::vector<double> predict_proba(std::span<const double> x) const override;
  nlohmann::json to_json() const override;

  const Eigen::VectorXd& weights() const { return weights_; }
  const Eigen::VectorXd& increments() const { return increments_; }
  std::vector<double> thresholds() const;

 private:
  Eigen::VectorXd weights_;
  Eigen::VectorXd increments_;
};

// ---------------------------------------------------------------------------
// Nested binary classifiers

/// Binary logistic NLL sum_j softplus(s_j) - t_j s_j plus the l2 penalty on
/// non-bias weights; targets are 0/1.
double binary_logistic_objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& x, std::span<const int> targets,
                                 double l2, Eigen::VectorXd* gradient);

/// Combines exceedance probabilities P(y > k), k = 1..K-1, into a label
/// distribution by differencing with P(y > 0) = 1 and P(y > K) = 0.
/// Negative differences are clipped to zero and the vector renormalised;
/// an all-zero vector becomes uniform.
std::vector<double> combine_exceedance(std::span<const double> exceed);

class NestedBinaryModel final : public OrdinalModel {
 public:
  /// One row per classifier: K-1 rows of D weights.
  NestedBinaryModel(Eigen::MatrixXd classifiers, Standardizer standardizer, TrainConfig config);

  static NestedBinaryModel fit(const OrdinalDataset& data, const TrainConfig& config);
  static NestedBinaryModel from_json(const nlohmann::json& j);

  ModelKind kind() const override { return ModelKind::nest; }
  int num_classes() const override { return static_cast<int>(classifiers_.rows()) + 1; }
  std::vector<double> predict_proba(std::span<const double> x) const override;
  nlohmann::json to_json() const override;

  /// Raw P(y > k | x) for k = 1..K-1.
  std::vector<double> exceedance(std::span<const double> x) const;
  const Eigen::MatrixXd& classifiers() const { return classifiers_; }

 private:
  Eigen::MatrixXd classifiers_;
};

// ---------------------------------------------------------------------------
// Multinomial logistic regression

/// Softmax NLL over W (K x D, row-major flattened) plus the l2 penalty on
/// non-bias weights.
double multinomial_logistic_objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& x, std::span<const int> labels,
                                      int num_classes, double l2, Eigen::VectorXd* gradient);

class MultinomialLogisticModel final : public OrdinalModel {
 public:
  /// K rows of D weights.
  MultinomialLogisticModel(Eigen::MatrixXd class_weights, Standardizer standardizer, TrainConfig config);

  static MultinomialLogisticModel fit(const OrdinalDataset& data, const TrainConfig& config);
  static MultinomialLogisticModel from_json(const nlohmann::json& j);

  ModelKind kind() const override { return ModelKind::logreg; }
  int num_classes() const override { return static_cast<int>(class_weights_.rows()); }
  std::vector<double> predict_proba(std::span<const double> x) const override;
  nlohmann::json to_json() const override;

  const Eigen::MatrixXd& class_weights() const { return class_weights_; }

 private:
  Eigen::MatrixXd class_weights_;
};

}  // namespace storm
