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

#include <span>

#include <Eigen/Core>

#include "storm/chain_crf.hpp"
#include "storm/model.hpp"

namespace storm {

/// Negative log-likelihood of encoded labels under the chain CRF plus
/// (l2 / 2) |theta|^2 over non-bias weights. Sum convention: no 1/N.
///
/// `x` is the N x D design matrix with the bias as its last column; labels
/// are in 1..K with K = params.num_classes().
double storm_nll(const ChainCrfParams& params, const Eigen::MatrixXd& x, std::span<const int> labels, double l2,
                 const InferenceMode& mode = {});

/// Gradient of storm_nll, same shape as `params`.
ChainCrfParams storm_nll_gradient(const ChainCrfParams& params, const Eigen::MatrixXd& x, std::span<const int> labels,
                                  double l2, const InferenceMode& mode = {});

/// Objective and (optionally) gradient in one batched inference pass.
double storm_objective(const ChainCrfParams& params, const Eigen::MatrixXd& x, std::span<const int> labels, double l2,
                       const InferenceMode& mode, Eigen::VectorXd* gradient);

/// The structured ordinal regressor: a heterogeneous chain CRF over the
/// cumulative code of the label.
class StormModel final : public OrdinalModel {
 public:
  StormModel(ChainCrfParams params, Standardizer standardizer, TrainConfig config);

  /// Standardises, appends the bias, starts from all-zero weights and
  /// minimises the penalised NLL with L-BFGS.
  static StormModel fit(const OrdinalDataset& data, const TrainConfig& config);

  static StormModel from_json(const nlohmann::json& j);

  ModelKind kind() const override { return ModelKind::storm; }
  int num_classes() const override { return params_.num_classes(); }

  /// Viterbi rule: decode the best path under config().mode, repair to the
  /// nearest valid code, decode. Marginal rule: argmax of predict_proba.
  int predict(std::span<const double> x) const override;

  /// Label distribution under constrained inference.
  std::vector<double> predict_proba(std::span<const double> x) const override;

  double interval_probability(std::span<const double> x, int a, int b) const override;

  nlohmann::json to_json() const override;

  /// Completed messages for a raw feature row under `mode`.
  ChainMessages messages(std::span<const double> x, const InferenceMode& mode) const;

  const ChainCrfParams& params() const { return params_; }

  /// Objective value at the start point and at each accepted iterate.
  const std::vector<double>& objective_trace() const { return trace_; }

 private:
  InferenceMode constrained_mode() const;

  ChainCrfParams params_;
  std::vector<double> trace_;
};

}  // namespace storm
