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

#include "storm/storm_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "json_util.hpp"
#include "storm/batch_inference.hpp"
#include "storm/encoding.hpp"

namespace storm {

namespace {

void check_inputs(const ChainCrfParams& params, const Eigen::MatrixXd& x, std::span<const int> labels, double l2) {
  if (x.cols() != params.dim()) {
    throw std::invalid_argument("storm objective: design matrix has " + std::to_string(x.cols()) +
                                " columns, parameters expect " + std::to_string(params.dim()));
  }
  if (static_cast<Eigen::Index>(labels.size()) != x.rows()) {
    throw std::invalid_argument("storm objective: label count does not match the number of rows");
  }
  for (int y : labels) {
    if (y < 1 || y > params.num_classes()) {
      throw std::invalid_argument("storm objective: label " + std::to_string(y) + " outside 1.." +
                                  std::to_string(params.num_classes()));
    }
  }
  if (!(l2 >= 0.0)) throw std::invalid_argument("storm objective: l2 must be non-negative");
}

}  // namespace

double storm_objective(const ChainCrfParams& params, const Eigen::MatrixXd& x, std::span<const int> labels, double l2,
                       const InferenceMode& mode, Eigen::VectorXd* gradient) {
  check_inputs(params, x, labels, l2);
  const BatchChainInference batch(params, x, mode);
  double value = (batch.log_z() - batch.label_log_scores(labels)).sum();

  const auto& theta = params.values();
  double penalty = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    if (!params.is_bias_coordinate(static_cast<std::size_t>(i))) penalty += theta[i] * theta[i];
  }
  value += 0.5 * l2 * penalty;

  if (gradient != nullptr) {
    ChainCrfParams g(params.num_classes(), params.dim());
    const Eigen::Index rows = x.rows();
    for (int n = 0; n < params.num_nodes(); ++n) {
      Eigen::ArrayXXd residual = batch.node_marginals(n);
      for (Eigen::Index j = 0; j < rows; ++j) residual(j, n + 1 < labels[j] ? 1 : 0) -= 1.0;
      g.node(n) = residual.matrix().transpose() * x;
    }
    for (int e = 0; e < params.num_edges(); ++e) {
      Eigen::ArrayXXd residual = batch.edge_marginals(e);
      for (Eigen::Index j = 0; j < rows; ++j) {
        const int from = e + 1 < labels[j] ? 1 : 0;
        const int to = e + 2 < labels[j] ? 1 : 0;
        residual(j, 2 * from + to) -= 1.0;
      }
      g.edge(e) = residual.matrix().transpose() * x;
    }
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      if (!params.is_bias_coordinate(static_cast<std::size_t>(i))) g.values()[i] += l2 * theta[i];
    }
    *gradient = std::move(g.values());
  }
  return value;
}

double storm_nll(const ChainCrfParams& params, const Eigen::MatrixXd& x, std::span<const int> labels, double l2,
                 const InferenceMode& mode) {
  return storm_objective(params, x, labels, l2, mode, nullptr);
}

ChainCrfParams storm_nll_gradient(const ChainCrfParams& params, const Eigen::MatrixXd& x, std::span<const int> labels,
                                  double l2, const InferenceMode& mode) {
  Eigen::VectorXd grad;
  storm_objective(params, x, labels, l2, mode, &grad);
  return ChainCrfParams(params.num_classes(), params.dim(), std::move(grad));
}

StormModel::StormModel(ChainCrfParams params, Standardizer standardizer, TrainConfig config)
    : OrdinalModel(std::move(standardizer), std::move(config)), params_(std::move(params)) {
  if (params_.dim() != input_dim() + 1) {
    throw std::invalid_argument("StormModel: parameter dimension must be the raw dimension plus one");
  }
}

StormModel StormModel::fit(const OrdinalDataset& data, const TrainConfig& config) {
  config.validate();
  auto [standardizer, x] = standardize(data);
  const int K = data.num_classes();
  const int D = static_cast<int>(x.cols());
  const auto& labels = data.labels();
  const ChainCrfParams zero(K, D);

  const Objective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    const ChainCrfParams p(K, D, theta);
    return storm_objective(p, x, labels, config.l2_strength, config.mode, &grad);
  };
  auto result = minimize_lbfgs(objective, zero.values(), config.minimizer_options());

  StormModel model(ChainCrfParams(K, D, std::move(result.x)), std::move(standardizer), config);
  model.trace_ = std::move(result.trace);
  model.fit_summaries_.push_back({result.iterations, result.status, result.value});
  if (!result.converged()) {
    model.warnings_.push_back(std::string("optimizer stopped: ") + std::string(to_string(result.status)));
  }
  return model;
}

InferenceMode StormModel::constrained_mode() const { return {config_.mode.domain, true}; }

ChainMessages StormModel::messages(std::span<const double> x, const InferenceMode& mode) const {
  const auto z = prepare(x);
  return infer(params_, std::span<const double>(z.data(), static_cast<std::size_t>(z.size())), mode);
}

int StormModel::predict(std::span<const double> x) const {
  if (config_.prediction == PredictionRule::marginal) return OrdinalModel::predict(x);
  const auto z = prepare(x);
  const auto msgs = compute_potentials(params_, std::span<const double>(z.data(), static_cast<std::size_t>(z.size())),
                                       config_.mode);
  return decode_label(nearest_valid_code(viterbi(msgs)));
}

std::vector<double> StormModel::predict_proba(std::span<const double> x) const {
  return label_distribution(messages(x, constrained_mode()));
}

double StormModel::interval_probability(std::span<const double> x, int a, int b) const {
  return interval_query(messages(x, constrained_mode()), a, b);
}

nlohmann::json StormModel::to_json() const {
  auto doc = envelope();
  auto nodes = nlohmann::json::array();
  for (int n = 0; n < params_.num_nodes(); ++n) nodes.push_back(detail::matrix_to_json(params_.node(n)));
  auto edges = nlohmann::json::array();
  for (int e = 0; e < params_.num_edges(); ++e) {
    const auto block = params_.edge(e);
    edges.push_back({detail::matrix_to_json(block.topRows(2)), detail::matrix_to_json(block.bottomRows(2))});
  }
  doc["dim"] = params_.dim();
  doc["node_weights"] = std::move(nodes);
  doc["edge_weights"] = std::move(edges);
  return doc;
}

StormModel StormModel::from_json(const nlohmann::json& j) {
  const int K = j.at("num_classes").get<int>();
  const Eigen::Index raw = j.at("raw_dim").get<Eigen::Index>();
  const int D = static_cast<int>(raw) + 1;
  if (K < 2) throw DataError("model document: num_classes must be >= 2");
  Standardizer standardizer = detail::standardizer_from_json(j);

  ChainCrfParams params(K, D);
  const auto& nodes = j.at("node_weights");
  const auto& edges = j.at("edge_weights");
  if (!nodes.is_array() || static_cast<int>(nodes.size()) != K - 1) {
    throw DataError("model document: node_weights must have K-1 entries");
  }
  if (!edges.is_array() || static_cast<int>(edges.size()) != K - 2) {
    throw DataError("model document: edge_weights must have K-2 entries");
  }
  for (int n = 0; n < K - 1; ++n) params.node(n) = detail::matrix_from_json(nodes[n], 2, D, "node_weights");
  for (int e = 0; e < K - 2; ++e) {
    if (!edges[e].is_array() || edges[e].size() != 2) throw DataError("model document: edge block must be 2 x 2 x D");
    auto block = params.edge(e);
    block.topRows(2) = detail::matrix_from_json(edges[e][0], 2, D, "edge_weights");
    block.bottomRows(2) = detail::matrix_from_json(edges[e][1], 2, D, "edge_weights");
  }
  ChainCrfParams checked(K, D, params.values());
  StormModel model(std::move(checked), std::move(standardizer), train_config_from_json(j.at("train_config")));
  model.warnings_ = j.value("warnings", std::vector<std::string>{});
  return model;
}

}  // namespace storm
