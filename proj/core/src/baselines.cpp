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

#include "storm/baselines.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "json_util.hpp"
#include "storm/numeric.hpp"

namespace storm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Adds (l2 / 2) |w|^2 over `count` entries starting at 0, skipping every
/// D-th (bias) coordinate.
double add_penalty(const Eigen::VectorXd& w, Eigen::Index count, Eigen::Index dim, double l2, Eigen::VectorXd* grad) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < count; ++i) {
    if (i % dim == dim - 1) continue;
    total += w[i] * w[i];
    if (grad != nullptr) (*grad)[i] += l2 * w[i];
  }
  return 0.5 * l2 * total;
}

void check_design(const Eigen::MatrixXd& x, Eigen::Index rows, const char* who) {
  if (x.rows() != rows) throw std::invalid_argument(std::string(who) + ": label count does not match rows");
  if (x.cols() < 1) throw std::invalid_argument(std::string(who) + ": empty design matrix");
}

void check_labels(std::span<const int> labels, int num_classes, const char* who) {
  for (int y : labels) {
    if (y < 1 || y > num_classes) {
      throw std::invalid_argument(std::string(who) + ": label " + std::to_string(y) + " outside 1.." +
                                  std::to_string(num_classes));
    }
  }
}

void record_fit(std::vector<FitSummary>& summaries, std::vector<std::string>& warnings, const MinimizerResult& r,
                const std::string& what) {
  summaries.push_back({r.iterations, r.status, r.value});
  if (!r.converged()) warnings.push_back(what + "optimizer stopped: " + std::string(to_string(r.status)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Ordered logit

std::vector<double> ordered_logit_thresholds(std::span<const double> increments) {
  std::vector<double> t(increments.size() + 1, 0.0);
  for (std::size_t i = 0; i < increments.size(); ++i) t[i + 1] = t[i] + std::exp(increments[i]);
  return t;
}

std::vector<double> ordered_logit_proba(double score, std::span<const double> thresholds) {
  if (thresholds.empty()) throw std::invalid_argument("ordered_logit_proba: need at least one threshold");
  const std::size_t K = thresholds.size() + 1;
  std::vector<double> p(K);
  double below = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double cdf = k + 1 < K ? sigmoid(thresholds[k] - score) : 1.0;
    p[k] = std::max(0.0, cdf - below);
    below = cdf;
  }
  return p;
}

double ordered_logit_objective(const Eigen::VectorXd& theta, const Eigen::MatrixXd& x, std::span<const int> labels,
                               int num_classes, double l2, Eigen::VectorXd* gradient) {
  if (num_classes < 2) throw std::invalid_argument("ordered logit: need K >= 2");
  const Eigen::Index D = x.cols();
  check_design(x, static_cast<Eigen::Index>(labels.size()), "ordered logit");
  check_labels(labels, num_classes, "ordered logit");
  if (theta.size() != D + num_classes - 2) {
    throw std::invalid_argument("ordered logit: parameter vector must have D + K - 2 entries");
  }

  const auto w = theta.head(D);
  const Eigen::VectorXd inc = theta.tail(num_classes - 2);
  const auto t = ordered_logit_thresholds(std::span<const double>(inc.data(), static_cast<std::size_t>(inc.size())));
  const Eigen::VectorXd s = x * w;

  Eigen::VectorXd grad_s(x.rows());
  std::vector<double> grad_t(t.size(), 0.0);
  double value = 0.0;
  for (Eigen::Index j = 0; j < x.rows(); ++j) {
    const int y = labels[static_cast<std::size_t>(j)];
    const double a = y < num_classes ? t[y - 1] - s[j] : kInf;
    const double b = y > 1 ? t[y - 2] - s[j] : -kInf;
    double logp = 0.0;
    double ga = 0.0;
    double gb = 0.0;
    if (y == num_classes && y == 1) {
      logp = 0.0;
    } else if (y == num_classes) {
      logp = log_sigmoid(-b);
      gb = -sigmoid(b);
    } else if (y == 1) {
      logp = log_sigmoid(a);
      ga = sigmoid(-a);
    } else {
      const double gap = std::expm1(a - b);
      logp = log_sigmoid(a) + log_sigmoid(-b) + std::log(-std::expm1(b - a));
      ga = sigmoid(-a) + 1.0 / gap;
      gb = -sigmoid(b) - 1.0 / gap;
    }
    value -= logp;
    grad_s[j] = ga + gb;
    if (y < num_classes) grad_t[y - 1] -= ga;
    if (y > 1) grad_t[y - 2] -= gb;
  }

  if (gradient != nullptr) {
    gradient->setZero(theta.size());
    gradient->head(D) = x.transpose() * grad_s;
    double suffix = 0.0;
    for (Eigen::Index i = num_classes - 3; i >= 0; --i) {
      suffix += grad_t[static_cast<std::size_t>(i + 1)];
      (*gradient)[D + i] = std::exp(inc[i]) * suffix;
    }
  }
  return value + add_penalty(theta, D, D, l2, gradient);
}

OrderedLogitModel::OrderedLogitModel(Eigen::VectorXd weights, Eigen::VectorXd increments, Standardizer standardizer,
                                     TrainConfig config)
    : OrdinalModel(std::move(standardizer), std::move(config)),
      weights_(std::move(weights)),
      increments_(std::move(increments)) {
  if (weights_.size() != input_dim() + 1) {
    throw std::invalid_argument("OrderedLogitModel: weights must have raw dimension plus one entries");
  }
  if (!weights_.allFinite() || !increments_.allFinite()) {
    throw std::invalid_argument("OrderedLogitModel: non-finite parameters");
  }
}

std::vector<double> OrderedLogitModel::thresholds() const {
  return ordered_logit_thresholds(
      std::span<const double>(increments_.data(), static_cast<std::size_t>(increments_.size())));
}

OrderedLogitModel OrderedLogitModel::fit(const OrdinalDataset& data, const TrainConfig& config,
                                         const ThresholdObserver& observer) {
  config.validate();
  auto [standardizer, x] = standardize(data);
  const int K = data.num_classes();
  const Eigen::Index D = x.cols();
  const auto& labels = data.labels();

  const Objective objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    return ordered_logit_objective(theta, x, labels, K, config.l2_strength, &grad);
  };
  IterateObserver watch;
  if (observer) {
    watch = [&](const Eigen::VectorXd& theta, double) {
      const Eigen::VectorXd inc = theta.tail(K - 2);
      const auto t = ordered_logit_thresholds(std::span<const double>(inc.data(), static_cast<std::size_t>(inc.size())));
      observer(t);
    };
  }
  auto result = minimize_lbfgs(objective, Eigen::VectorXd::Zero(D + K - 2), config.minimizer_options(), watch);

  OrderedLogitModel model(result.x.head(D), result.x.tail(K - 2), std::move(standardizer), config);
  record_fit(model.fit_summaries_, model.warnings_, result, "");
  if (std::set<int>(labels.begin(), labels.end()).size() < 2) {
    model.warnings_.push_back("single class in training data; thresholds pushed outward");
  }
  return model;
}

std::vector<double> OrderedLogitModel::predict_proba(std::span<const double> x) const {
  const auto z = prepare(x);
  return ordered_logit_proba(z.dot(weights_), thresholds());
}

nlohmann::json OrderedLogitModel::to_json() const {
  auto doc = envelope();
  doc["weights"] = detail::vector_to_json(weights_);
  doc["threshold_increments"] = detail::vector_to_json(increments_);
  return doc;
}

OrderedLogitModel OrderedLogitModel::from_json(const nlohmann::json& j) {
  const int K = j.at("num_classes").get<int>();
  if (K < 2) throw DataError("model document: num_classes must be >= 2");
  auto standardizer = detail::standardizer_from_json(j);
  auto w = detail::vector_from_json(j.at("weights"), standardizer.input_dim() + 1, "weights");
  auto inc = detail::vector_from_json(j.at("threshold_increments"), K - 2, "threshold_increments");
  OrderedLogitModel model(std::move(w), std::move(inc), std::move(standardizer),
                          train_config_from_json(j.at("train_config")));
  model.warnings_ = j.value("warnings", std::vector<std::string>{});
  return model;
}

// ---------------------------------------------------------------------------
// Nested binary classifiers

double binary_logistic_objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& x, std::span<const int> targets,
                                 double l2, Eigen::VectorXd* gradient) {
  check_design(x, static_cast<Eigen::Index>(targets.size()), "binary logistic");
  if (w.size() != x.cols()) throw std::invalid_argument("binary logistic: weight length must equal D");
  const Eigen::VectorXd s = x * w;
  Eigen::VectorXd residual(s.size());
  double value = 0.0;
  for (Eigen::Index j = 0; j < s.size(); ++j) {
    const int t = targets[static_cast<std::size_t>(j)];
    if (t != 0 && t != 1) throw std::invalid_argument("binary logistic: targets must be 0 or 1");
    value += softplus(s[j]) - t * s[j];
    residual[j] = sigmoid(s[j]) - t;
  }
  if (gradient != nullptr) *gradient = x.transpose() * residual;
  return value + add_penalty(w, w.size(), w.size(), l2, gradient);
}

std::vector<double> combine_exceedance(std::span<const double> exceed) {
  const std::size_t K = exceed.size() + 1;
  std::vector<double> p(K);
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double upper = k == 0 ? 1.0 : exceed[k - 1];
    const double lower = k + 1 < K ? exceed[k] : 0.0;
    p[k] = std::max(0.0, upper - lower);
    total += p[k];
  }
  if (total <= 0.0) return std::vector<double>(K, 1.0 / static_cast<double>(K));
  for (auto& v : p) v /= total;
  return p;
}

NestedBinaryModel::NestedBinaryModel(Eigen::MatrixXd classifiers, Standardizer standardizer, TrainConfig config)
    : OrdinalModel(std::move(standardizer), std::move(config)), classifiers_(std::move(classifiers)) {
  if (classifiers_.rows() < 1 || classifiers_.cols() != input_dim() + 1) {
    throw std::invalid_argument("NestedBinaryModel: need K-1 classifiers of raw dimension plus one weights");
  }
  if (!classifiers_.allFinite()) throw std::invalid_argument("NestedBinaryModel: non-finite weights");
}

NestedBinaryModel NestedBinaryModel::fit(const OrdinalDataset& data, const TrainConfig& config) {
  config.validate();
  if (data.rows() < 1) throw std::invalid_argument("NestedBinaryModel::fit: need at least one instance");
  auto [standardizer, x] = standardize(data);
  const int K = data.num_classes();
  const Eigen::Index D = x.cols();

  Eigen::MatrixXd classifiers(K - 1, D);
  std::vector<FitSummary> summaries;
  std::vector<std::string> warnings;
  std::vector<int> targets(data.labels().size());
  for (int k = 1; k < K; ++k) {
    int positives = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      targets[j] = data.labels()[j] > k ? 1 : 0;
      positives += targets[j];
    }
    const Objective objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
      return binary_logistic_objective(w, x, targets, config.l2_strength, &grad);
    };
    const auto result = minimize_lbfgs(objective, Eigen::VectorXd::Zero(D), config.minimizer_options());
    classifiers.row(k - 1) = result.x.transpose();
    const std::string tag = "classifier y>" + std::to_string(k) + ": ";
    record_fit(summaries, warnings, result, tag);
    if (positives == 0 || positives == static_cast<int>(targets.size())) {
      warnings.push_back(tag + "single class in repartition; intercept-only classifier");
    }
  }
  NestedBinaryModel model(std::move(classifiers), std::move(standardizer), config);
  model.fit_summaries_ = std::move(summaries);
  model.warnings_ = std::move(warnings);
  return model;
}

std::vector<double> NestedBinaryModel::exceedance(std::span<const double> x) const {
  const Eigen::VectorXd s = classifiers_ * prepare(x);
  std::vector<double> out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index k = 0; k < s.size(); ++k) out[static_cast<std::size_t>(k)] = sigmoid(s[k]);
  return out;
}

std::vector<double> NestedBinaryModel::predict_proba(std::span<const double> x) const {
  return combine_exceedance(exceedance(x));
}

nlohmann::json NestedBinaryModel::to_json() const {
  auto doc = envelope();
  doc["classifiers"] = detail::matrix_to_json(classifiers_);
  return doc;
}

NestedBinaryModel NestedBinaryModel::from_json(const nlohmann::json& j) {
  const int K = j.at("num_classes").get<int>();
  if (K < 2) throw DataError("model document: num_classes must be >= 2");
  auto standardizer = detail::standardizer_from_json(j);
  auto c = detail::matrix_from_json(j.at("classifiers"), K - 1, standardizer.input_dim() + 1, "classifiers");
  NestedBinaryModel model(std::move(c), std::move(standardizer), train_config_from_json(j.at("train_config")));
  model.warnings_ = j.value("warnings", std::vector<std::string>{});
  return model;
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression

double multinomial_logistic_objective(const Eigen::VectorXd& w, const Eigen::MatrixXd& x, std::span<const int> labels,
                                      int num_classes, double l2, Eigen::VectorXd* gradient) {
  check_design(x, static_cast<Eigen::Index>(labels.size()), "multinomial logistic");
  check_labels(labels, num_classes, "multinomial logistic");
  const Eigen::Index D = x.cols();
  if (w.size() != num_classes * D) throw std::invalid_argument("multinomial logistic: weights must be K x D");
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMatrix> W(w.data(), num_classes, D);

  Eigen::MatrixXd scores = x * W.transpose();
  double value = 0.0;
  for (Eigen::Index j = 0; j < scores.rows(); ++j) {
    const double hi = scores.row(j).maxCoeff();
    const double lse = hi + std::log((scores.row(j).array() - hi).exp().sum());
    value += lse - scores(j, labels[static_cast<std::size_t>(j)] - 1);
    scores.row(j) = (scores.row(j).array() - lse).exp().matrix();
    scores(j, labels[static_cast<std::size_t>(j)] - 1) -= 1.0;
  }
  if (gradient != nullptr) {
    gradient->resize(w.size());
    Eigen::Map<RowMatrix>(gradient->data(), num_classes, D) = scores.transpose() * x;
  }
  return value + add_penalty(w, w.size(), D, l2, gradient);
}

MultinomialLogisticModel::MultinomialLogisticModel(Eigen::MatrixXd class_weights, Standardizer standardizer,
                                                   TrainConfig config)
    : OrdinalModel(std::move(standardizer), std::move(config)), class_weights_(std::move(class_weights)) {
  if (class_weights_.rows() < 2 || class_weights_.cols() != input_dim() + 1) {
    throw std::invalid_argument("MultinomialLogisticModel: need K >= 2 rows of raw dimension plus one weights");
  }
  if (!class_weights_.allFinite()) throw std::invalid_argument("MultinomialLogisticModel: non-finite weights");
}

MultinomialLogisticModel MultinomialLogisticModel::fit(const OrdinalDataset& data, const TrainConfig& config) {
  config.validate();
  auto [standardizer, x] = standardize(data);
  const int K = data.num_classes();
  const Eigen::Index D = x.cols();
  const auto& labels = data.labels();
  const Objective objective = [&](const Eigen::VectorXd& w, Eigen::VectorXd& grad) {
    return multinomial_logistic_objective(w, x, labels, K, config.l2_strength, &grad);
  };
  const auto result = minimize_lbfgs(objective, Eigen::VectorXd::Zero(K * D), config.minimizer_options());
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::MatrixXd weights = Eigen::Map<const RowMatrix>(result.x.data(), K, D);
  MultinomialLogisticModel model(std::move(weights), std::move(standardizer), config);
  record_fit(model.fit_summaries_, model.warnings_, result, "");
  return model;
}

std::vector<double> MultinomialLogisticModel::predict_proba(std::span<const double> x) const {
  const Eigen::VectorXd s = class_weights_ * prepare(x);
  const double lse = log_sum_exp(std::span<const double>(s.data(), static_cast<std::size_t>(s.size())));
  std::vector<double> p(static_cast<std::size_t>(s.size()));
  for (Eigen::Index k = 0; k < s.size(); ++k) p[static_cast<std::size_t>(k)] = std::exp(s[k] - lse);
  return p;
}

nlohmann::json MultinomialLogisticModel::to_json() const {
  auto doc = envelope();
  doc["class_weights"] = detail::matrix_to_json(class_weights_);
  return doc;
}

MultinomialLogisticModel MultinomialLogisticModel::from_json(const nlohmann::json& j) {
  const int K = j.at("num_classes").get<int>();
  if (K < 2) throw DataError("model document: num_classes must be >= 2");
  auto standardizer = detail::standardizer_from_json(j);
  auto w = detail::matrix_from_json(j.at("class_weights"), K, standardizer.input_dim() + 1, "class_weights");
  MultinomialLogisticModel model(std::move(w), std::move(standardizer), train_config_from_json(j.at("train_config")));
  model.warnings_ = j.value("warnings", std::vector<std::string>{});
  return model;
}

}  // namespace storm
