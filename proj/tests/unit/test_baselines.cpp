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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracle.hpp"
#include "storm/baselines.hpp"
#include "storm/evaluation.hpp"
#include "storm/storm_model.hpp"

namespace storm {
namespace {

using testing::finite_difference;
using testing::max_relative_error;

Standardizer identity(Eigen::Index dim) {
  return Standardizer(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
}

TrainConfig config_with(double l2) {
  TrainConfig c;
  c.l2_strength = l2;
  return c;
}

double total(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

OrdinalDataset ordered_line(int n, int num_classes) {
  Eigen::MatrixXd x(n, 1);
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    x(i, 0) = i;
    y.push_back(1 + i * num_classes / n);
  }
  return OrdinalDataset(x, y, num_classes);
}

// ---------------------------------------------------------------------------
// Ordered logit

TEST(OrderedLogit, ProbabilityExamples) {
  const std::vector<double> one = {0.0};
  const auto two = ordered_logit_proba(0.0, one);
  EXPECT_DOUBLE_EQ(two[0], 0.5);
  EXPECT_DOUBLE_EQ(two[1], 0.5);

  const std::vector<double> thresholds = {0.0, 1.0};
  const auto three = ordered_logit_proba(0.0, thresholds);
  EXPECT_NEAR(three[0], 0.5, 1e-6);
  EXPECT_NEAR(three[1], 0.231059, 1e-6);
  EXPECT_NEAR(three[2], 0.268941, 1e-6);

  const auto high = ordered_logit_proba(60.0, thresholds);
  EXPECT_GT(high[2], 1.0 - 1e-12);
  const auto low = ordered_logit_proba(-60.0, thresholds);
  EXPECT_GT(low[0], 1.0 - 1e-12);
}

TEST(OrderedLogit, ProbabilitiesSumToOne) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal(0.0, 5.0);
  for (int trial = 0; trial < 500; ++trial) {
    const auto increments = testing::random_vector(rng, 6, 1.0);
    const auto t = ordered_logit_thresholds(std::vector<double>(increments.data(), increments.data() + 6));
    const auto p = ordered_logit_proba(normal(rng), t);
    ASSERT_EQ(p.size(), 8u);
    for (double v : p) EXPECT_GE(v, 0.0);
    EXPECT_NEAR(total(p), 1.0, 1e-12);
  }
}

TEST(OrderedLogit, ThresholdsFromIncrements) {
  const std::vector<double> inc = {0.0, std::log(2.0)};
  const auto t = ordered_logit_thresholds(inc);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_DOUBLE_EQ(t[0], 0.0);
  EXPECT_DOUBLE_EQ(t[1], 1.0);
  EXPECT_NEAR(t[2], 3.0, 1e-15);
}

TEST(OrderedLogit, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int K : {2, 3, 5, 8}) {
    for (int draw = 0; draw < 20; ++draw) {
      const int D = 3;
      const auto x = testing::random_design(rng, 12, D);
      const auto y = testing::random_labels(rng, 12, K);
      const auto theta = testing::random_vector(rng, D + K - 2, 0.5);
      Eigen::VectorXd g(theta.size());
      ordered_logit_objective(theta, x, y, K, 0.3, &g);
      const auto numeric = finite_difference(
          [&](const Eigen::VectorXd& t) { return ordered_logit_objective(t, x, y, K, 0.3, nullptr); }, theta);
      worst = std::max(worst, max_relative_error(g, numeric));
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(OrderedLogit, ThresholdsStayOrderedAtEveryIterate) {
  const auto data = make_synthetic(ManifoldKind::sine, 100, 6, kDefaultSyntheticNoise, 5);
  int calls = 0;
  bool ordered = true;
  const auto model = OrderedLogitModel::fit(data, config_with(0.1), [&](std::span<const double> t) {
    ++calls;
    if (t.size() != 5 || t[0] != 0.0) ordered = false;
    for (std::size_t k = 1; k < t.size(); ++k) ordered = ordered && t[k] > t[k - 1];
  });
  EXPECT_TRUE(ordered);
  EXPECT_EQ(calls, model.fit_summaries()[0].iterations + 1);
  const auto t = model.thresholds();
  for (std::size_t k = 1; k < t.size(); ++k) EXPECT_GT(t[k], t[k - 1]);
}

TEST(OrderedLogit, PerfectlyOrderedLineIsFitExactly) {
  const auto data = ordered_line(100, 5);
  const auto model = OrderedLogitModel::fit(data, config_with(1e-3));
  const auto pred = model.predict_all(data.features());
  EXPECT_DOUBLE_EQ(macro_mae(data.labels(), pred, 5), 0.0);
}

TEST(OrderedLogit, RowOrderDoesNotChangeTheFit) {
  const auto data = make_synthetic(ManifoldKind::linear, 80, 4, kDefaultSyntheticNoise, 2);
  std::vector<std::size_t> order(80);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::reverse(order.begin(), order.end());
  const auto a = OrderedLogitModel::fit(data, config_with(1.0));
  const auto b = OrderedLogitModel::fit(data.subset(order), config_with(1.0));
  EXPECT_LT((a.weights() - b.weights()).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LT((a.increments() - b.increments()).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(OrderedLogit, SingleClassDataWarns) {
  const OrdinalDataset data(Eigen::MatrixXd::Random(20, 2), std::vector<int>(20, 2), 4);
  const auto model = OrderedLogitModel::fit(data, config_with(1.0));
  ASSERT_FALSE(model.warnings().empty());
  EXPECT_NE(model.warnings().front().find("single class"), std::string::npos);
  const std::vector<double> x = {0.0, 0.0};
  EXPECT_GT(model.predict_proba(x)[1], 0.9);
}

TEST(OrderedLogit, RejectsBadShapes) {
  EXPECT_THROW(OrderedLogitModel(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1), identity(2), {}),
               std::invalid_argument);
  const OrderedLogitModel model(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(1), identity(2), {});
  EXPECT_THROW(model.predict_proba(std::vector<double>{1.0}), std::invalid_argument);
  EXPECT_THROW(ordered_logit_objective(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Ones(1, 2), std::vector<int>{1}, 3,
                                       0.0, nullptr),
               std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Nested binary classifiers

TEST(NestedBinary, CombineExamples) {
  const std::vector<double> p = {0.8};
  const auto two = combine_exceedance(p);
  EXPECT_NEAR(two[0], 0.2, 1e-15);
  EXPECT_NEAR(two[1], 0.8, 1e-15);

  const std::vector<double> crossing = {0.5, 0.7};
  const auto three = combine_exceedance(crossing);
  EXPECT_NEAR(three[0], 0.41667, 1e-5);
  EXPECT_EQ(three[1], 0.0);
  EXPECT_NEAR(three[2], 0.58333, 1e-5);

  const std::vector<double> flat = {0.5, 0.5, 0.5};
  const auto four = combine_exceedance(flat);
  EXPECT_DOUBLE_EQ(four[0], 0.5);
  EXPECT_DOUBLE_EQ(four[1], 0.0);
  EXPECT_DOUBLE_EQ(four[2], 0.0);
  EXPECT_DOUBLE_EQ(four[3], 0.5);
}

TEST(NestedBinary, CombinedVectorIsADistribution) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> exceed(5);
    for (auto& e : exceed) e = unit(rng);
    const auto p = combine_exceedance(exceed);
    for (double v : p) EXPECT_GE(v, 0.0);
    EXPECT_NEAR(total(p), 1.0, 1e-12);
  }
}

TEST(NestedBinary, BinaryGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(10);
  double worst = 0.0;
  for (int draw = 0; draw < 30; ++draw) {
    const auto x = testing::random_design(rng, 15, 4);
    std::vector<int> t;
    for (int y : testing::random_labels(rng, 15, 2)) t.push_back(y - 1);
    const auto w = testing::random_vector(rng, 4, 1.0);
    Eigen::VectorXd g(4);
    binary_logistic_objective(w, x, t, 0.7, &g);
    const auto numeric = finite_difference(
        [&](const Eigen::VectorXd& v) { return binary_logistic_objective(v, x, t, 0.7, nullptr); }, w);
    worst = std::max(worst, max_relative_error(g, numeric));
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(NestedBinary, TwoClassesIsOneLogisticClassifier) {
  const auto data = make_synthetic(ManifoldKind::linear, 60, 2, 0.3, 4);
  const auto model = NestedBinaryModel::fit(data, config_with(1.0));
  ASSERT_EQ(model.classifiers().rows(), 1);
  const auto [standardizer, x] = standardize(data);
  std::vector<int> targets;
  for (int y : data.labels()) targets.push_back(y - 1);
  const auto direct = minimize_lbfgs(
      [&](const Eigen::VectorXd& w, Eigen::VectorXd& g) { return binary_logistic_objective(w, x, targets, 1.0, &g); },
      Eigen::VectorXd::Zero(3));
  EXPECT_EQ(Eigen::VectorXd(model.classifiers().row(0).transpose()), direct.x);
  const std::vector<double> probe = {0.1, -0.2};
  const double p = model.exceedance(probe)[0];
  const auto proba = model.predict_proba(probe);
  EXPECT_NEAR(proba[0], 1.0 - p, 1e-15);
  EXPECT_NEAR(proba[1], p, 1e-15);
}

TEST(NestedBinary, LabelReversalMirrorsClassifiers) {
  const int K = 4;
  const auto data = make_synthetic(ManifoldKind::sine, 80, K, kDefaultSyntheticNoise, 12);
  std::vector<int> reversed;
  for (int y : data.labels()) reversed.push_back(K + 1 - y);
  const OrdinalDataset mirrored(-data.features(), reversed, K);
  const auto a = NestedBinaryModel::fit(data, config_with(1.0));
  const auto b = NestedBinaryModel::fit(mirrored, config_with(1.0));
  const Eigen::Index D = a.classifiers().cols();
  for (int k = 0; k < K - 1; ++k) {
    const auto original = a.classifiers().row(K - 2 - k);
    const auto mirror = b.classifiers().row(k);
    // Standardised features flip sign with the data, so feature weights
    // match and the intercept changes sign.
    for (Eigen::Index d = 0; d + 1 < D; ++d) EXPECT_NEAR(mirror[d], original[d], 1e-5) << "k=" << k;
    EXPECT_NEAR(mirror[D - 1], -original[D - 1], 1e-5) << "k=" << k;
  }
}

TEST(NestedBinary, SingleClassRepartitionWarns) {
  Eigen::MatrixXd x(10, 1);
  for (int i = 0; i < 10; ++i) x(i, 0) = i;
  const OrdinalDataset data(x, {1, 1, 1, 1, 1, 2, 2, 2, 2, 2}, 3);
  const auto model = NestedBinaryModel::fit(data, config_with(1.0));
  bool flagged = false;
  for (const auto& w : model.warnings()) flagged = flagged || w.find("classifier y>2: single class") == 0;
  EXPECT_TRUE(flagged);
  const std::vector<double> probe = {4.5};
  EXPECT_LT(model.exceedance(probe)[1], 0.01);
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression

TEST(MultinomialLogistic, ZeroWeightsAreUniform) {
  const MultinomialLogisticModel model(Eigen::MatrixXd::Zero(5, 3), identity(2), {});
  const std::vector<double> x = {1.5, -3.0};
  for (double p : model.predict_proba(x)) EXPECT_DOUBLE_EQ(p, 0.2);
  EXPECT_EQ(model.predict(x), 1);
}

TEST(MultinomialLogistic, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (int K : {2, 3, 5}) {
    for (int draw = 0; draw < 20; ++draw) {
      const auto x = testing::random_design(rng, 10, 3);
      const auto y = testing::random_labels(rng, 10, K);
      const auto w = testing::random_vector(rng, 3 * K, 0.8);
      Eigen::VectorXd g(w.size());
      multinomial_logistic_objective(w, x, y, K, 0.5, &g);
      const auto numeric = finite_difference(
          [&](const Eigen::VectorXd& v) { return multinomial_logistic_objective(v, x, y, K, 0.5, nullptr); }, w);
      worst = std::max(worst, max_relative_error(g, numeric));
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(MultinomialLogistic, ProbabilitiesSumToOne) {
  const auto data = make_synthetic(ManifoldKind::circle, 100, 5, kDefaultSyntheticNoise, 3);
  const auto model = MultinomialLogisticModel::fit(data, config_with(0.1));
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::VectorXd x = testing::random_vector(rng, 2, 3.0);
    const auto p = model.predict_proba(std::span<const double>(x.data(), 2));
    EXPECT_NEAR(total(p), 1.0, 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Shared behaviour

TEST(Baselines, TwoClassModelsAgree) {
  const auto train = make_synthetic(ManifoldKind::linear, 100, 2, 0.3, 61);
  const auto test = make_synthetic(ManifoldKind::linear, 1000, 2, 0.3, 62);
  std::vector<std::vector<int>> predictions;
  for (auto kind : {ModelKind::storm, ModelKind::ordlog, ModelKind::nest, ModelKind::logreg}) {
    predictions.push_back(fit_model(kind, train, config_with(1.0))->predict_all(test.features()));
  }
  for (std::size_t a = 0; a < predictions.size(); ++a) {
    for (std::size_t b = a + 1; b < predictions.size(); ++b) {
      int same = 0;
      for (std::size_t i = 0; i < predictions[a].size(); ++i) same += predictions[a][i] == predictions[b][i];
      EXPECT_GE(same, 950) << a << " vs " << b;
    }
  }
}

TEST(Baselines, FitsAreDeterministicAndRoundTrip) {
  const auto data = make_synthetic(ManifoldKind::spiral, 80, 4, kDefaultSyntheticNoise, 8);
  for (auto kind : {ModelKind::ordlog, ModelKind::nest, ModelKind::logreg}) {
    const auto a = fit_model(kind, data, config_with(0.5));
    const auto b = fit_model(kind, data, config_with(0.5));
    const auto text = a->to_json().dump();
    EXPECT_EQ(text, b->to_json().dump()) << to_string(kind);
    const auto restored = model_from_json(nlohmann::json::parse(text));
    EXPECT_EQ(restored->kind(), kind);
    EXPECT_EQ(restored->to_json().dump(), text);
    EXPECT_EQ(restored->predict_all(data.features()), a->predict_all(data.features()));
  }
}

TEST(Baselines, CrossValidationRunsForEveryKind) {
  const auto data = make_synthetic(ManifoldKind::linear, 60, 3, kDefaultSyntheticNoise, 1);
  for (auto kind : {ModelKind::ordlog, ModelKind::nest, ModelKind::logreg}) {
    const auto cv = fit_cv(kind, data, kDefaultL2Grid, config_with(1.0));
    EXPECT_EQ(cv.model->kind(), kind);
    EXPECT_TRUE(cv.stratified);
    EXPECT_NE(std::find(kDefaultL2Grid.begin(), kDefaultL2Grid.end(), cv.selected_l2), kDefaultL2Grid.end());
  }
}

}  // namespace
}  // namespace storm
