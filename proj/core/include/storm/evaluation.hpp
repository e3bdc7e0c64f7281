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

// Scoring and multi-model comparison statistics.

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

namespace storm {

/// Per-class 0/1 error averaged over the classes present in `y_true`.
double macro_zero_one(std::span<const int> y_true, std::span<const int> y_pred, int num_classes);

/// Per-class mean |y - y_hat| averaged over the classes present in `y_true`.
double macro_mae(std::span<const int> y_true, std::span<const int> y_pred, int num_classes);

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  int n_used = 0;  // pairs left after dropping zero differences
  double p_value = 1.0;
  bool significant = false;
  bool degenerate = false;  // every difference was zero
  bool exact = false;
};

/// Largest reduced sample size that uses the exact null distribution.
inline constexpr int kWilcoxonExactMaxN = 25;

/// Two-sided Wilcoxon signed-rank test of paired samples.
///
/// Zero differences are dropped, tied |differences| share their average
/// rank. For n <= 25 the p-value comes from the exact permutation
/// distribution of the (possibly tied) ranks; above that, the normal
/// approximation with tie-corrected variance and continuity correction.
/// Requires at least 5 pairs.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha = 0.01);

/// Ranks with 1 = smallest; ties get the mean of the ranks they span.
std::vector<double> fractional_ranks(std::span<const double> values);

/// Scores of several models over several datasets; lower is better.
struct ScoreTable {
  std::vector<std::string> models;
  std::vector<std::string> datasets;
  Eigen::MatrixXd scores;  // datasets x models
  std::string metric;

  void validate() const;
};

/// Mean over datasets of each model's within-dataset rank.
std::vector<double> average_ranks(const ScoreTable& table);

/// Nemenyi critical value q_alpha (studentized range over sqrt 2) for
/// 2..10 models and alpha in {0.01, 0.05, 0.10}.
double nemenyi_q(int n_models, double alpha);

/// q_alpha * sqrt(m (m + 1) / (6 N)).
double critical_difference(int n_models, int n_datasets, double alpha = 0.01);

struct CdResult {
  std::vector<double> average_ranks;
  double critical_difference = 0.0;
  double alpha = 0.0;
  /// Maximal runs of models (in rank order) whose rank spread is below CD.
  /// Singletons are included so every model appears.
  std::vector<std::vector<int>> groups;
};

CdResult cd_groups(std::span<const double> ranks, double cd);

/// Average ranks, critical difference and groups of a score table.
CdResult critical_difference_analysis(const ScoreTable& table, double alpha = 0.01);

nlohmann::json to_json(const WilcoxonResult& result);
nlohmann::json to_json(const ScoreTable& table);
nlohmann::json to_json(const CdResult& result);

}  // namespace storm
