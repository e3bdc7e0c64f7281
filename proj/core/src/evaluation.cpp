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

#include "storm/evaluation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace storm {

namespace {

void check_labels(std::span<const int> y_true, std::span<const int> y_pred, int num_classes) {
  if (y_true.size() != y_pred.size()) {
    throw std::invalid_argument("macro metric: y_true has " + std::to_string(y_true.size()) +
                                " entries, y_pred has " + std::to_string(y_pred.size()));
  }
  if (y_true.empty()) throw std::invalid_argument("macro metric: empty input");
  auto in_range = [num_classes](int y) { return y >= 1 && y <= num_classes; };
  if (!std::all_of(y_true.begin(), y_true.end(), in_range) || !std::all_of(y_pred.begin(), y_pred.end(), in_range)) {
    throw std::invalid_argument("macro metric: labels must lie in 1.." + std::to_string(num_classes));
  }
}

template <typename Loss>
double macro_average(std::span<const int> y_true, std::span<const int> y_pred, int num_classes, Loss loss) {
  check_labels(y_true, y_pred, num_classes);
  std::vector<double> total(static_cast<std::size_t>(num_classes), 0.0);
  std::vector<int> count(static_cast<std::size_t>(num_classes), 0);
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    total[y_true[i] - 1] += loss(y_true[i], y_pred[i]);
    ++count[y_true[i] - 1];
  }
  double sum = 0.0;
  int present = 0;
  for (int k = 0; k < num_classes; ++k) {
    if (count[k] == 0) continue;
    sum += total[k] / count[k];
    ++present;
  }
  return sum / present;
}

// Nemenyi q values: studentized range at infinite df divided by sqrt 2.
constexpr std::array<double, 9> kQ001 = {2.576, 2.913, 3.113, 3.255, 3.364, 3.452, 3.526, 3.590, 3.646};
constexpr std::array<double, 9> kQ005 = {1.960, 2.343, 2.569, 2.728, 2.850, 2.949, 3.031, 3.102, 3.164};
constexpr std::array<double, 9> kQ010 = {1.645, 2.052, 2.291, 2.459, 2.589, 2.693, 2.780, 2.855, 2.920};

}  // namespace

double macro_zero_one(std::span<const int> y_true, std::span<const int> y_pred, int num_classes) {
  return macro_average(y_true, y_pred, num_classes, [](int t, int p) { return t == p ? 0.0 : 1.0; });
}

double macro_mae(std::span<const int> y_true, std::span<const int> y_pred, int num_classes) {
  return macro_average(y_true, y_pred, num_classes, [](int t, int p) { return std::abs(t - p) * 1.0; });
}

std::vector<double> fractional_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double shared = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b, double alpha) {
  if (a.size() != b.size()) throw std::invalid_argument("wilcoxon_signed_rank: samples differ in length");
  if (a.size() < 5) throw std::invalid_argument("wilcoxon_signed_rank: need at least 5 pairs");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("wilcoxon_signed_rank: alpha must be in (0, 1)");

  std::vector<double> diffs;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (!std::isfinite(d)) throw std::invalid_argument("wilcoxon_signed_rank: non-finite score");
    if (d != 0.0) diffs.push_back(d);
  }

  WilcoxonResult result;
  result.n_used = static_cast<int>(diffs.size());
  if (diffs.empty()) {
    result.degenerate = true;
    result.p_value = 1.0;
    return result;
  }

  std::vector<double> magnitudes(diffs.size());
  std::transform(diffs.begin(), diffs.end(), magnitudes.begin(), [](double d) { return std::abs(d); });
  const auto ranks = fractional_ranks(magnitudes);
  for (std::size_t i = 0; i < diffs.size(); ++i) (diffs[i] > 0 ? result.w_plus : result.w_minus) += ranks[i];
  result.statistic = std::min(result.w_plus, result.w_minus);
  const int n = result.n_used;

  if (n <= kWilcoxonExactMaxN) {
    // Doubled ranks are integers even with ties; count subset sums.
    std::vector<int> doubled(ranks.size());
    std::transform(ranks.begin(), ranks.end(), doubled.begin(), [](double r) { return static_cast<int>(std::lround(2 * r)); });
    const int total = std::accumulate(doubled.begin(), doubled.end(), 0);
    std::vector<double> ways(static_cast<std::size_t>(total) + 1, 0.0);
    ways[0] = 1.0;
    int reach = 0;
    for (int r : doubled) {
      for (int s = reach; s >= 0; --s) ways[s + r] += ways[s];
      reach += r;
    }
    const auto threshold = static_cast<int>(std::lround(2 * result.statistic));
    double tail = 0.0;
    for (int s = 0; s <= threshold; ++s) tail += ways[s];
    result.p_value = std::min(1.0, 2.0 * tail / std::ldexp(1.0, n));
    result.exact = true;
  } else {
    const double nn = n;
    const double mean = nn * (nn + 1) / 4.0;
    double tie_term = 0.0;
    std::vector<double> sorted = ranks;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
      const double t = static_cast<double>(j - i);
      tie_term += t * t * t - t;
      i = j;
    }
    const double variance = nn * (nn + 1) * (2 * nn + 1) / 24.0 - tie_term / 48.0;
    const double z = std::max(0.0, (std::abs(result.w_plus - mean) - 0.5) / std::sqrt(variance));
    result.p_value = std::clamp(std::erfc(z / std::sqrt(2.0)), std::numeric_limits<double>::min(), 1.0);
  }
  result.significant = result.p_value <= alpha;
  return result;
}

void ScoreTable::validate() const {
  if (scores.rows() != static_cast<Eigen::Index>(datasets.size()) ||
      scores.cols() != static_cast<Eigen::Index>(models.size())) {
    throw std::invalid_argument("ScoreTable: score matrix shape does not match dataset/model names");
  }
  if (!scores.allFinite()) throw std::invalid_argument("ScoreTable: scores must be finite");
}

std::vector<double> average_ranks(const ScoreTable& table) {
  table.validate();
  if (table.scores.rows() == 0) throw std::invalid_argument("average_ranks: no datasets");
  std::vector<double> mean(table.models.size(), 0.0);
  for (Eigen::Index d = 0; d < table.scores.rows(); ++d) {
    const Eigen::VectorXd row = table.scores.row(d).transpose();
    const auto ranks = fractional_ranks(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
    for (std::size_t m = 0; m < mean.size(); ++m) mean[m] += ranks[m];
  }
  for (double& r : mean) r /= static_cast<double>(table.scores.rows());
  return mean;
}

double nemenyi_q(int n_models, double alpha) {
  if (n_models < 2) throw std::invalid_argument("nemenyi_q: need at least 2 models");
  if (n_models > 10) throw std::invalid_argument("nemenyi_q: tabulated only up to 10 models");
  const auto i = static_cast<std::size_t>(n_models - 2);
  if (std::abs(alpha - 0.01) < 1e-12) return kQ001[i];
  if (std::abs(alpha - 0.05) < 1e-12) return kQ005[i];
  if (std::abs(alpha - 0.10) < 1e-12) return kQ010[i];
  throw std::invalid_argument("nemenyi_q: alpha must be 0.01, 0.05 or 0.10");
}

double critical_difference(int n_models, int n_datasets, double alpha) {
  if (n_datasets < 1) throw std::invalid_argument("critical_difference: need at least one dataset");
  const double m = n_models;
  return nemenyi_q(n_models, alpha) * std::sqrt(m * (m + 1) / (6.0 * n_datasets));
}

CdResult cd_groups(std::span<const double> ranks, double cd) {
  CdResult result;
  result.average_ranks.assign(ranks.begin(), ranks.end());
  result.critical_difference = cd;
  result.alpha = std::numeric_limits<double>::quiet_NaN();

  std::vector<int> order(ranks.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ranks[a] < ranks[b]; });
  int covered_to = -1;
  for (int i = 0; i < static_cast<int>(order.size()); ++i) {
    int j = i;
    while (j + 1 < static_cast<int>(order.size()) && ranks[order[j + 1]] - ranks[order[i]] < cd) ++j;
    if (j <= covered_to) continue;
    result.groups.emplace_back(order.begin() + i, order.begin() + j + 1);
    covered_to = j;
  }
  return result;
}

CdResult critical_difference_analysis(const ScoreTable& table, double alpha) {
  const auto ranks = average_ranks(table);
  const double cd = critical_difference(static_cast<int>(table.models.size()),
                                        static_cast<int>(table.datasets.size()), alpha);
  auto result = cd_groups(ranks, cd);
  result.alpha = alpha;
  return result;
}

nlohmann::json to_json(const WilcoxonResult& r) {
  return {{"statistic", r.statistic}, {"w_plus", r.w_plus},         {"w_minus", r.w_minus},
          {"n_used", r.n_used},       {"p_value", r.p_value},       {"significant", r.significant},
          {"degenerate", r.degenerate}, {"exact", r.exact}};
}

nlohmann::json to_json(const ScoreTable& table) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index d = 0; d < table.scores.rows(); ++d) {
    rows.push_back(std::vector<double>(table.scores.row(d).begin(), table.scores.row(d).end()));
  }
  return {{"metric", table.metric}, {"models", table.models}, {"datasets", table.datasets}, {"scores", rows}};
}

nlohmann::json to_json(const CdResult& r) {
  return {{"average_ranks", r.average_ranks},
          {"critical_difference", r.critical_difference},
          {"alpha", r.alpha},
          {"groups", r.groups}};
}

}  // namespace storm
