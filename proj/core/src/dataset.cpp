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

#include "storm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include "storm/rng.hpp"

namespace storm {

// ---------------------------------------------------------------------------
// OrdinalDataset

OrdinalDataset::OrdinalDataset(Eigen::MatrixXd features, std::vector<int> labels, int num_classes,
                               std::string provenance, std::vector<std::string> feature_names)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      num_classes_(num_classes),
      provenance_(std::move(provenance)),
      feature_names_(std::move(feature_names)) {
  if (num_classes_ < 2) {
    throw DataError("OrdinalDataset: K must be at least 2, got " + std::to_string(num_classes_));
  }
  if (static_cast<std::size_t>(features_.rows()) != labels_.size()) {
    throw DataError("OrdinalDataset: " + std::to_string(features_.rows()) + " feature rows but " +
                    std::to_string(labels_.size()) + " labels");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 1 || labels_[i] > num_classes_) {
      throw DataError("OrdinalDataset: row " + std::to_string(i) + " has label " + std::to_string(labels_[i]) +
                      " outside 1.." + std::to_string(num_classes_));
    }
  }
  if (!features_.allFinite()) {
    throw DataError("OrdinalDataset: features must be finite");
  }
  if (feature_names_.empty()) {
    for (Eigen::Index d = 0; d < features_.cols(); ++d) feature_names_.push_back("x" + std::to_string(d + 1));
  } else if (static_cast<Eigen::Index>(feature_names_.size()) != features_.cols()) {
    throw DataError("OrdinalDataset: feature name count does not match columns");
  }
}

OrdinalDataset OrdinalDataset::subset(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), features_.cols());
  std::vector<int> y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= labels_.size()) throw std::out_of_range("OrdinalDataset::subset: row index out of range");
    x.row(static_cast<Eigen::Index>(i)) = features_.row(static_cast<Eigen::Index>(rows[i]));
    y[i] = labels_[rows[i]];
  }
  return OrdinalDataset(std::move(x), std::move(y), num_classes_, provenance_, feature_names_);
}

OrdinalDataset OrdinalDataset::with_features(Eigen::MatrixXd features, std::vector<std::string> names) const {
  return OrdinalDataset(std::move(features), labels_, num_classes_, provenance_, std::move(names));
}

// ---------------------------------------------------------------------------
// Synthetic manifolds

ManifoldKind parse_manifold(std::string_view name) {
  if (name == "linear") return ManifoldKind::linear;
  if (name == "sine") return ManifoldKind::sine;
  if (name == "circle") return ManifoldKind::circle;
  if (name == "spiral") return ManifoldKind::spiral;
  throw std::invalid_argument("unknown manifold kind '" + std::string(name) +
                              "' (expected linear, sine, circle or spiral)");
}

std::string_view to_string(ManifoldKind kind) {
  switch (kind) {
    case ManifoldKind::linear:
      return "linear";
    case ManifoldKind::sine:
      return "sine";
    case ManifoldKind::circle:
      return "circle";
    case ManifoldKind::spiral:
      return "spiral";
  }
  return "unknown";
}

OrdinalDataset make_synthetic(ManifoldKind kind, int n, int num_classes, double noise, std::uint64_t seed) {
  if (num_classes < 2) throw std::invalid_argument("make_synthetic: K must be at least 2");
  if (n < num_classes) throw std::invalid_argument("make_synthetic: need n >= K");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw std::invalid_argument("make_synthetic: noise must be >= 0");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd x(n, 2);
  std::vector<int> y(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double t = (i + unit(rng)) / n;
    y[i] = std::min(1 + static_cast<int>(std::floor(t * num_classes)), num_classes);
    double px = 0.0;
    double py = 0.0;
    switch (kind) {
      case ManifoldKind::linear:
        px = 2.0 * t - 1.0;
        py = 2.0 * t - 1.0;
        break;
      case ManifoldKind::sine:
        px = 2.0 * t - 1.0;
        py = 0.8 * std::sin(two_pi * t);
        break;
      case ManifoldKind::circle: {
        const double r = 0.2 + 0.8 * t;
        const double angle = two_pi * unit(rng);
        px = r * std::cos(angle);
        py = r * std::sin(angle);
        break;
      }
      case ManifoldKind::spiral: {
        const double r = 0.1 + 0.9 * t;
        px = r * std::cos(2.0 * two_pi * t);
        py = r * std::sin(2.0 * two_pi * t);
        break;
      }
    }
    if (noise > 0.0) {
      px += noise * gauss(rng);
      py += noise * gauss(rng);
    }
    x(i, 0) = px;
    x(i, 1) = py;
  }

  std::vector<std::size_t> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::string tag = "synthetic:" + std::string(to_string(kind)) + ":K=" + std::to_string(num_classes);
  return OrdinalDataset(std::move(x), std::move(y), num_classes, tag).subset(order);
}

// ---------------------------------------------------------------------------
// Binning

std::vector<int> equal_frequency_binning(std::span<const double> targets, int num_classes) {
  if (num_classes < 2) throw std::invalid_argument("equal_frequency_binning: K must be at least 2");
  const std::size_t n = targets.size();
  if (n < static_cast<std::size_t>(num_classes)) {
    throw DataError("equal_frequency_binning: need at least K targets, got " + std::to_string(n));
  }
  std::vector<double> sorted(targets.begin(), targets.end());
  if (std::any_of(sorted.begin(), sorted.end(), [](double v) { return !std::isfinite(v); })) {
    throw DataError("equal_frequency_binning: targets must be finite");
  }
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> distinct = sorted;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const int m = static_cast<int>(distinct.size());
  if (m < num_classes) {
    throw DataError("equal_frequency_binning: only " + std::to_string(m) + " distinct target values for K = " +
                    std::to_string(num_classes));
  }

  std::vector<double> edges;
  int prev = -1;
  for (int i = 1; i < num_classes; ++i) {
    // Rank ceil(i N / K), 1-based.
    const std::size_t rank = (static_cast<std::size_t>(i) * n + num_classes - 1) / num_classes;
    const double quantile = sorted[rank - 1];
    int idx = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), quantile) - distinct.begin());
    idx = std::max(idx, prev + 1);
    idx = std::min(idx, m - (num_classes - i) - 1);
    edges.push_back(distinct[idx]);
    prev = idx;
  }

  std::vector<int> labels(n);
  for (std::size_t j = 0; j < n; ++j) {
    labels[j] = 1 + static_cast<int>(std::lower_bound(edges.begin(), edges.end(), targets[j]) - edges.begin());
  }
  return labels;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

std::string where(const std::filesystem::path& path, std::size_t line, std::size_t column) {
  return path.string() + ":" + std::to_string(line) + ": column " + std::to_string(column + 1);
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

namespace {

struct RawTable {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<double> labels;
  std::vector<std::size_t> label_lines;
  std::size_t label_column = 0;
  bool has_label = false;
};

RawTable read_table(const std::filesystem::path& path, const std::string& label_column, bool require_label) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open CSV file " + path.string());

  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError(path.string() + ": file is empty");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_commas(line);
  RawTable table;
  table.label_column = header.size();
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == label_column && !table.has_label) {
      table.label_column = c;
      table.has_label = true;
    } else {
      table.names.emplace_back(header[c]);
    }
  }
  if (require_label && !table.has_label) {
    throw DataError(path.string() + ": header has no label column '" + label_column + "'");
  }

  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double v = 0.0;
      const auto cell = cells[c];
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw DataError(where(path, line_no, c) + ": '" + std::string(cell) + "' is not a number");
      }
      if (!std::isfinite(v)) throw DataError(where(path, line_no, c) + ": value is not finite");
      if (table.has_label && c == table.label_column) {
        table.labels.push_back(v);
        table.label_lines.push_back(line_no);
      } else {
        table.values.push_back(v);
      }
    }
    ++rows;
  }
  if (rows == 0) throw DataError(path.string() + ": no data rows");
  return table;
}

Eigen::MatrixXd to_matrix(const std::vector<double>& values, std::size_t cols) {
  const auto d = static_cast<Eigen::Index>(cols);
  const auto n = d == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(values.size()) / d;
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = values[static_cast<std::size_t>(i * d + j)];
  }
  return x;
}

}  // namespace

OrdinalDataset load_csv(const std::filesystem::path& path, const std::string& label_column, int num_classes) {
  auto table = read_table(path, label_column, true);
  std::vector<int> labels;
  labels.reserve(table.labels.size());
  for (std::size_t i = 0; i < table.labels.size(); ++i) {
    const double v = table.labels[i];
    if (v != std::floor(v) || v < 1 || v > num_classes) {
      throw DataError(where(path, table.label_lines[i], table.label_column) + ": label " + format_real(v) +
                      " outside 1.." + std::to_string(num_classes));
    }
    labels.push_back(static_cast<int>(v));
  }
  if (table.names.empty()) throw DataError(path.string() + ": no feature columns");
  auto x = to_matrix(table.values, table.names.size());
  return OrdinalDataset(std::move(x), std::move(labels), num_classes, "csv:" + path.string(), std::move(table.names));
}

FeatureTable load_feature_csv(const std::filesystem::path& path, const std::string& drop_column) {
  auto table = read_table(path, drop_column, false);
  if (table.names.empty()) throw DataError(path.string() + ": no feature columns");
  return {to_matrix(table.values, table.names.size()), std::move(table.names)};
}

std::string to_csv(const OrdinalDataset& data, const std::string& label_column) {
  std::ostringstream out;
  for (const auto& name : data.feature_names()) out << name << ',';
  out << label_column << '\n';
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << format_real(data.features()(i, j)) << ',';
    out << data.labels()[static_cast<std::size_t>(i)] << '\n';
  }
  return out.str();
}

void save_csv(const OrdinalDataset& data, const std::filesystem::path& path, const std::string& label_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write CSV file " + path.string());
  out << to_csv(data, label_column);
  if (!out) throw DataError("failed writing CSV file " + path.string());
}

// ---------------------------------------------------------------------------
// Standardizer

Standardizer::Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale)
    : mean_(std::move(mean)), scale_(std::move(scale)) {
  if (mean_.size() != scale_.size()) throw std::invalid_argument("Standardizer: mean/scale size mismatch");
  if ((scale_.array() <= 0.0).any() || !scale_.allFinite() || !mean_.allFinite()) {
    throw std::invalid_argument("Standardizer: scales must be positive and finite");
  }
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& features) {
  if (features.rows() == 0) throw std::invalid_argument("Standardizer::fit: no rows");
  const Eigen::VectorXd mean = features.colwise().mean();
  Eigen::VectorXd scale(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) {
    const double var = (features.col(j).array() - mean[j]).square().mean();
    const double sd = std::sqrt(var);
    scale[j] = sd > 1e-12 * std::max(1.0, std::abs(mean[j])) ? sd : 1.0;
  }
  return Standardizer(mean, scale);
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& features) const {
  if (features.cols() != mean_.size()) {
    throw std::invalid_argument("Standardizer::apply: expected " + std::to_string(mean_.size()) +
                                " features, got " + std::to_string(features.cols()));
  }
  Eigen::MatrixXd out(features.rows(), features.cols() + 1);
  out.leftCols(features.cols()) =
      (features.rowwise() - mean_.transpose()).array().rowwise() / scale_.transpose().array();
  out.col(features.cols()).setOnes();
  return out;
}

Eigen::VectorXd Standardizer::apply_row(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != mean_.size()) {
    throw std::invalid_argument("Standardizer::apply_row: expected " + std::to_string(mean_.size()) +
                                " features, got " + std::to_string(x.size()));
  }
  Eigen::VectorXd out(mean_.size() + 1);
  for (Eigen::Index j = 0; j < mean_.size(); ++j) {
    if (!std::isfinite(x[static_cast<std::size_t>(j)])) {
      throw std::invalid_argument("Standardizer::apply_row: feature " + std::to_string(j) + " is not finite");
    }
    out[j] = (x[static_cast<std::size_t>(j)] - mean_[j]) / scale_[j];
  }
  out[mean_.size()] = 1.0;
  return out;
}

std::pair<Standardizer, Eigen::MatrixXd> standardize(const OrdinalDataset& train) {
  auto transformer = Standardizer::fit(train.features());
  auto transformed = transformer.apply(train.features());
  return {std::move(transformer), std::move(transformed)};
}

// ---------------------------------------------------------------------------
// Splits and folds

TrainTestSplit random_split_at(const OrdinalDataset& data, const SplitSpec& spec, int repetition) {
  if (spec.train_size < spec.n_cv_folds) throw std::invalid_argument("random_split: train_size < n_cv_folds");
  if (spec.train_size >= data.rows()) {
    throw std::invalid_argument("random_split: train_size must leave at least one test row");
  }
  if (repetition < 0) throw std::invalid_argument("random_split: negative repetition");
  Rng rng(derive_seed(spec.seed, stable_hash("random_split"), static_cast<std::uint64_t>(repetition)));
  std::vector<std::size_t> order(static_cast<std::size_t>(data.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const auto cut = order.begin() + spec.train_size;
  std::vector<std::size_t> train(order.begin(), cut);
  std::vector<std::size_t> test(cut, order.end());
  return {data.subset(train), data.subset(test)};
}

std::vector<TrainTestSplit> random_split(const OrdinalDataset& data, const SplitSpec& spec) {
  std::vector<TrainTestSplit> out;
  out.reserve(static_cast<std::size_t>(spec.n_repetitions));
  for (int r = 0; r < spec.n_repetitions; ++r) out.push_back(random_split_at(data, spec, r));
  return out;
}

std::vector<int> stratified_folds(std::span<const int> labels, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw std::invalid_argument("stratified_folds: need at least 2 folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(derive_seed(seed, stable_hash("stratified_folds"), 0));
  std::vector<int> folds(labels.size(), 0);
  int offset = 0;
  for (auto& [label, members] : by_class) {
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < members.size(); ++i) {
      folds[members[i]] = static_cast<int>((offset + i) % static_cast<std::size_t>(n_folds));
    }
    offset = static_cast<int>((offset + members.size()) % static_cast<std::size_t>(n_folds));
  }
  return folds;
}

std::vector<int> unstratified_folds(std::size_t n, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw std::invalid_argument("unstratified_folds: need at least 2 folds");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, stable_hash("unstratified_folds"), 0));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> folds(n, 0);
  for (std::size_t i = 0; i < n; ++i) folds[order[i]] = static_cast<int>(i % static_cast<std::size_t>(n_folds));
  return folds;
}

}  // namespace storm
