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

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace storm {

/// Malformed input data (CSV contents, label ranges, binning inputs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// N x D raw features with ordinal labels in 1..K.
class OrdinalDataset {
 public:
  /// Validates shapes, label range and finiteness; throws DataError.
  OrdinalDataset(Eigen::MatrixXd features, std::vector<int> labels, int num_classes,
                 std::string provenance = {}, std::vector<std::string> feature_names = {});

  Eigen::Index rows() const { return features_.rows(); }
  Eigen::Index dim() const { return features_.cols(); }
  int num_classes() const { return num_classes_; }
  const Eigen::MatrixXd& features() const { return features_; }
  const std::vector<int>& labels() const { return labels_; }
  const std::string& provenance() const { return provenance_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }

  OrdinalDataset subset(std::span<const std::size_t> rows) const;
  /// Same labels with a replacement feature matrix (same row count).
  OrdinalDataset with_features(Eigen::MatrixXd features, std::vector<std::string> names = {}) const;

 private:
  Eigen::MatrixXd features_;
  std::vector<int> labels_;
  int num_classes_;
  std::string provenance_;
  std::vector<std::string> feature_names_;
};

// ---------------------------------------------------------------------------
// Synthetic manifolds

enum class ManifoldKind { linear, sine, circle, spiral };

ManifoldKind parse_manifold(std::string_view name);
std::string_view to_string(ManifoldKind kind);

inline constexpr double kDefaultSyntheticNoise = 0.05;

/// Two-dimensional points along a manifold parameter t in [0, 1) with labels
/// banded on t: label = 1 + floor(t K).
///
///   linear  (2t - 1, 2t - 1)
///   sine    (2t - 1, 0.8 sin(2 pi t))
///   circle  r (cos 2 pi u, sin 2 pi u), r = 0.2 + 0.8 t, u ~ U(0, 1)
///   spiral  r (cos 4 pi t, sin 4 pi t), r = 0.1 + 0.9 t
///
/// Isotropic Gaussian noise with standard deviation `noise` is added. t is
/// drawn by stratified sampling (one draw per interval [i/n, (i+1)/n)) and
/// the rows are then shuffled, so class sizes are n/K up to rounding.
OrdinalDataset make_synthetic(ManifoldKind kind, int n, int num_classes, double noise, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Binning and CSV

/// Labels from equal-frequency bins over `targets`. Edge i sits at the
/// empirical i/K quantile; values equal to an edge go to the lower bin.
/// Edges are nudged to distinct values so every bin is non-empty. Throws
/// DataError when fewer than K distinct values exist.
std::vector<int> equal_frequency_binning(std::span<const double> targets, int num_classes);

/// Header row, comma separated, one numeric label column named
/// `label_column`; every other column is a feature. Errors cite the file
/// line and column.
OrdinalDataset load_csv(const std::filesystem::path& path, const std::string& label_column, int num_classes);

struct FeatureTable {
  Eigen::MatrixXd features;
  std::vector<std::string> names;
};

/// Feature-only variant of load_csv: every column except `drop_column`
/// (when present) is read as a feature.
FeatureTable load_feature_csv(const std::filesystem::path& path, const std::string& drop_column = "label");

/// Writes features then the label column, reals at 17 significant digits.
void save_csv(const OrdinalDataset& data, const std::filesystem::path& path,
              const std::string& label_column = "label");
std::string to_csv(const OrdinalDataset& data, const std::string& label_column = "label");

// ---------------------------------------------------------------------------
// Standardisation

/// Per-column z-score fitted on training data. Columns with zero variance
/// get scale 1. apply() appends the constant bias column after scaling.
class Standardizer {
 public:
  Standardizer() = default;
  Standardizer(Eigen::VectorXd mean, Eigen::VectorXd scale);

  static Standardizer fit(const Eigen::MatrixXd& features);

  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
  Eigen::VectorXd apply_row(std::span<const double> x) const;

  Eigen::Index input_dim() const { return mean_.size(); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& scale() const { return scale_; }

 private:
  Eigen::VectorXd mean_;
  Eigen::VectorXd scale_;
};

std::pair<Standardizer, Eigen::MatrixXd> standardize(const OrdinalDataset& train);

// ---------------------------------------------------------------------------
// Splits and folds

struct SplitSpec {
  std::uint64_t seed = 0;
  int train_size = 0;
  int n_repetitions = 20;
  int n_cv_folds = 5;
};

struct TrainTestSplit {
  OrdinalDataset train;
  OrdinalDataset test;
};

/// Repetition `repetition` of a seeded random train/test partition.
TrainTestSplit random_split_at(const OrdinalDataset& data, const SplitSpec& spec, int repetition);
std::vector<TrainTestSplit> random_split(const OrdinalDataset& data, const SplitSpec& spec);

/// Fold id in [0, n_folds) per row; within every class the fold sizes
/// differ by at most one.
std::vector<int> stratified_folds(std::span<const int> labels, int n_folds, std::uint64_t seed);
std::vector<int> unstratified_folds(std::size_t n, int n_folds, std::uint64_t seed);

}  // namespace storm
