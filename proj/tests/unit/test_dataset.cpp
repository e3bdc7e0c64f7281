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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "oracle.hpp"
#include "storm/dataset.hpp"
#include "storm/nystroem.hpp"

namespace storm {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    path_ = fs::temp_directory_path() / (std::string("storm_") + info->test_suite_name() + "_" + info->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path file(const std::string& name) const { return path_ / name; }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(file(name)) << text;
    return file(name);
  }

 private:
  fs::path path_;
};

std::map<int, int> class_counts(const std::vector<int>& labels) {
  std::map<int, int> counts;
  for (int y : labels) ++counts[y];
  return counts;
}

template <typename Fn>
void expect_data_error_mentioning(Fn&& fn, const std::string& needle) {
  try {
    fn();
    ADD_FAILURE() << "no DataError thrown";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
  }
}

// ---------------------------------------------------------------------------
// Synthetic manifolds

TEST(Synthetic, NoiselessLinearHasBalancedDisjointBands) {
  const auto data = make_synthetic(ManifoldKind::linear, 100, 5, 0.0, 77);
  ASSERT_EQ(data.rows(), 100);
  ASSERT_EQ(data.dim(), 2);
  for (const auto& [label, count] : class_counts(data.labels())) EXPECT_NEAR(count, 20, 1) << "class " << label;
  std::map<int, std::pair<double, double>> range;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double s = data.features()(i, 0) + data.features()(i, 1);
    EXPECT_DOUBLE_EQ(data.features()(i, 0), data.features()(i, 1));
    auto [it, fresh] = range.try_emplace(data.labels()[static_cast<std::size_t>(i)], s, s);
    it->second.first = std::min(it->second.first, s);
    it->second.second = std::max(it->second.second, s);
  }
  for (int k = 1; k < 5; ++k) EXPECT_LT(range[k].second, range[k + 1].first);
}

TEST(Synthetic, SameSeedSameData) {
  for (auto kind : {ManifoldKind::linear, ManifoldKind::sine, ManifoldKind::circle, ManifoldKind::spiral}) {
    const auto a = make_synthetic(kind, 50, 5, kDefaultSyntheticNoise, 3);
    const auto b = make_synthetic(kind, 50, 5, kDefaultSyntheticNoise, 3);
    const auto c = make_synthetic(kind, 50, 5, kDefaultSyntheticNoise, 4);
    EXPECT_EQ(a.features(), b.features());
    EXPECT_EQ(a.labels(), b.labels());
    EXPECT_NE(a.features(), c.features());
  }
}

TEST(Synthetic, LabelsFollowTheManifoldParameter) {
  // Noiseless circle: the radius determines the label band.
  const auto circle = make_synthetic(ManifoldKind::circle, 200, 4, 0.0, 5);
  for (Eigen::Index i = 0; i < circle.rows(); ++i) {
    const double t = (circle.features().row(i).norm() - 0.2) / 0.8;
    EXPECT_EQ(circle.labels()[static_cast<std::size_t>(i)], std::min(1 + static_cast<int>(std::floor(t * 4 + 1e-9)), 4));
  }
  // Noiseless sine: the first coordinate determines the band.
  const auto sine = make_synthetic(ManifoldKind::sine, 200, 4, 0.0, 5);
  for (Eigen::Index i = 0; i < sine.rows(); ++i) {
    const double t = (sine.features()(i, 0) + 1.0) / 2.0;
    EXPECT_NEAR(sine.features()(i, 1), 0.8 * std::sin(2.0 * std::numbers::pi * t), 1e-12);
  }
}

TEST(Synthetic, RejectsBadArguments) {
  EXPECT_THROW(make_synthetic(ManifoldKind::linear, 3, 5, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(make_synthetic(ManifoldKind::linear, 10, 1, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(make_synthetic(ManifoldKind::linear, 10, 2, -0.1, 1), std::invalid_argument);
  EXPECT_THROW(parse_manifold("torus"), std::invalid_argument);
  EXPECT_EQ(parse_manifold("spiral"), ManifoldKind::spiral);
}

// ---------------------------------------------------------------------------
// Binning

TEST(Binning, ExactQuantiles) {
  const std::vector<double> targets = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  EXPECT_EQ(equal_frequency_binning(targets, 5), (std::vector<int>{1, 1, 2, 2, 3, 3, 4, 4, 5, 5}));
}

TEST(Binning, ConstantTargetsAreRejected) {
  const std::vector<double> targets(10, 2.5);
  expect_data_error_mentioning([&] { equal_frequency_binning(targets, 3); }, "1");
  const std::vector<double> two = {1, 2, 1, 2};
  EXPECT_THROW(equal_frequency_binning(two, 3), DataError);
}

TEST(Binning, PermutationGivesSameMultisetAndPreservesOrder) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> targets(97);
  for (auto& t : targets) t = std::round(normal(rng) * 4.0) / 4.0;  // plenty of ties
  const auto labels = equal_frequency_binning(targets, 6);
  auto shuffled = targets;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto a = labels;
  auto b = equal_frequency_binning(shuffled, 6);
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  EXPECT_EQ(a, b);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (std::size_t j = 0; j < targets.size(); ++j) {
      if (targets[i] < targets[j]) {
        EXPECT_LE(labels[i], labels[j]);
      }
      if (targets[i] == targets[j]) {
        EXPECT_EQ(labels[i], labels[j]);
      }
    }
  }
  EXPECT_EQ(class_counts(labels).size(), 6u);
}

TEST(Binning, EveryBinNonEmptyWithHeavyTies) {
  const std::vector<double> targets = {0, 0, 0, 0, 0, 0, 0, 1, 2, 3};
  const auto labels = equal_frequency_binning(targets, 4);
  EXPECT_EQ(class_counts(labels).size(), 4u);
}

// ---------------------------------------------------------------------------
// CSV

TEST(Csv, WellFormedFile) {
  TempDir dir;
  const auto path = dir.write("ok.csv", "a,label,b\n1.5,2,3\n-1,1,0.25\n2e3,5,-7\n");
  const auto data = load_csv(path, "label", 5);
  EXPECT_EQ(data.rows(), 3);
  EXPECT_EQ(data.dim(), 2);
  EXPECT_EQ(data.labels(), (std::vector<int>{2, 1, 5}));
  EXPECT_EQ(data.feature_names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(data.features()(2, 0), 2000.0);
  EXPECT_DOUBLE_EQ(data.features()(1, 1), 0.25);
}

TEST(Csv, ErrorsCiteLocation) {
  TempDir dir;
  expect_data_error_mentioning([&] { load_csv(dir.write("zero.csv", "x,label\n1,1\n2,0\n"), "label", 5); }, ":3");
  expect_data_error_mentioning([&] { load_csv(dir.write("ragged.csv", "x,y,label\n1,2,1\n2,1\n"), "label", 5); },
                               ":3");
  expect_data_error_mentioning([&] { load_csv(dir.write("text.csv", "x,label\n1,1\nfoo,2\n"), "label", 5); },
                               "column 1");
  expect_data_error_mentioning([&] { load_csv(dir.write("inf.csv", "x,label\n1,1\ninf,2\n"), "label", 5); },
                               "column 1");
  expect_data_error_mentioning([&] { load_csv(dir.write("nolabel.csv", "x,y\n1,1\n"), "label", 5); }, "label");
  EXPECT_THROW(load_csv(dir.file("missing.csv"), "label", 5), DataError);
  EXPECT_THROW(load_csv(dir.write("frac.csv", "x,label\n1,1.5\n"), "label", 5), DataError);
}

TEST(Csv, SaveLoadRoundTripIsExact) {
  TempDir dir;
  std::mt19937_64 rng(12);
  const Eigen::MatrixXd x = testing::random_matrix(rng, 500, 4, 1e3);
  const OrdinalDataset data(x, testing::random_labels(rng, 500, 7), 7);
  const auto path = dir.file("round.csv");
  save_csv(data, path);
  const auto back = load_csv(path, "label", 7);
  EXPECT_EQ(back.features(), data.features());
  EXPECT_EQ(back.labels(), data.labels());
  EXPECT_EQ(to_csv(back), to_csv(data));
}

TEST(Csv, FeatureOnlyTable) {
  TempDir dir;
  const auto with_label = load_feature_csv(dir.write("f.csv", "a,label,b\n1,2,3\n4,5,6\n"));
  EXPECT_EQ(with_label.names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(with_label.features.rows(), 2);
  EXPECT_DOUBLE_EQ(with_label.features(1, 1), 6.0);
  const auto plain = load_feature_csv(dir.write("g.csv", "a,b\n1,2\n"));
  EXPECT_EQ(plain.features.cols(), 2);
}

// ---------------------------------------------------------------------------
// Standardisation

TEST(Standardize, ZeroMeanUnitVariance) {
  std::mt19937_64 rng(4);
  Eigen::MatrixXd x = testing::random_matrix(rng, 200, 3, 5.0);
  x.col(1).array() += 100.0;
  x.col(2).setConstant(7.0);
  const OrdinalDataset data(x, testing::random_labels(rng, 200, 3), 3);
  const auto [transformer, z] = standardize(data);
  ASSERT_EQ(z.cols(), 4);
  for (Eigen::Index d = 0; d < 2; ++d) {
    const double mean = z.col(d).mean();
    const double var = (z.col(d).array() - mean).square().sum() / static_cast<double>(z.rows());
    EXPECT_LT(std::abs(mean), 1e-12);
    EXPECT_NEAR(var, 1.0, 1e-9);
  }
  EXPECT_DOUBLE_EQ(transformer.scale()[2], 1.0);
  EXPECT_TRUE((z.col(2).array() == 0.0).all());
  EXPECT_TRUE((z.col(3).array() == 1.0).all());
}

TEST(Standardize, RefitOnTrainIsStable) {
  std::mt19937_64 rng(5);
  const Eigen::MatrixXd x = testing::random_matrix(rng, 50, 2, 3.0);
  const auto a = Standardizer::fit(x);
  const auto b = Standardizer::fit(x);
  EXPECT_EQ(a.mean(), b.mean());
  EXPECT_EQ(a.scale(), b.scale());
  const auto row = a.apply_row(std::vector<double>{x(3, 0), x(3, 1)});
  const auto all = a.apply(x);
  EXPECT_DOUBLE_EQ(row[0], all(3, 0));
  EXPECT_DOUBLE_EQ(row[2], 1.0);
}

// ---------------------------------------------------------------------------
// Splits and folds

TEST(Splits, PartitionAndReproducibility) {
  const auto data = make_synthetic(ManifoldKind::sine, 120, 4, kDefaultSyntheticNoise, 9);
  const SplitSpec spec{42, 30, 3, 5};
  const auto splits = random_split(data, spec);
  ASSERT_EQ(splits.size(), 3u);
  for (int r = 0; r < 3; ++r) {
    const auto& s = splits[static_cast<std::size_t>(r)];
    EXPECT_EQ(s.train.rows(), 30);
    EXPECT_EQ(s.test.rows(), 90);
    std::multiset<std::pair<double, double>> all;
    std::multiset<std::pair<double, double>> joined;
    for (Eigen::Index i = 0; i < data.rows(); ++i) all.insert({data.features()(i, 0), data.features()(i, 1)});
    for (const auto* part : {&s.train, &s.test}) {
      for (Eigen::Index i = 0; i < part->rows(); ++i) joined.insert({part->features()(i, 0), part->features()(i, 1)});
    }
    EXPECT_EQ(all, joined);
    const auto again = random_split_at(data, spec, r);
    EXPECT_EQ(again.train.features(), s.train.features());
    EXPECT_EQ(again.test.labels(), s.test.labels());
  }
  EXPECT_NE(splits[0].train.features(), splits[1].train.features());
  EXPECT_THROW(random_split(data, {1, 3, 1, 5}), std::invalid_argument);
  EXPECT_THROW(random_split(data, {1, 120, 1, 5}), std::invalid_argument);
}

TEST(Splits, StratifiedFoldsBalanceEveryClass) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const auto labels = testing::random_labels(rng, 50 + static_cast<std::size_t>(trial) * 7, 4);
    const auto folds = stratified_folds(labels, 5, static_cast<std::uint64_t>(trial));
    ASSERT_EQ(folds.size(), labels.size());
    std::map<int, std::vector<int>> per_class;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      ASSERT_GE(folds[i], 0);
      ASSERT_LT(folds[i], 5);
      auto& counts = per_class[labels[i]];
      counts.resize(5);
      ++counts[static_cast<std::size_t>(folds[i])];
    }
    for (const auto& [label, counts] : per_class) {
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      EXPECT_LE(*hi - *lo, 1) << "class " << label;
    }
    EXPECT_EQ(folds, stratified_folds(labels, 5, static_cast<std::uint64_t>(trial)));
  }
}

TEST(Splits, UnstratifiedFoldsBalanceSizes) {
  const auto folds = unstratified_folds(23, 5, 3);
  std::vector<int> counts(5);
  for (int f : folds) ++counts[static_cast<std::size_t>(f)];
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  EXPECT_LE(*hi - *lo, 1);
}

// ---------------------------------------------------------------------------
// Nystroem

TEST(Nystroem, FullRankReproducesTheKernel) {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd x = testing::random_matrix(rng, 30, 2, 1.0);
  const double gamma = 2.0;
  const auto map = NystroemMap::fit(x, 30, gamma, 1);
  const Eigen::MatrixXd z = map.transform(x);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.rows(); ++j) {
      const double exact = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
      worst = std::max(worst, std::abs(z.row(i).dot(z.row(j)) - exact));
    }
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Nystroem, TinyGammaCollapsesToRankOne) {
  std::mt19937_64 rng(4);
  const Eigen::MatrixXd x = testing::random_matrix(rng, 20, 2, 1.0);
  const auto map = NystroemMap::fit(x, 10, 1e-15, 2);
  EXPECT_EQ(map.output_dim(), 1);
}

TEST(Nystroem, ArgumentsAndDeterminism) {
  const auto data = make_synthetic(ManifoldKind::spiral, 40, 3, kDefaultSyntheticNoise, 1);
  EXPECT_THROW(nystroem_features(data, 41, 1.0, 0), std::invalid_argument);
  EXPECT_THROW(nystroem_features(data, 10, 0.0, 0), std::invalid_argument);
  const auto [map_a, a] = nystroem_features(data, 10, 10.0, 7);
  const auto [map_b, b] = nystroem_features(data, 10, 10.0, 7);
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.labels(), data.labels());
  const auto restored = NystroemMap::from_json(map_a.to_json());
  EXPECT_EQ(restored.transform(data.features()), map_a.transform(data.features()));
}

}  // namespace
}  // namespace storm
