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

#include "storm/nystroem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "storm/rng.hpp"

namespace storm {

NystroemMap NystroemMap::fit(const Eigen::MatrixXd& train, int n_landmarks, double gamma, std::uint64_t seed) {
  if (n_landmarks < 1 || n_landmarks > train.rows()) {
    throw std::invalid_argument("NystroemMap::fit: n_landmarks must be in 1.." + std::to_string(train.rows()) +
                                ", got " + std::to_string(n_landmarks));
  }
  std::vector<std::size_t> order(static_cast<std::size_t>(train.rows()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(seed, stable_hash("nystroem"), 0));
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(static_cast<std::size_t>(n_landmarks));
  std::sort(order.begin(), order.end());
  Eigen::MatrixXd landmarks(n_landmarks, train.cols());
  for (int i = 0; i < n_landmarks; ++i) landmarks.row(i) = train.row(static_cast<Eigen::Index>(order[i]));
  return NystroemMap(std::move(landmarks), gamma);
}

NystroemMap::NystroemMap(Eigen::MatrixXd landmarks, double gamma) : landmarks_(std::move(landmarks)), gamma_(gamma) {
  if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
    throw std::invalid_argument("NystroemMap: gamma must be positive");
  }
  if (landmarks_.rows() < 1) throw std::invalid_argument("NystroemMap: need at least one landmark");

  const Eigen::MatrixXd k_mm = kernel(landmarks_);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k_mm);
  if (eig.info() != Eigen::Success) throw std::runtime_error("NystroemMap: eigendecomposition failed");
  const Eigen::VectorXd& values = eig.eigenvalues();
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = values.size(); i-- > 0;) {
    if (values[i] > kNystroemEigenFloor) kept.push_back(i);
  }
  projection_.resize(k_mm.rows(), static_cast<Eigen::Index>(kept.size()));
  for (std::size_t c = 0; c < kept.size(); ++c) {
    projection_.col(static_cast<Eigen::Index>(c)) = eig.eigenvectors().col(kept[c]) / std::sqrt(values[kept[c]]);
  }
}

Eigen::MatrixXd NystroemMap::kernel(const Eigen::MatrixXd& x) const {
  if (x.cols() != landmarks_.cols()) {
    throw std::invalid_argument("NystroemMap: expected " + std::to_string(landmarks_.cols()) + " features, got " +
                                std::to_string(x.cols()));
  }
  Eigen::MatrixXd k(x.rows(), landmarks_.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < landmarks_.rows(); ++j) {
      k(i, j) = std::exp(-gamma_ * (x.row(i) - landmarks_.row(j)).squaredNorm());
    }
  }
  return k;
}

Eigen::MatrixXd NystroemMap::transform(const Eigen::MatrixXd& x) const { return kernel(x) * projection_; }

nlohmann::json NystroemMap::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < landmarks_.rows(); ++i) {
    rows.push_back(std::vector<double>(landmarks_.row(i).begin(), landmarks_.row(i).end()));
  }
  return {{"kind", "nystroem_rbf"}, {"gamma", gamma_}, {"landmarks", rows}};
}

NystroemMap NystroemMap::from_json(const nlohmann::json& j) {
  if (j.at("kind") != "nystroem_rbf") throw std::invalid_argument("unsupported feature map kind");
  const auto& rows = j.at("landmarks");
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("feature map: landmarks must be non-empty");
  const auto dim = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd landmarks(static_cast<Eigen::Index>(rows.size()), dim);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto row = rows[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(row.size()) != dim) throw std::invalid_argument("feature map: ragged landmarks");
    for (Eigen::Index d = 0; d < dim; ++d) landmarks(static_cast<Eigen::Index>(i), d) = row[d];
  }
  return NystroemMap(std::move(landmarks), j.at("gamma").get<double>());
}

std::pair<NystroemMap, OrdinalDataset> nystroem_features(const OrdinalDataset& train, int n_landmarks, double gamma,
                                                         std::uint64_t seed) {
  auto map = NystroemMap::fit(train.features(), n_landmarks, gamma, seed);
  auto transformed = nystroem_features(train, map);
  return {std::move(map), std::move(transformed)};
}

OrdinalDataset nystroem_features(const OrdinalDataset& data, const NystroemMap& map) {
  std::vector<std::string> names;
  for (Eigen::Index c = 0; c < map.output_dim(); ++c) names.push_back("z" + std::to_string(c + 1));
  return data.with_features(map.transform(data.features()), std::move(names));
}

}  // namespace storm
