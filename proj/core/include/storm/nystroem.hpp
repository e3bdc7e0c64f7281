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
#include <utility>

#include <Eigen/Core>
#include <nlohmann/json_fwd.hpp>

#include "storm/dataset.hpp"

namespace storm {

/// Eigenvalues of the landmark kernel matrix at or below this are dropped.
inline constexpr double kNystroemEigenFloor = 1e-12;

/// Low-rank RBF feature map z(x) = Lambda^{-1/2} V^T k(x), where
/// k(x)_i = exp(-gamma |x - l_i|^2) over landmarks l_i and V Lambda V^T is
/// the eigendecomposition of the landmark kernel matrix.
class NystroemMap {
 public:
  /// Samples `n_landmarks` training rows uniformly without replacement.
  static NystroemMap fit(const Eigen::MatrixXd& train, int n_landmarks, double gamma, std::uint64_t seed);

  NystroemMap(Eigen::MatrixXd landmarks, double gamma);

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const;

  Eigen::Index input_dim() const { return landmarks_.cols(); }
  Eigen::Index output_dim() const { return projection_.cols(); }
  double gamma() const { return gamma_; }
  const Eigen::MatrixXd& landmarks() const { return landmarks_; }

  nlohmann::json to_json() const;
  static NystroemMap from_json(const nlohmann::json& j);

 private:
  Eigen::MatrixXd kernel(const Eigen::MatrixXd& x) const;

  Eigen::MatrixXd landmarks_;
  double gamma_;
  Eigen::MatrixXd projection_;  // m x r, V Lambda^{-1/2}
};

/// Fits the map on `train` and returns it with the transformed training set.
std::pair<NystroemMap, OrdinalDataset> nystroem_features(const OrdinalDataset& train, int n_landmarks,
                                                         double gamma, std::uint64_t seed);
OrdinalDataset nystroem_features(const OrdinalDataset& data, const NystroemMap& map);

}  // namespace storm
