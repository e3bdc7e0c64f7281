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

#include <span>
#include <vector>

#include <Eigen/Core>

#include "storm/chain_crf.hpp"

namespace storm {

/// Forward-backward over a whole design matrix at once.
///
/// Every instance has the same chain length, so messages are stored
/// position-major: for each chain position there is one N x 2 array, and a
/// sweep step from n to n+1 updates all N instances together. All rows share
/// one numeric domain; `automatic` picks exp only if every row fits the
/// exp-domain budget.
class BatchChainInference {
 public:
  /// `x` is N x D with the bias feature included.
  BatchChainInference(const ChainCrfParams& params, const Eigen::MatrixXd& x, const InferenceMode& mode);

  Eigen::Index rows() const { return log_z_.size(); }
  int num_classes() const { return num_classes_; }
  Domain domain() const { return domain_; }
  bool constrained() const { return constrained_; }

  /// Raw linear scores: N x 2(K-1), column 2n + i.
  const Eigen::MatrixXd& node_scores() const { return node_scores_; }
  /// Raw linear scores: N x 4(K-2), column 4e + 2a + b.
  const Eigen::MatrixXd& edge_scores() const { return edge_scores_; }

  const Eigen::ArrayXd& log_z() const { return log_z_; }

  /// N x 2 marginals of node n.
  Eigen::ArrayXXd node_marginals(int n) const;
  /// N x 4 pairwise marginals of edge e; column 2a + b.
  Eigen::ArrayXXd edge_marginals(int e) const;

  /// Unnormalised log score of each row's encoded label.
  Eigen::ArrayXd label_log_scores(std::span<const int> labels) const;

 private:
  int num_classes_;
  Domain domain_;
  bool constrained_;
  Eigen::MatrixXd node_scores_;
  Eigen::MatrixXd edge_scores_;
  std::vector<Eigen::ArrayXXd> node_pot_;  // per node, N x 2, in domain
  std::vector<Eigen::ArrayXXd> edge_pot_;  // per edge, N x 4, in domain
  std::vector<Eigen::ArrayXXd> alpha_;     // per node, N x 2
  std::vector<Eigen::ArrayXXd> beta_;      // per node, N x 2
  Eigen::ArrayXd log_z_;
};

}  // namespace storm
