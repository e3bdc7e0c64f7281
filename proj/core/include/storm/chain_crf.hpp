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

// Exact inference on the heterogeneous binary chain used by StORM.
//
// A problem with K ordinal classes is a chain of K-1 binary nodes joined by
// K-2 edges. Every node and every edge owns its own weights (no sharing
// across positions). Potentials are exponentiated linear scores of the
// feature vector, which is expected to carry a trailing constant bias
// feature.
//
// Edge potentials are indexed [from][to]: the row is the bit of the earlier
// node and the column the bit of the later node, so the forward recursion is
// alpha(n+1) = Psi(n)^T (alpha(n) * psi(n)). The forbidden transition of the
// cumulative code is therefore cell [0][1].

#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "storm/encoding.hpp"

namespace storm {

/// Numeric domain of the message recursions. `automatic` picks exp when the
/// chain is short and the scores are small enough not to overflow.
enum class Domain { automatic, exp, log };

struct InferenceMode {
  Domain domain = Domain::automatic;
  bool constrain_transitions = false;

  friend bool operator==(const InferenceMode&, const InferenceMode&) = default;
};

/// Raised by queries that are only meaningful in constrained mode.
class ModeError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Chains with this many classes or more always run in the log domain.
inline constexpr int kExpDomainMaxClasses = 30;
/// Upper bound on sum_n max|score| accepted by the exp domain. exp(600) and
/// exp(-600) are comfortably inside double range.
inline constexpr double kExpDomainScoreBudget = 600.0;

/// Node and edge weights of a chain with `num_classes` classes over `dim`
/// features (bias included).
///
/// Storage is one flat vector: K-1 node blocks of 2 x D (row i = node bit),
/// then K-2 edge blocks of 4 x D (row 2*a + b = transition a -> b). Blocks are
/// row-major so node(n) and edge(e) map contiguous memory and the whole node
/// section is a single (2(K-1)) x D matrix.
class ChainCrfParams {
 public:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using BlockMap = Eigen::Map<RowMatrix>;
  using ConstBlockMap = Eigen::Map<const RowMatrix>;

  ChainCrfParams(int num_classes, int dim);
  ChainCrfParams(int num_classes, int dim, Eigen::VectorXd values);

  static std::size_t parameter_count(int num_classes, int dim);

  int num_classes() const { return num_classes_; }
  int dim() const { return dim_; }
  int num_nodes() const { return num_classes_ - 1; }
  int num_edges() const { return num_classes_ - 2; }

  BlockMap node(int n);
  ConstBlockMap node(int n) const;
  BlockMap edge(int e);
  ConstBlockMap edge(int e) const;

  /// All node blocks stacked: (2(K-1)) x D.
  ConstBlockMap node_stack() const;
  /// All edge blocks stacked: (4(K-2)) x D.
  ConstBlockMap edge_stack() const;

  Eigen::VectorXd& values() { return values_; }
  const Eigen::VectorXd& values() const { return values_; }

  /// True when flat index `i` multiplies the bias feature (last column).
  bool is_bias_coordinate(std::size_t i) const {
    return i % static_cast<std::size_t>(dim_) == static_cast<std::size_t>(dim_ - 1);
  }

 private:
  std::size_t edge_offset() const;

  int num_classes_;
  int dim_;
  Eigen::VectorXd values_;
};

using BitPair = std::array<double, 2>;
using TransitionMatrix = std::array<std::array<double, 2>, 2>;  // [from][to]

/// Potentials and messages of one instance.
///
/// Values are stored in the resolved domain: plain potentials and messages
/// for Domain::exp, their logarithms for Domain::log. `log_z` is always the
/// natural log of the partition function.
struct ChainMessages {
  Domain domain = Domain::exp;
  bool constrained = false;
  std::vector<BitPair> node_potentials;           // psi, K-1 entries
  std::vector<TransitionMatrix> edge_potentials;  // Psi, K-2 entries
  std::vector<BitPair> forward;                   // alpha
  std::vector<BitPair> backward;                  // beta
  std::vector<BitPair> gamma;                     // alpha * psi
  std::vector<BitPair> delta;                     // psi * beta
  double log_z = std::numeric_limits<double>::quiet_NaN();

  int num_classes() const { return static_cast<int>(node_potentials.size()) + 1; }
  bool completed() const { return forward.size() == node_potentials.size() && !node_potentials.empty(); }
};

/// Domain actually used for a chain with the given per-position score bound.
Domain resolve_domain(const InferenceMode& mode, int num_classes, double score_budget);

ChainMessages compute_potentials(const ChainCrfParams& params, std::span<const double> x,
                                 const InferenceMode& mode);

/// Runs the forward and backward sweeps and fills alpha, beta, gamma, delta
/// and log_z.
ChainMessages forward_backward(ChainMessages msgs);

/// compute_potentials followed by forward_backward.
ChainMessages infer(const ChainCrfParams& params, std::span<const double> x, const InferenceMode& mode);

/// log Z evaluated as log(1^T (alpha(n) * psi(n) * beta(n))) at position n.
double log_normaliser_at(const ChainMessages& msgs, int n);

std::vector<BitPair> node_marginals(const ChainMessages& msgs);

/// P(y_e = a, y_{e+1} = b) as [a][b] for every edge.
std::vector<TransitionMatrix> edge_marginals(const ChainMessages& msgs);

/// Highest-scoring bit sequence. Among equal scores, the lexicographically
/// smallest sequence wins (prefer 0 at the earliest differing position).
EncodedLabel viterbi(const ChainMessages& msgs);

/// P(label = k) for k = 1..K, from P(y_{k-1} = 1) - P(y_k = 1). Only valid
/// in constrained mode; throws ModeError otherwise.
std::vector<double> label_distribution(const ChainMessages& msgs);

/// P(a <= label <= b). Constrained mode only.
double interval_query(const ChainMessages& msgs, int a, int b);

/// P(label = k) through the pairwise identity P(y_{k-1} = 1, y_k = 0), with
/// the chain ends handled by node marginals. Constrained mode only.
double label_probability_from_edges(const ChainMessages& msgs, int k);

}  // namespace storm
