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

#include "storm/chain_crf.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "storm/numeric.hpp"

namespace storm {

namespace {

void require_messages(const ChainMessages& msgs) {
  if (!msgs.completed()) {
    throw std::logic_error("chain inference: forward_backward has not been run");
  }
}

void require_constrained(const ChainMessages& msgs, const char* what) {
  if (!msgs.constrained) {
    throw ModeError(std::string(what) +
                    ": requires constrained transitions; unconstrained chains put mass on invalid codes");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ChainCrfParams

ChainCrfParams::ChainCrfParams(int num_classes, int dim)
    : ChainCrfParams(num_classes, dim,
                     Eigen::VectorXd::Zero(static_cast<Eigen::Index>(
                         num_classes >= 2 && dim >= 1 ? parameter_count(num_classes, dim) : 0))) {}

ChainCrfParams::ChainCrfParams(int num_classes, int dim, Eigen::VectorXd values)
    : num_classes_(num_classes), dim_(dim), values_(std::move(values)) {
  if (num_classes < 2) {
    throw std::invalid_argument("ChainCrfParams: K must be at least 2");
  }
  if (dim < 1) {
    throw std::invalid_argument("ChainCrfParams: feature dimension must be at least 1");
  }
  if (static_cast<std::size_t>(values_.size()) != parameter_count(num_classes, dim)) {
    throw std::invalid_argument("ChainCrfParams: expected " +
                                std::to_string(parameter_count(num_classes, dim)) + " values, got " +
                                std::to_string(values_.size()));
  }
  if (!values_.allFinite()) {
    throw std::invalid_argument("ChainCrfParams: weights must be finite");
  }
}

std::size_t ChainCrfParams::parameter_count(int num_classes, int dim) {
  const auto k = static_cast<std::size_t>(num_classes);
  const auto d = static_cast<std::size_t>(dim);
  return (k - 1) * 2 * d + (k - 2) * 4 * d;
}

std::size_t ChainCrfParams::edge_offset() const {
  return static_cast<std::size_t>(num_nodes()) * 2 * static_cast<std::size_t>(dim_);
}

ChainCrfParams::BlockMap ChainCrfParams::node(int n) {
  return BlockMap(values_.data() + static_cast<std::ptrdiff_t>(n) * 2 * dim_, 2, dim_);
}

ChainCrfParams::ConstBlockMap ChainCrfParams::node(int n) const {
  return ConstBlockMap(values_.data() + static_cast<std::ptrdiff_t>(n) * 2 * dim_, 2, dim_);
}

ChainCrfParams::BlockMap ChainCrfParams::edge(int e) {
  return BlockMap(values_.data() + edge_offset() + static_cast<std::ptrdiff_t>(e) * 4 * dim_, 4, dim_);
}

ChainCrfParams::ConstBlockMap ChainCrfParams::edge(int e) const {
  return ConstBlockMap(values_.data() + edge_offset() + static_cast<std::ptrdiff_t>(e) * 4 * dim_, 4,
                       dim_);
}

ChainCrfParams::ConstBlockMap ChainCrfParams::node_stack() const {
  return ConstBlockMap(values_.data(), 2 * num_nodes(), dim_);
}

ChainCrfParams::ConstBlockMap ChainCrfParams::edge_stack() const {
  return ConstBlockMap(values_.data() + edge_offset(), 4 * num_edges(), dim_);
}

// ---------------------------------------------------------------------------
// Potentials

Domain resolve_domain(const InferenceMode& mode, int num_classes, double score_budget) {
  if (mode.domain != Domain::automatic) return mode.domain;
  if (num_classes < kExpDomainMaxClasses && score_budget <= kExpDomainScoreBudget) {
    return Domain::exp;
  }
  return Domain::log;
}

ChainMessages compute_potentials(const ChainCrfParams& params, std::span<const double> x,
                                 const InferenceMode& mode) {
  if (x.size() != static_cast<std::size_t>(params.dim())) {
    throw std::invalid_argument("compute_potentials: feature vector has " + std::to_string(x.size()) +
                                " entries, parameters expect " + std::to_string(params.dim()));
  }
  for (std::size_t d = 0; d < x.size(); ++d) {
    if (!std::isfinite(x[d])) {
      throw std::invalid_argument("compute_potentials: feature " + std::to_string(d) + " is not finite");
    }
  }
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd node_scores = params.node_stack() * xv;
  const Eigen::VectorXd edge_scores = params.edge_stack() * xv;

  const int nodes = params.num_nodes();
  const int edges = params.num_edges();
  double budget = 0.0;
  for (int n = 0; n < nodes; ++n) {
    budget += std::max(std::abs(node_scores[2 * n]), std::abs(node_scores[2 * n + 1]));
  }
  for (int e = 0; e < edges; ++e) {
    budget += edge_scores.segment(4 * e, 4).cwiseAbs().maxCoeff();
  }

  ChainMessages msgs;
  msgs.domain = resolve_domain(mode, params.num_classes(), budget);
  msgs.constrained = mode.constrain_transitions;
  const bool exp_domain = msgs.domain == Domain::exp;
  auto lift = [exp_domain](double score) { return exp_domain ? std::exp(score) : score; };

  msgs.node_potentials.resize(static_cast<std::size_t>(nodes));
  for (int n = 0; n < nodes; ++n) {
    msgs.node_potentials[n] = {lift(node_scores[2 * n]), lift(node_scores[2 * n + 1])};
  }
  msgs.edge_potentials.resize(static_cast<std::size_t>(edges));
  for (int e = 0; e < edges; ++e) {
    auto& psi = msgs.edge_potentials[e];
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) psi[a][b] = lift(edge_scores[4 * e + 2 * a + b]);
    }
    if (msgs.constrained) {
      psi[0][1] = exp_domain ? 0.0 : -std::numeric_limits<double>::infinity();
    }
  }
  return msgs;
}

// ---------------------------------------------------------------------------
// Forward-backward

ChainMessages forward_backward(ChainMessages msgs) {
  const int nodes = static_cast<int>(msgs.node_potentials.size());
  if (nodes < 1) {
    throw std::invalid_argument("forward_backward: chain has no nodes");
  }
  if (msgs.edge_potentials.size() != static_cast<std::size_t>(nodes - 1)) {
    throw std::invalid_argument("forward_backward: expected K-2 edge potentials");
  }
  const auto& psi = msgs.node_potentials;
  const auto& edge = msgs.edge_potentials;
  auto& alpha = msgs.forward;
  auto& beta = msgs.backward;
  auto& gamma = msgs.gamma;
  auto& delta = msgs.delta;
  alpha.assign(nodes, BitPair{});
  beta.assign(nodes, BitPair{});
  gamma.assign(nodes, BitPair{});
  delta.assign(nodes, BitPair{});

  if (msgs.domain == Domain::exp) {
    alpha[0] = {1.0, 1.0};
    for (int n = 0; n < nodes; ++n) {
      gamma[n] = {alpha[n][0] * psi[n][0], alpha[n][1] * psi[n][1]};
      if (n + 1 < nodes) {
        for (int b = 0; b < 2; ++b) {
          alpha[n + 1][b] = gamma[n][0] * edge[n][0][b] + gamma[n][1] * edge[n][1][b];
        }
      }
    }
    beta[nodes - 1] = {1.0, 1.0};
    for (int n = nodes - 1; n >= 0; --n) {
      delta[n] = {psi[n][0] * beta[n][0], psi[n][1] * beta[n][1]};
      if (n > 0) {
        for (int a = 0; a < 2; ++a) {
          beta[n - 1][a] = edge[n - 1][a][0] * delta[n][0] + edge[n - 1][a][1] * delta[n][1];
        }
      }
    }
    msgs.log_z = std::log(gamma[nodes - 1][0] + gamma[nodes - 1][1]);
  } else {
    alpha[0] = {0.0, 0.0};
    for (int n = 0; n < nodes; ++n) {
      gamma[n] = {alpha[n][0] + psi[n][0], alpha[n][1] + psi[n][1]};
      if (n + 1 < nodes) {
        for (int b = 0; b < 2; ++b) {
          alpha[n + 1][b] = log_add(gamma[n][0] + edge[n][0][b], gamma[n][1] + edge[n][1][b]);
        }
      }
    }
    beta[nodes - 1] = {0.0, 0.0};
    for (int n = nodes - 1; n >= 0; --n) {
      delta[n] = {psi[n][0] + beta[n][0], psi[n][1] + beta[n][1]};
      if (n > 0) {
        for (int a = 0; a < 2; ++a) {
          beta[n - 1][a] = log_add(edge[n - 1][a][0] + delta[n][0], edge[n - 1][a][1] + delta[n][1]);
        }
      }
    }
    msgs.log_z = log_add(gamma[nodes - 1][0], gamma[nodes - 1][1]);
  }
  return msgs;
}

ChainMessages infer(const ChainCrfParams& params, std::span<const double> x, const InferenceMode& mode) {
  return forward_backward(compute_potentials(params, x, mode));
}

double log_normaliser_at(const ChainMessages& msgs, int n) {
  require_messages(msgs);
  const auto i = static_cast<std::size_t>(n);
  if (msgs.domain == Domain::exp) {
    return std::log(msgs.gamma[i][0] * msgs.backward[i][0] + msgs.gamma[i][1] * msgs.backward[i][1]);
  }
  return log_add(msgs.gamma[i][0] + msgs.backward[i][0], msgs.gamma[i][1] + msgs.backward[i][1]);
}

// ---------------------------------------------------------------------------
// Marginals

std::vector<BitPair> node_marginals(const ChainMessages& msgs) {
  require_messages(msgs);
  const std::size_t nodes = msgs.node_potentials.size();
  std::vector<BitPair> out(nodes);
  for (std::size_t n = 0; n < nodes; ++n) {
    for (int i = 0; i < 2; ++i) {
      if (msgs.domain == Domain::exp) {
        out[n][i] = msgs.gamma[n][i] * msgs.backward[n][i] * std::exp(-msgs.log_z);
      } else {
        out[n][i] = std::exp(msgs.gamma[n][i] + msgs.backward[n][i] - msgs.log_z);
      }
    }
  }
  return out;
}

std::vector<TransitionMatrix> edge_marginals(const ChainMessages& msgs) {
  require_messages(msgs);
  const std::size_t edges = msgs.edge_potentials.size();
  std::vector<TransitionMatrix> out(edges);
  for (std::size_t e = 0; e < edges; ++e) {
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        if (msgs.domain == Domain::exp) {
          out[e][a][b] = msgs.gamma[e][a] * msgs.edge_potentials[e][a][b] * msgs.delta[e + 1][b] *
                         std::exp(-msgs.log_z);
        } else {
          out[e][a][b] =
              std::exp(msgs.gamma[e][a] + msgs.edge_potentials[e][a][b] + msgs.delta[e + 1][b] - msgs.log_z);
        }
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Decoding

EncodedLabel viterbi(const ChainMessages& msgs) {
  const int nodes = static_cast<int>(msgs.node_potentials.size());
  if (nodes < 1) {
    throw std::invalid_argument("viterbi: chain has no nodes");
  }
  const bool exp_domain = msgs.domain == Domain::exp;
  auto log_of = [exp_domain](double v) { return exp_domain ? std::log(v) : v; };

  // suffix[n][a]: best log score of positions n.. given y_n = a.
  std::vector<BitPair> suffix(static_cast<std::size_t>(nodes));
  for (int a = 0; a < 2; ++a) suffix[nodes - 1][a] = log_of(msgs.node_potentials[nodes - 1][a]);
  for (int n = nodes - 2; n >= 0; --n) {
    for (int a = 0; a < 2; ++a) {
      const double stay0 = log_of(msgs.edge_potentials[n][a][0]) + suffix[n + 1][0];
      const double go1 = log_of(msgs.edge_potentials[n][a][1]) + suffix[n + 1][1];
      suffix[n][a] = log_of(msgs.node_potentials[n][a]) + std::max(stay0, go1);
    }
  }

  // Forward decode; a 1 is taken only when strictly better.
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(nodes), 0);
  bits[0] = suffix[0][1] > suffix[0][0] ? 1 : 0;
  for (int n = 0; n + 1 < nodes; ++n) {
    const int prev = bits[n];
    const double to0 = log_of(msgs.edge_potentials[n][prev][0]) + suffix[n + 1][0];
    const double to1 = log_of(msgs.edge_potentials[n][prev][1]) + suffix[n + 1][1];
    bits[n + 1] = to1 > to0 ? 1 : 0;
  }
  return EncodedLabel(std::move(bits));
}

// ---------------------------------------------------------------------------
// Label-level queries

std::vector<double> label_distribution(const ChainMessages& msgs) {
  require_constrained(msgs, "label_distribution");
  const auto marginals = node_marginals(msgs);
  const int k = msgs.num_classes();
  std::vector<double> dist(static_cast<std::size_t>(k));
  // P(label = k) = P(y_{k-1} = 1) - P(y_k = 1) with P(y_0 = 1) = 1 and
  // P(y_K = 1) = 0.
  auto exceeds = [&](int position) {
    if (position == 0) return 1.0;
    if (position == k) return 0.0;
    return marginals[static_cast<std::size_t>(position - 1)][1];
  };
  for (int label = 1; label <= k; ++label) {
    dist[label - 1] = std::max(0.0, exceeds(label - 1) - exceeds(label));
  }
  return dist;
}

double interval_query(const ChainMessages& msgs, int a, int b) {
  const int k = msgs.num_classes();
  if (a < 1 || b > k || a > b) {
    throw std::invalid_argument("interval_query: need 1 <= a <= b <= " + std::to_string(k) + ", got [" +
                                std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  const auto dist = label_distribution(msgs);
  double total = 0.0;
  for (int label = a; label <= b; ++label) total += dist[label - 1];
  return total;
}

double label_probability_from_edges(const ChainMessages& msgs, int k) {
  require_constrained(msgs, "label_probability_from_edges");
  const int classes = msgs.num_classes();
  if (k < 1 || k > classes) {
    throw std::invalid_argument("label_probability_from_edges: label out of range");
  }
  if (k == 1) return node_marginals(msgs).front()[0];
  if (k == classes) return node_marginals(msgs).back()[1];
  return edge_marginals(msgs)[static_cast<std::size_t>(k - 2)][1][0];
}

}  // namespace storm
