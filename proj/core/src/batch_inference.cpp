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

#include "storm/batch_inference.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace storm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Elementwise log(exp(a) + exp(b)).
Eigen::ArrayXd log_add(const Eigen::ArrayXd& a, const Eigen::ArrayXd& b) {
  const Eigen::ArrayXd hi = a.max(b);
  const Eigen::ArrayXd lo = a.min(b);
  Eigen::ArrayXd out = hi + ((lo - hi).exp()).log1p();
  return (hi == kNegInf).select(Eigen::ArrayXd::Constant(hi.size(), kNegInf), out);
}

}  // namespace

BatchChainInference::BatchChainInference(const ChainCrfParams& params, const Eigen::MatrixXd& x,
                                         const InferenceMode& mode)
    : num_classes_(params.num_classes()), domain_(Domain::exp), constrained_(mode.constrain_transitions) {
  if (x.cols() != params.dim()) {
    throw std::invalid_argument("BatchChainInference: design matrix has " + std::to_string(x.cols()) +
                                " columns, parameters expect " + std::to_string(params.dim()));
  }
  if (!x.allFinite()) {
    throw std::invalid_argument("BatchChainInference: design matrix contains non-finite values");
  }
  const int nodes = params.num_nodes();
  const int edges = params.num_edges();
  const Eigen::Index n_rows = x.rows();

  node_scores_ = x * params.node_stack().transpose();
  edge_scores_ = edges > 0 ? Eigen::MatrixXd(x * params.edge_stack().transpose()) : Eigen::MatrixXd(n_rows, 0);

  Eigen::ArrayXd budget = Eigen::ArrayXd::Zero(n_rows);
  for (int n = 0; n < nodes; ++n) {
    budget += node_scores_.middleCols(2 * n, 2).array().abs().rowwise().maxCoeff();
  }
  for (int e = 0; e < edges; ++e) {
    budget += edge_scores_.middleCols(4 * e, 4).array().abs().rowwise().maxCoeff();
  }
  const double worst = n_rows > 0 ? budget.maxCoeff() : 0.0;
  domain_ = resolve_domain(mode, num_classes_, worst);
  const bool exp_domain = domain_ == Domain::exp;

  node_pot_.resize(static_cast<std::size_t>(nodes));
  for (int n = 0; n < nodes; ++n) {
    const Eigen::ArrayXXd s = node_scores_.middleCols(2 * n, 2).array();
    node_pot_[n] = exp_domain ? Eigen::ArrayXXd(s.exp()) : s;
  }
  edge_pot_.resize(static_cast<std::size_t>(edges));
  for (int e = 0; e < edges; ++e) {
    const Eigen::ArrayXXd s = edge_scores_.middleCols(4 * e, 4).array();
    edge_pot_[e] = exp_domain ? Eigen::ArrayXXd(s.exp()) : s;
    if (constrained_) edge_pot_[e].col(1).setConstant(exp_domain ? 0.0 : kNegInf);  // 0 -> 1
  }

  alpha_.assign(static_cast<std::size_t>(nodes), Eigen::ArrayXXd(n_rows, 2));
  beta_.assign(static_cast<std::size_t>(nodes), Eigen::ArrayXXd(n_rows, 2));

  if (exp_domain) {
    alpha_[0].setOnes();
    for (int n = 0; n + 1 < nodes; ++n) {
      const Eigen::ArrayXXd gamma = alpha_[n] * node_pot_[n];
      const auto& psi = edge_pot_[n];
      alpha_[n + 1].col(0) = gamma.col(0) * psi.col(0) + gamma.col(1) * psi.col(2);
      alpha_[n + 1].col(1) = gamma.col(0) * psi.col(1) + gamma.col(1) * psi.col(3);
    }
    beta_[nodes - 1].setOnes();
    for (int n = nodes - 1; n > 0; --n) {
      const Eigen::ArrayXXd delta = node_pot_[n] * beta_[n];
      const auto& psi = edge_pot_[n - 1];
      beta_[n - 1].col(0) = psi.col(0) * delta.col(0) + psi.col(1) * delta.col(1);
      beta_[n - 1].col(1) = psi.col(2) * delta.col(0) + psi.col(3) * delta.col(1);
    }
    const Eigen::ArrayXXd last = alpha_[nodes - 1] * node_pot_[nodes - 1];
    log_z_ = (last.col(0) + last.col(1)).log();
  } else {
    alpha_[0].setZero();
    for (int n = 0; n + 1 < nodes; ++n) {
      const Eigen::ArrayXXd gamma = alpha_[n] + node_pot_[n];
      const auto& psi = edge_pot_[n];
      alpha_[n + 1].col(0) = log_add(gamma.col(0) + psi.col(0), gamma.col(1) + psi.col(2));
      alpha_[n + 1].col(1) = log_add(gamma.col(0) + psi.col(1), gamma.col(1) + psi.col(3));
    }
    beta_[nodes - 1].setZero();
    for (int n = nodes - 1; n > 0; --n) {
      const Eigen::ArrayXXd delta = node_pot_[n] + beta_[n];
      const auto& psi = edge_pot_[n - 1];
      beta_[n - 1].col(0) = log_add(psi.col(0) + delta.col(0), psi.col(1) + delta.col(1));
      beta_[n - 1].col(1) = log_add(psi.col(2) + delta.col(0), psi.col(3) + delta.col(1));
    }
    const Eigen::ArrayXXd last = alpha_[nodes - 1] + node_pot_[nodes - 1];
    log_z_ = log_add(last.col(0), last.col(1));
  }
}

Eigen::ArrayXXd BatchChainInference::node_marginals(int n) const {
  const auto i = static_cast<std::size_t>(n);
  if (domain_ == Domain::exp) {
    Eigen::ArrayXXd p = alpha_[i] * node_pot_[i] * beta_[i];
    const Eigen::ArrayXd inv_z = (-log_z_).exp();
    p.col(0) *= inv_z;
    p.col(1) *= inv_z;
    return p;
  }
  Eigen::ArrayXXd p = alpha_[i] + node_pot_[i] + beta_[i];
  p.col(0) -= log_z_;
  p.col(1) -= log_z_;
  return p.exp();
}

Eigen::ArrayXXd BatchChainInference::edge_marginals(int e) const {
  const auto i = static_cast<std::size_t>(e);
  Eigen::ArrayXXd p(rows(), 4);
  if (domain_ == Domain::exp) {
    const Eigen::ArrayXXd gamma = alpha_[i] * node_pot_[i];
    const Eigen::ArrayXXd delta = node_pot_[i + 1] * beta_[i + 1];
    const Eigen::ArrayXd inv_z = (-log_z_).exp();
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        p.col(2 * a + b) = gamma.col(a) * edge_pot_[i].col(2 * a + b) * delta.col(b) * inv_z;
      }
    }
    return p;
  }
  const Eigen::ArrayXXd gamma = alpha_[i] + node_pot_[i];
  const Eigen::ArrayXXd delta = node_pot_[i + 1] + beta_[i + 1];
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      p.col(2 * a + b) = (gamma.col(a) + edge_pot_[i].col(2 * a + b) + delta.col(b) - log_z_).exp();
    }
  }
  return p;
}

Eigen::ArrayXd BatchChainInference::label_log_scores(std::span<const int> labels) const {
  if (static_cast<Eigen::Index>(labels.size()) != rows()) {
    throw std::invalid_argument("label_log_scores: label count does not match design matrix rows");
  }
  const int nodes = num_classes_ - 1;
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(rows());
  for (Eigen::Index j = 0; j < rows(); ++j) {
    const int label = labels[static_cast<std::size_t>(j)];
    // Bit n (0-indexed) is set iff n + 1 < label.
    double score = 0.0;
    int prev = -1;
    for (int n = 0; n < nodes; ++n) {
      const int bit = n + 1 < label ? 1 : 0;
      score += node_scores_(j, 2 * n + bit);
      if (prev >= 0) score += edge_scores_(j, 4 * (n - 1) + 2 * prev + bit);
      prev = bit;
    }
    out[j] = score;
  }
  return out;
}

}  // namespace storm
