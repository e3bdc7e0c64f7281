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

// Independent reference implementations for tests: exhaustive enumeration
// of chain configurations, central finite differences and small random
// generators. Nothing here calls into the message-passing code.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "storm/chain_crf.hpp"

namespace storm::testing {

using Bits = std::vector<int>;

/// All 2^L bit vectors of length L in lexicographic order (bit 0 most
/// significant), so the first maximiser found is the one preferring 0 at
/// the earliest differing position.
inline std::vector<Bits> all_sequences(int length) {
  std::vector<Bits> out;
  const std::uint32_t count = 1u << length;
  for (std::uint32_t code = 0; code < count; ++code) {
    Bits bits(static_cast<std::size_t>(length));
    for (int i = 0; i < length; ++i) bits[static_cast<std::size_t>(i)] = (code >> (length - 1 - i)) & 1u;
    out.push_back(std::move(bits));
  }
  return out;
}

inline bool monotone(const Bits& bits) {
  for (std::size_t i = 1; i < bits.size(); ++i) {
    if (bits[i - 1] == 0 && bits[i] == 1) return false;
  }
  return true;
}

/// Unnormalised log score of one configuration computed straight from the
/// weights; -inf for forbidden transitions under `constrained`.
inline double sequence_log_score(const ChainCrfParams& p, const Eigen::VectorXd& x, const Bits& bits,
                                 bool constrained) {
  double s = 0.0;
  for (int n = 0; n < p.num_nodes(); ++n) {
    const int b = bits[static_cast<std::size_t>(n)];
    for (int d = 0; d < p.dim(); ++d) s += p.values()[static_cast<Eigen::Index>(n) * 2 * p.dim() + b * p.dim() + d] * x[d];
  }
  const Eigen::Index edge_base = static_cast<Eigen::Index>(p.num_nodes()) * 2 * p.dim();
  for (int e = 0; e < p.num_edges(); ++e) {
    const int a = bits[static_cast<std::size_t>(e)];
    const int b = bits[static_cast<std::size_t>(e + 1)];
    if (constrained && a == 0 && b == 1) return -std::numeric_limits<double>::infinity();
    for (int d = 0; d < p.dim(); ++d) {
      s += p.values()[edge_base + static_cast<Eigen::Index>(e) * 4 * p.dim() + (2 * a + b) * p.dim() + d] * x[d];
    }
  }
  return s;
}

struct Enumeration {
  double log_z = 0.0;
  std::vector<std::array<double, 2>> node;                     // P(y_n = b)
  std::vector<std::array<std::array<double, 2>, 2>> edge;      // P(y_e = a, y_e+1 = b)
  Bits best;                                                   // first argmax in lexicographic order
  std::vector<double> label;                                   // P(code of label k), valid codes only
};

inline Enumeration enumerate(const ChainCrfParams& p, const Eigen::VectorXd& x, bool constrained) {
  const int L = p.num_nodes();
  const auto seqs = all_sequences(L);
  std::vector<double> scores;
  double hi = -std::numeric_limits<double>::infinity();
  Enumeration out;
  for (const auto& s : seqs) {
    const double v = sequence_log_score(p, x, s, constrained);
    scores.push_back(v);
    if (v > hi) {
      hi = v;
      out.best = s;
    }
  }
  double z = 0.0;
  for (double v : scores) z += std::exp(v - hi);
  out.log_z = hi + std::log(z);
  out.node.assign(static_cast<std::size_t>(L), {0.0, 0.0});
  out.edge.assign(static_cast<std::size_t>(std::max(L - 1, 0)), {});
  out.label.assign(static_cast<std::size_t>(L + 1), 0.0);
  for (std::size_t i = 0; i < seqs.size(); ++i) {
    const double prob = std::exp(scores[i] - out.log_z);
    const auto& s = seqs[i];
    for (int n = 0; n < L; ++n) out.node[static_cast<std::size_t>(n)][static_cast<std::size_t>(s[static_cast<std::size_t>(n)])] += prob;
    for (int e = 0; e + 1 < L; ++e) {
      out.edge[static_cast<std::size_t>(e)][static_cast<std::size_t>(s[static_cast<std::size_t>(e)])]
              [static_cast<std::size_t>(s[static_cast<std::size_t>(e + 1)])] += prob;
    }
    if (monotone(s)) {
      int ones = 0;
      for (int b : s) ones += b;
      out.label[static_cast<std::size_t>(ones)] += prob;
    }
  }
  return out;
}

/// Central differences of a scalar function, step h.
inline Eigen::VectorXd finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                         const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// |a - b| / max(|a|, |b|, floor): relative error that stays meaningful near
/// zero.
inline double relative_error(double a, double b, double floor = 1e-3) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

inline double max_relative_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor = 1e-3) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) worst = std::max(worst, relative_error(a[i], b[i], floor));
  return worst;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols, double scale) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
  }
  return m;
}

/// Random features with the last column fixed to 1 (bias).
inline Eigen::MatrixXd random_design(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index dim) {
  Eigen::MatrixXd x = random_matrix(rng, rows, dim, 1.0);
  x.col(dim - 1).setOnes();
  return x;
}

inline ChainCrfParams random_params(std::mt19937_64& rng, int num_classes, int dim, double scale = 1.0) {
  return ChainCrfParams(num_classes, dim,
                        random_vector(rng, static_cast<Eigen::Index>(ChainCrfParams::parameter_count(num_classes, dim)),
                                      scale));
}

inline std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, int num_classes) {
  std::uniform_int_distribution<int> pick(1, num_classes);
  std::vector<int> out(n);
  for (auto& y : out) y = pick(rng);
  return out;
}

}  // namespace storm::testing
