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

#include <functional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace storm {

struct MinimizerOptions {
  int max_iterations = 500;
  /// Stop once max_i |grad_i| falls to this value.
  double gradient_tolerance = 1e-6;
  int history = 10;
  int max_backtracks = 60;
};

enum class MinimizerStatus { converged, max_iterations, line_search_failed };

std::string_view to_string(MinimizerStatus status);

struct MinimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  int iterations = 0;
  int evaluations = 0;
  MinimizerStatus status = MinimizerStatus::max_iterations;
  /// Objective at the start point and at every accepted iterate.
  std::vector<double> trace;

  bool converged() const { return status == MinimizerStatus::converged; }
};

/// Returns f(x) and writes the gradient into `gradient` (already sized).
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& gradient)>;
/// Called with the start point and every accepted iterate.
using IterateObserver = std::function<void(const Eigen::VectorXd& x, double value)>;

/// Limited-memory BFGS with an Armijo backtracking line search. Fully
/// deterministic: no randomness, fixed arithmetic order.
MinimizerResult minimize_lbfgs(const Objective& objective, Eigen::VectorXd x0,
                               const MinimizerOptions& options = {}, const IterateObserver& observer = {});

}  // namespace storm
