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

#include "storm/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

namespace storm {

namespace {

constexpr double kArmijo = 1e-4;

struct CorrectionPair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

// Two-loop recursion: returns -H * g.
Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& g, const std::deque<CorrectionPair>& memory) {
  Eigen::VectorXd q = g;
  std::vector<double> alpha(memory.size());
  for (std::size_t i = memory.size(); i-- > 0;) {
    alpha[i] = memory[i].rho * memory[i].s.dot(q);
    q -= alpha[i] * memory[i].y;
  }
  if (!memory.empty()) {
    const auto& last = memory.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t i = 0; i < memory.size(); ++i) {
    const double beta = memory[i].rho * memory[i].y.dot(q);
    q += (alpha[i] - beta) * memory[i].s;
  }
  return -q;
}

}  // namespace

std::string_view to_string(MinimizerStatus status) {
  switch (status) {
    case MinimizerStatus::converged:
      return "converged";
    case MinimizerStatus::max_iterations:
      return "max_iterations";
    case MinimizerStatus::line_search_failed:
      return "line_search_failed";
  }
  return "unknown";
}

MinimizerResult minimize_lbfgs(const Objective& objective, Eigen::VectorXd x0, const MinimizerOptions& options,
                               const IterateObserver& observer) {
  if (options.max_iterations < 1) throw std::invalid_argument("minimize_lbfgs: max_iterations must be >= 1");
  if (!(options.gradient_tolerance > 0.0)) {
    throw std::invalid_argument("minimize_lbfgs: gradient_tolerance must be positive");
  }

  MinimizerResult result;
  result.x = std::move(x0);
  result.gradient.resize(result.x.size());
  result.value = objective(result.x, result.gradient);
  result.evaluations = 1;
  if (!std::isfinite(result.value) || !result.gradient.allFinite()) {
    throw std::domain_error("minimize_lbfgs: objective is not finite at the start point");
  }
  result.trace.push_back(result.value);
  if (observer) observer(result.x, result.value);

  std::deque<CorrectionPair> memory;
  Eigen::VectorXd x_new(result.x.size());
  Eigen::VectorXd g_new(result.x.size());

  result.status = MinimizerStatus::max_iterations;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    if (result.x.size() == 0 || result.gradient.cwiseAbs().maxCoeff() <= options.gradient_tolerance) {
      result.status = MinimizerStatus::converged;
      break;
    }

    Eigen::VectorXd direction = lbfgs_direction(result.gradient, memory);
    double slope = result.gradient.dot(direction);
    if (!(slope < 0.0)) {
      memory.clear();
      direction = -result.gradient;
      slope = -result.gradient.squaredNorm();
    }

    double step = memory.empty() ? 1.0 / std::max(1.0, direction.norm()) : 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int k = 0; k < options.max_backtracks; ++k) {
      x_new = result.x + step * direction;
      if (x_new == result.x) break;
      f_new = objective(x_new, g_new);
      ++result.evaluations;
      if (std::isfinite(f_new) && g_new.allFinite() && f_new <= result.value + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      // Safeguarded quadratic interpolation of the step.
      double next = 0.5 * step;
      if (std::isfinite(f_new)) {
        const double curvature = f_new - result.value - slope * step;
        if (curvature > 0.0) next = -slope * step * step / (2.0 * curvature);
      }
      step = std::clamp(next, 0.1 * step, 0.5 * step);
    }
    if (!accepted) {
      result.status = MinimizerStatus::line_search_failed;
      break;
    }

    Eigen::VectorXd s = x_new - result.x;
    Eigen::VectorXd y = g_new - result.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      memory.push_back({std::move(s), std::move(y), 1.0 / sy});
      if (static_cast<int>(memory.size()) > options.history) memory.pop_front();
    }

    result.x.swap(x_new);
    result.gradient.swap(g_new);
    result.value = f_new;
    result.iterations = iter + 1;
    result.trace.push_back(result.value);
    if (observer) observer(result.x, result.value);
  }
  if (result.status == MinimizerStatus::max_iterations && result.x.size() > 0 &&
      result.gradient.cwiseAbs().maxCoeff() <= options.gradient_tolerance) {
    result.status = MinimizerStatus::converged;
  }
  return result;
}

}  // namespace storm
