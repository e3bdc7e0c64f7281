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

#include <cmath>

#include "storm/optimizer.hpp"

namespace storm {
namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  const double a = 1.0 - x[0];
  const double b = x[1] - x[0] * x[0];
  g[0] = -2.0 * a - 400.0 * x[0] * b;
  g[1] = 200.0 * b;
  return a * a + 100.0 * b * b;
}

TEST(Lbfgs, QuadraticBowl) {
  Eigen::VectorXd diag(4);
  diag << 1.0, 10.0, 100.0, 0.5;
  Eigen::VectorXd target(4);
  target << 1.0, -2.0, 0.25, 3.0;
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const Eigen::VectorXd r = x - target;
    g = diag.cwiseProduct(r);
    return 0.5 * r.dot(diag.cwiseProduct(r));
  };
  const auto result = minimize_lbfgs(f, Eigen::VectorXd::Zero(4));
  EXPECT_TRUE(result.converged());
  EXPECT_LE(result.gradient.cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LT((result.x - target).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Lbfgs, Rosenbrock) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  MinimizerOptions options;
  options.max_iterations = 1000;
  const auto result = minimize_lbfgs(rosenbrock, x0, options);
  EXPECT_TRUE(result.converged()) << to_string(result.status);
  EXPECT_NEAR(result.x[0], 1.0, 1e-5);
  EXPECT_NEAR(result.x[1], 1.0, 1e-5);
}

TEST(Lbfgs, TraceIsNonIncreasingAndObserved) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  std::vector<double> seen;
  const auto result = minimize_lbfgs(rosenbrock, x0, {}, [&](const Eigen::VectorXd&, double v) { seen.push_back(v); });
  ASSERT_GE(result.trace.size(), 2u);
  EXPECT_EQ(seen, result.trace);
  EXPECT_EQ(static_cast<int>(result.trace.size()), result.iterations + 1);
  for (std::size_t i = 1; i < result.trace.size(); ++i) EXPECT_LE(result.trace[i], result.trace[i - 1]);
}

TEST(Lbfgs, IterationCap) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  MinimizerOptions options;
  options.max_iterations = 3;
  const auto result = minimize_lbfgs(rosenbrock, x0, options);
  EXPECT_EQ(result.status, MinimizerStatus::max_iterations);
  EXPECT_EQ(result.iterations, 3);
}

TEST(Lbfgs, StartAtOptimumConvergesImmediately) {
  Eigen::VectorXd x0(2);
  x0 << 1.0, 1.0;
  const auto result = minimize_lbfgs(rosenbrock, x0);
  EXPECT_TRUE(result.converged());
  EXPECT_EQ(result.iterations, 0);
}

TEST(Lbfgs, WrongGradientStopsInLineSearch) {
  const Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = -x;
    return 0.5 * x.squaredNorm();
  };
  const auto result = minimize_lbfgs(f, Eigen::VectorXd::Constant(3, 1.0));
  EXPECT_EQ(result.status, MinimizerStatus::line_search_failed);
  EXPECT_DOUBLE_EQ(result.value, 1.5);
}

TEST(Lbfgs, Deterministic) {
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const auto a = minimize_lbfgs(rosenbrock, x0);
  const auto b = minimize_lbfgs(rosenbrock, x0);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.trace, b.trace);
}

}  // namespace
}  // namespace storm
