// Copyright 2026 The sledsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "sledsim/errors.hpp"
#include "sledsim/fitting.hpp"
#include "sledsim/parallel.hpp"
#include "sledsim/quadrature.hpp"

namespace sledsim {
namespace {

TEST(Quadrature, ScaleInvariantErrorEstimate) {
  // Same integral written in two unit systems must agree to the tolerance.
  auto f = [](double x) { return std::exp(-x) * std::cos(3.0 * x); };
  const double exact = 0.1 * (1.0 - std::exp(-50.0) * (std::cos(150.0) - 3.0 * std::sin(150.0)));
  const auto r = integrate_adaptive(f, 0.0, 50.0, 1e-13, 0.0);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, exact, 1e-13);
  const double s = 3.0e10;
  const auto rs = integrate_adaptive([&](double y) { return f(y / s); }, 0.0, 50.0 * s, 1e-13 * s, 0.0);
  EXPECT_NEAR(rs.value / s, exact, 1e-13);
}

TEST(Quadrature, ReportsNonConvergence) {
  auto spiky = [](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); };
  const auto r = integrate_adaptive(spiky, 0.0, 1.0, 1e-15, 0.0, 20);
  EXPECT_FALSE(r.converged);
  EXPECT_THROW(integrate(spiky, 0.0, 1.0, 1e-15, 0.0, "spike"), NumericalError);
  EXPECT_EQ(integrate_adaptive(spiky, 0.5, 0.5, 1e-10, 0.0).value, 0.0);
}

TEST(LevenbergMarquardt, ExponentialModel) {
  Eigen::VectorXd t(40), y(40);
  for (int i = 0; i < 40; ++i) {
    t(i) = 0.1 * i;
    y(i) = 2.0 * std::exp(-1.3 * t(i)) + 0.5;
  }
  auto r = [&](const Eigen::VectorXd& p) {
    return Eigen::VectorXd((p(0) * (-p(1) * t.array()).exp() + p(2) - y.array()).matrix());
  };
  Eigen::VectorXd p0(3), scale(3);
  p0 << 1.0, 0.5, 0.0;
  scale << 1.0, 1.0, 1.0;
  const auto res = levenberg_marquardt(r, p0, scale);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.params(0), 2.0, 1e-8);
  EXPECT_NEAR(res.params(1), 1.3, 1e-8);
  EXPECT_NEAR(res.params(2), 0.5, 1e-8);
  EXPECT_LT(res.residual_norm, 1e-8);
}

TEST(LevenbergMarquardt, CovarianceMatchesLinearRegression) {
  // Linear model: LM covariance equals the ordinary least-squares formula.
  const std::vector<double> x{0, 1, 2, 3, 4, 5};
  const std::vector<double> y{0.1, 1.2, 1.9, 3.2, 3.9, 5.1};
  auto r = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd out(6);
    for (int i = 0; i < 6; ++i) out(i) = p(0) * x[i] + p(1) - y[i];
    return out;
  };
  Eigen::VectorXd p0(2), scale(2);
  p0 << 0.0, 0.0;
  scale << 1.0, 1.0;
  const auto res = levenberg_marquardt(r, p0, scale);
  double sxx = 0, mx = 2.5, ss = 0;
  for (double v : x) sxx += (v - mx) * (v - mx);
  for (int i = 0; i < 6; ++i) {
    const double e = res.params(0) * x[i] + res.params(1) - y[i];
    ss += e * e;
  }
  EXPECT_NEAR(res.stderr(0), std::sqrt(ss / 4.0 / sxx), 1e-6);
}

TEST(ParallelFor, CoversEveryIndexOnce) {
  for (unsigned w : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(37, w, [&](unsigned, std::size_t i) { hits[i].fetch_add(1); });
    for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  parallel_for(0, 3, [](unsigned, std::size_t) { FAIL(); });
}

TEST(ParallelFor, RethrowsWorkerException) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](unsigned, std::size_t i) {
                              if (i == 4) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
  EXPECT_GE(resolve_workers(0), 1u);
  EXPECT_EQ(resolve_workers(3), 3u);
}

}  // namespace
}  // namespace sledsim
