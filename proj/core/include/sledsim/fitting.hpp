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

// Damped Gauss-Newton (Levenberg-Marquardt) least squares with central
// finite-difference Jacobians.

#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace sledsim {

struct LmOptions {
  int max_iterations = 500;
  /// Stop once a successful step lowers the cost by less than this fraction.
  double cost_tolerance = 1e-14;
  /// Stop once every scaled step component is below this.
  double step_tolerance = 1e-12;
  /// Relative finite-difference step, in scaled variables.
  double fd_step = 1e-6;
};

struct LmResult {
  Eigen::VectorXd params;
  /// 1-sigma errors from s^2 (J^T J)^-1 with s^2 = |r|^2 / (m - n).
  Eigen::VectorXd stderr;
  Eigen::MatrixXd covariance;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string message;
};

/// Residual function r(p) with m >= n entries.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Minimizes |r(p)|^2 from p0. `scale` gives the typical magnitude of each
/// parameter; iteration runs on p / scale.
LmResult levenberg_marquardt(const ResidualFn& residual, const Eigen::VectorXd& p0,
                             const Eigen::VectorXd& scale, const LmOptions& options = {});

}  // namespace sledsim
