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

#include "sledsim/fitting.hpp"

#include <cmath>
#include <sstream>

#include "sledsim/errors.hpp"

namespace sledsim {
namespace {

Eigen::MatrixXd jacobian(const ResidualFn& residual, const Eigen::VectorXd& u,
                         const Eigen::VectorXd& scale, double h, Eigen::Index m) {
  Eigen::MatrixXd j(m, u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double step = h * std::max(1.0, std::abs(u(k)));
    Eigen::VectorXd up = u, dn = u;
    up(k) += step;
    dn(k) -= step;
    j.col(k) = (residual(up.cwiseProduct(scale)) - residual(dn.cwiseProduct(scale))) / (2.0 * step);
  }
  return j;
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFn& residual, const Eigen::VectorXd& p0,
                             const Eigen::VectorXd& scale, const LmOptions& options) {
  const Eigen::Index n = p0.size();
  if (scale.size() != n || (scale.array() <= 0.0).any())
    throw DomainError("levenberg_marquardt: scale must be positive and match p0");
  Eigen::VectorXd u = p0.cwiseQuotient(scale);
  Eigen::VectorXd r = residual(p0);
  const Eigen::Index m = r.size();
  if (m < n) throw DomainError("levenberg_marquardt: fewer residuals than parameters");
  if (!r.allFinite()) throw FitFailure("levenberg_marquardt: non-finite residual at the start");

  LmResult out;
  double cost = r.squaredNorm();
  double lambda = 1e-3;
  Eigen::MatrixXd j = jacobian(residual, u, scale, options.fd_step, m);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    const Eigen::MatrixXd jtj = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    bool accepted = false;
    Eigen::VectorXd delta;
    double new_cost = cost;
    Eigen::VectorXd new_r;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd a = jtj;
      for (Eigen::Index k = 0; k < n; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-300);
      delta = a.ldlt().solve(-g);
      if (!delta.allFinite()) {
        lambda *= 10.0;
        continue;
      }
      new_r = residual((u + delta).cwiseProduct(scale));
      new_cost = new_r.allFinite() ? new_r.squaredNorm() : INFINITY;
      if (new_cost < cost) {
        accepted = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!accepted) {
      // No descent direction left: at a (local) minimum to working precision.
      out.converged = true;
      out.message = "no further decrease";
      break;
    }
    u += delta;
    r = new_r;
    const double drop = (cost - new_cost) / std::max(cost, 1e-300);
    cost = new_cost;
    lambda = std::max(lambda / 3.0, 1e-12);
    j = jacobian(residual, u, scale, options.fd_step, m);
    const double step = delta.cwiseAbs().maxCoeff() / std::max(1.0, u.cwiseAbs().maxCoeff());
    if (drop < options.cost_tolerance || step < options.step_tolerance) {
      out.converged = true;
      out.message = "converged";
      ++it;
      break;
    }
  }
  if (!out.converged) out.message = "iteration limit reached";

  out.iterations = it;
  out.params = u.cwiseProduct(scale);
  out.residual_norm = std::sqrt(cost);
  const double dof = static_cast<double>(std::max<Eigen::Index>(m - n, 1));
  const double s2 = cost / dof;
  const Eigen::MatrixXd jtj = j.transpose() * j;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
  Eigen::MatrixXd cov_u = Eigen::MatrixXd::Constant(n, n, INFINITY);
  if (lu.isInvertible()) cov_u = s2 * lu.inverse();
  out.covariance = scale.asDiagonal() * cov_u * scale.asDiagonal();
  out.stderr = out.covariance.diagonal().cwiseAbs().cwiseSqrt();
  return out;
}

}  // namespace sledsim
