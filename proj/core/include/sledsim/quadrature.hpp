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

#pragma once

#include <functional>
#include <string>

namespace sledsim {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (21-point) quadrature on [a, b]: the
/// panel with the largest error estimate is bisected until the summed
/// estimate drops below max(abs_tol, rel_tol * |value|).
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol, double rel_tol,
                                    int max_panels = 50000);

/// As integrate_adaptive, but throws NumericalError (tagged with `what`) when
/// the tolerance is not met.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, const std::string& what);

}  // namespace sledsim
