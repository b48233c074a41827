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

#include "sledsim/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "sledsim/errors.hpp"

namespace sledsim {
namespace {

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// One 21-point Kronrod panel with the embedded 10-point Gauss estimate. The
// node and weight tables come from Boost; the combination is done here so
// the error estimate carries the interval Jacobian.
Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 21>;
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const auto& x = Kronrod::abscissa();
  const auto& wk = Kronrod::weights();
  const auto& wg = Gauss::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  // Odd Kronrod node count: x[0] = 0 is a Kronrod-only node; the Gauss
  // nodes sit at odd indices.
  const double f0 = f(mid);
  double kronrod = f0 * wk[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double pair = f(mid + half * x[i]) + f(mid - half * x[i]);
    kronrod += pair * wk[i];
    if (i % 2 == 1) gauss += pair * wg[i / 2];
  }
  const double err = std::abs(kronrod - gauss) * half;
  return {a, b, kronrod * half, err};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol, double rel_tol,
                                    int max_panels) {
  QuadratureResult out;
  if (a == b) {
    out.converged = true;
    return out;
  }
  std::priority_queue<Panel> heap;
  Panel first = evaluate_panel(f, a, b);
  double total = first.value;
  double total_err = first.error;
  heap.push(first);
  out.panels = 1;

  while (total_err > std::max(abs_tol, rel_tol * std::abs(total)) && out.panels < max_panels) {
    const Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;  // cannot bisect further in double precision
    }
    const Panel left = evaluate_panel(f, worst.a, mid);
    const Panel right = evaluate_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++out.panels;
  }

  // Re-sum from the panels to shed the drift of the running updates.
  total = 0.0;
  total_err = 0.0;
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(),
            [](const Panel& l, const Panel& r) { return l.a < r.a; });
  for (const Panel& p : panels) {
    total += p.value;
    total_err += p.error;
  }
  out.value = total;
  out.error = total_err;
  out.converged = std::isfinite(total) &&
                  total_err <= std::max(abs_tol, rel_tol * std::abs(total));
  return out;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol, const std::string& what) {
  const QuadratureResult r = integrate_adaptive(f, a, b, abs_tol, rel_tol);
  if (!r.converged) {
    std::ostringstream msg;
    msg << what << ": quadrature on [" << a << ", " << b << "] did not converge (value "
        << r.value << ", error estimate " << r.error << ", panels " << r.panels << ")";
    throw NumericalError(msg.str());
  }
  return r.value;
}

}  // namespace sledsim
