// Copyright 2026 The hooksmith Authors. All Rights Reserved.
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
//
// Reference solver for tiny SVM duals: a zooming grid search over the box,
// with the last multiplier pinned by the equality constraint. Slow and
// simple; only meant for n <= 4.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

struct DualSolution {
  std::vector<double> alpha;
  double objective = 0.0;
  // The bias is not unique when no multiplier is strictly inside (0, C);
  // every b in [b_lo, b_hi] minimizes the primal hinge loss.
  double b_lo = 0.0;
  double b_hi = 0.0;
};

inline double dual_value(const std::vector<std::vector<double>>& K, const std::vector<int>& y,
                         const std::vector<double>& a) {
  double lin = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lin += a[i];
    for (std::size_t j = 0; j < a.size(); ++j) quad += a[i] * a[j] * y[i] * y[j] * K[i][j];
  }
  return lin - 0.5 * quad;
}

// sum_j alpha_j y_j K(j, i)
inline std::vector<double> expansion(const std::vector<std::vector<double>>& K, const std::vector<int>& y,
                                     const std::vector<double>& a) {
  std::vector<double> g(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j) g[i] += a[j] * y[j] * K[j][i];
  return g;
}

// Needs both labels present.
inline DualSolution solve_dual(const std::vector<std::vector<double>>& K, const std::vector<int>& y, double C) {
  const std::size_t n = y.size();
  const std::size_t d = n - 1;
  constexpr int G = 21;
  std::vector<double> lo(d, 0.0), hi(d, C), best_free(d, 0.0);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> a(n, 0.0);

  // Fills a from the free coordinates; false if the pinned one leaves [0, C].
  const auto complete = [&](const std::vector<double>& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      a[i] = f[i];
      s += f[i] * y[i];
    }
    a[d] = -s * y[d];
    return a[d] >= -1e-12 && a[d] <= C + 1e-12;
  };

  double step = C;
  while (step > 1e-11) {
    std::vector<int> idx(d, 0);
    std::vector<double> f(d);
    while (true) {
      for (std::size_t k = 0; k < d; ++k) f[k] = lo[k] + (hi[k] - lo[k]) * idx[k] / (G - 1);
      if (complete(f)) {
        a[d] = std::clamp(a[d], 0.0, C);
        const double v = dual_value(K, y, a);
        if (v > best) {
          best = v;
          best_free = f;
        }
      }
      std::size_t k = 0;
      while (k < d && ++idx[k] == G) idx[k++] = 0;
      if (k == d) break;
    }
    step = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double s = (hi[k] - lo[k]) / (G - 1);
      lo[k] = std::max(0.0, best_free[k] - 2 * s);
      hi[k] = std::min(C, best_free[k] + 2 * s);
      step = std::max(step, s);
    }
  }

  DualSolution out;
  complete(best_free);
  a[d] = std::clamp(a[d], 0.0, C);
  out.alpha = a;
  out.objective = dual_value(K, y, a);

  // Primal hinge loss in b is convex piecewise linear with kinks at
  // b = y_i - g_i; its minimizers form the interval between the extreme
  // minimizing kinks.
  const auto g = expansion(K, y, a);
  const auto hinge = [&](double b) {
    double h = 0.0;
    for (std::size_t i = 0; i < n; ++i) h += std::max(0.0, 1.0 - y[i] * (g[i] + b));
    return h;
  };
  double hmin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) hmin = std::min(hmin, hinge(y[i] - g[i]));
  out.b_lo = std::numeric_limits<double>::infinity();
  out.b_hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double b = y[i] - g[i];
    if (hinge(b) <= hmin + 1e-7) {
      out.b_lo = std::min(out.b_lo, b);
      out.b_hi = std::max(out.b_hi, b);
    }
  }
  return out;
}

}  // namespace oracle
