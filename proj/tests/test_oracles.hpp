// Copyright 2026 The budgetopt Authors
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

// Independent oracles used by the test suites: interval bisection, central
// finite differences, and a Pareto-front dynamic program for multiple-choice
// knapsacks. None of them share code with the library paths they check.

#ifndef BUDGETOPT_TESTS_TEST_ORACLES_HPP_
#define BUDGETOPT_TESTS_TEST_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "budgetopt/discrete.hpp"

namespace budgetopt::testing {

/// Root of a monotone increasing function on [lo, hi] by plain interval
/// bisection; assumes f(lo) <= 0 <= f(hi).
inline double bisect_root(const std::function<double(double)>& f, double lo,
                          double hi, int iterations = 200) {
  for (int i = 0; i < iterations; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Central finite difference of f at x.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double step = 1e-6) {
  return (f(x + step) - f(x - step)) / (2.0 * step);
}

/// Second central finite difference of f at x.
inline double central_diff2(const std::function<double(double)>& f, double x,
                            double step = 1e-5) {
  return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
}

/// Exact MCKP optimum by dynamic programming over Pareto-optimal
/// (weight, profit) states. Exponential in the worst case but exact; meant
/// for desk-scale instances (N <= 12, small classes).
inline double mckp_exact_dp(const MckpInstance& instance) {
  struct State {
    double weight;
    double profit;
  };
  std::vector<State> states = {{0.0, 0.0}};
  for (const auto& cls : instance.classes) {
    std::vector<State> merged;
    merged.reserve(states.size() * cls.size());
    for (const State& state : states) {
      for (const MckpItem& item : cls) {
        const double w = state.weight + item.weight;
        // Keep states that could still be completed within capacity: every
        // remaining class can only add at least its minimum weight, but a
        // simple capacity filter against the final bound is exact here
        // because weights may be negative; filter at the end instead.
        merged.push_back({w, state.profit + item.profit});
      }
    }
    std::sort(merged.begin(), merged.end(), [](const State& x, const State& y) {
      if (x.weight != y.weight) return x.weight < y.weight;
      return x.profit > y.profit;
    });
    states.clear();
    double best = -std::numeric_limits<double>::infinity();
    for (const State& state : merged) {
      if (state.profit > best) {
        states.push_back(state);
        best = state.profit;
      }
    }
    if (states.size() > 2000000) {
      throw std::runtime_error("mckp_exact_dp: state blow-up");
    }
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const State& state : states) {
    if (state.weight <= instance.capacity) best = std::max(best, state.profit);
  }
  if (!std::isfinite(best)) {
    throw std::runtime_error("mckp_exact_dp: infeasible instance");
  }
  return best;
}

}  // namespace budgetopt::testing

#endif  // BUDGETOPT_TESTS_TEST_ORACLES_HPP_
