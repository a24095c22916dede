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

#ifndef BUDGETOPT_ALLOCATOR_HPP_
#define BUDGETOPT_ALLOCATOR_HPP_

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "budgetopt/response.hpp"

namespace budgetopt {

// The continuous allocation problem: choose per-segment unit costs c_i
// maximizing total sales sum_i d_i(c_i) subject to one business constraint.
// In share space q_i = d_i/D_i the spend sum_i D_i q_i c_i(q_i) is strongly
// convex, so the whole problem reduces to a one-dimensional search over the
// Lagrange multiplier of the constraint; shares are recovered in closed form
// through the Lambert W function.

/// Total spend bounded above by `amount`. Positive = cost upper bound,
/// negative = profit lower bound.
struct BudgetBound {
  double amount = 0.0;
};

/// Return-on-investment floor: total sales / total spend >= ratio, expressed
/// as sum_i (ratio * d_i c_i - d_i) <= 0. Requires ratio > 0.
struct RoiBound {
  double ratio = 1.0;
};

using Constraint = std::variant<BudgetBound, RoiBound>;

struct SolverConfig {
  /// Dual interval tolerance: bisection stops once lambda_r - lambda_l <= epsilon.
  double epsilon = 1e-9;
  /// Objective early stop: also stop once f(lambda_l) - f(lambda_r) <=
  /// epsilon_prime. Unset means 1e-6 * sum(D), resolved per problem.
  std::optional<double> epsilon_prime;
  int max_doublings = 200;
  int max_bisections = 400;
  /// Record the per-iteration interval trace in the solution.
  bool record_trace = true;
};

enum class Termination {
  kIntervalTol,           ///< lambda_r - lambda_l <= epsilon
  kObjectiveTol,          ///< f(lambda_l) - f(lambda_r) <= epsilon_prime
  kAtConstraintMinimizer  ///< g at its unconstrained minimizer is ~0 (or N=0)
};

const char* to_string(Termination t);

struct TraceEntry {
  int iteration = 0;  ///< 1-based, shared across both phases
  char phase = 'B';   ///< 'D' doubling, 'B' bisection
  double lambda_l = 0.0;
  double lambda_r = 0.0;
  double f_l = 0.0;  ///< objective at lambda_l (sum D at lambda_l = 0)
  double f_r = 0.0;
  double g_l = 0.0;  ///< constraint value at lambda_l (+inf at lambda_l = 0)
  double g_r = 0.0;
};

struct SegmentAllocation {
  std::string id;
  double cost = 0.0;
  double share = 0.0;
  double sales = 0.0;
  double spend = 0.0;
};

struct AllocationSolution {
  std::vector<SegmentAllocation> per_segment;
  /// Dual optimum; absent when the solution is the unconstrained minimizer
  /// of the constraint function (or the problem is empty).
  std::optional<double> lambda_star;
  double objective = 0.0;  ///< sum_i D_i q_i*
  double spend = 0.0;      ///< sum_i D_i q_i* c_i*
  int iterations = 0;      ///< doubling + bisection steps
  int doubling_iterations = 0;
  int bisection_iterations = 0;
  Termination termination = Termination::kAtConstraintMinimizer;
  /// Final dual bracket, for diagnostics and tests.
  double lambda_l_final = 0.0;
  double g_l_final = 0.0;
  double g_r_final = 0.0;
  std::vector<TraceEntry> trace;

  std::vector<double> costs() const;
  std::vector<double> shares() const;
};

struct AllocationProblem {
  std::vector<Segment> segments;
  Constraint constraint;
  SolverConfig config;
};

/// Constraint function in share space. Budget: sum_i D_i q_i c_i(q_i) - B.
/// ROI: sum_i (R D_i q_i c_i(q_i) - D_i q_i). Throws ShareOutOfRange unless
/// every q_i is in (0, 1).
double constraint_g(std::span<const Segment> segments,
                    std::span<const double> shares,
                    const Constraint& constraint);

/// The unique minimizer of the budget-form spend: q~_i =
/// W(exp(a_i - 1)) / (W(exp(a_i - 1)) + 1). Used by the feasibility
/// pre-check.
std::vector<double> constraint_minimizer(std::span<const Segment> segments);

/// Shares recovered from a dual value lambda > 0 through the stationarity
/// condition. Budget: w = W(exp(a + b/lambda - 1)); ROI: w =
/// W(exp(a + b/(lambda R) + b/R - 1)); q = w / (w + 1). Evaluated in the log
/// domain, so small lambda cannot overflow the exponent.
std::vector<double> q_of_lambda(std::span<const Segment> segments,
                                double lambda, const Constraint& constraint);

/// Dual bisection solver. Budget problems are pre-checked at the constraint
/// minimizer: g(q~) > 0 is Infeasible, |g(q~)| ~ 0 returns q~ directly.
/// Otherwise a doubling phase brackets the dual root and midpoint bisection
/// shrinks the bracket until the interval or objective tolerance fires;
/// lambda* = lambda_r keeps the returned allocation feasible.
AllocationSolution solve(const AllocationProblem& problem);

struct Evaluation {
  double objective = 0.0;
  double spend = 0.0;
  /// objective / spend; absent when spend == 0.
  std::optional<double> roi;
};

/// Objective, spend and ROI of an arbitrary cost vector.
Evaluation evaluate(std::span<const Segment> segments,
                    std::span<const double> costs);

}  // namespace budgetopt

#endif  // BUDGETOPT_ALLOCATOR_HPP_
