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

#include "budgetopt/allocator.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "budgetopt/errors.hpp"
#include "budgetopt/lambertw.hpp"

namespace budgetopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sum_sizes(std::span<const Segment> segments) {
  double total = 0.0;
  for (const Segment& s : segments) total += s.size_D;
  return total;
}

/// Lambert argument of the stationarity condition for one segment.
double dual_exponent(const Segment& s, double lambda,
                     const Constraint& constraint) {
  if (const auto* roi = std::get_if<RoiBound>(&constraint)) {
    const double r = roi->ratio;
    return s.bias_a + s.sensitivity_b / (lambda * r) + s.sensitivity_b / r -
           1.0;
  }
  return s.bias_a + s.sensitivity_b / lambda - 1.0;
}

struct DualPoint {
  double lambda = 0.0;
  std::vector<double> shares;
  double f = 0.0;
  double g = 0.0;
};

DualPoint eval_dual(std::span<const Segment> segments, double lambda,
                    const Constraint& constraint) {
  DualPoint point;
  point.lambda = lambda;
  point.shares = q_of_lambda(segments, lambda, constraint);
  for (std::size_t i = 0; i < segments.size(); ++i) {
    point.f += segments[i].size_D * point.shares[i];
  }
  point.g = constraint_g(segments, point.shares, constraint);
  return point;
}

AllocationSolution finish(std::span<const Segment> segments,
                          const std::vector<double>& shares,
                          AllocationSolution solution) {
  solution.per_segment.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    SegmentAllocation alloc;
    alloc.id = segments[i].id;
    alloc.share = shares[i];
    alloc.cost = inverse_cost(segments[i], shares[i]);
    alloc.sales = segments[i].size_D * shares[i];
    alloc.spend = alloc.sales * alloc.cost;
    solution.objective += alloc.sales;
    solution.spend += alloc.spend;
    solution.per_segment.push_back(std::move(alloc));
  }
  return solution;
}

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kIntervalTol:
      return "interval_tol";
    case Termination::kObjectiveTol:
      return "objective_tol";
    case Termination::kAtConstraintMinimizer:
      return "at_constraint_minimizer";
  }
  return "unknown";
}

std::vector<double> AllocationSolution::costs() const {
  std::vector<double> out;
  out.reserve(per_segment.size());
  for (const auto& s : per_segment) out.push_back(s.cost);
  return out;
}

std::vector<double> AllocationSolution::shares() const {
  std::vector<double> out;
  out.reserve(per_segment.size());
  for (const auto& s : per_segment) out.push_back(s.share);
  return out;
}

double constraint_g(std::span<const Segment> segments,
                    std::span<const double> shares,
                    const Constraint& constraint) {
  if (shares.size() != segments.size()) {
    throw std::invalid_argument("constraint_g: size mismatch");
  }
  double spend = 0.0;
  double sales = 0.0;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double q = shares[i];
    if (!(q > 0.0) || !(q < 1.0)) {
      throw ShareOutOfRange("constraint_g: share must lie in (0, 1), got " +
                            std::to_string(q));
    }
    const double d = segments[i].size_D * q;
    spend += d * inverse_cost(segments[i], q);
    sales += d;
  }
  if (const auto* roi = std::get_if<RoiBound>(&constraint)) {
    return roi->ratio * spend - sales;
  }
  return spend - std::get<BudgetBound>(constraint).amount;
}

std::vector<double> constraint_minimizer(std::span<const Segment> segments) {
  std::vector<double> shares;
  shares.reserve(segments.size());
  for (const Segment& s : segments) {
    const double w = lambert_w_of_exp(s.bias_a - 1.0);
    shares.push_back(w / (w + 1.0));
  }
  return shares;
}

std::vector<double> q_of_lambda(std::span<const Segment> segments,
                                double lambda, const Constraint& constraint) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("q_of_lambda: lambda must be > 0");
  }
  std::vector<double> shares;
  shares.reserve(segments.size());
  for (const Segment& s : segments) {
    const double w = lambert_w_of_exp(dual_exponent(s, lambda, constraint));
    shares.push_back(w / (w + 1.0));
  }
  return shares;
}

AllocationSolution solve(const AllocationProblem& problem) {
  std::span<const Segment> segments(problem.segments);
  for (const Segment& s : segments) validate_segment(s);
  if (const auto* roi = std::get_if<RoiBound>(&problem.constraint)) {
    if (!(roi->ratio > 0.0)) {
      throw std::invalid_argument("solve: ROI bound must be > 0");
    }
  }

  AllocationSolution solution;
  if (segments.empty()) {
    solution.termination = Termination::kAtConstraintMinimizer;
    return solution;
  }

  const double sum_d = sum_sizes(segments);
  const SolverConfig& cfg = problem.config;
  const double epsilon_prime = cfg.epsilon_prime.value_or(1e-6 * sum_d);

  // Feasibility pre-check against the unconstrained spend minimizer. Only
  // the budget form needs it: the ROI constraint is strictly negative at
  // c = 0, so Slater's condition always holds there.
  if (const auto* budget = std::get_if<BudgetBound>(&problem.constraint)) {
    const std::vector<double> q_min = constraint_minimizer(segments);
    const double g_min = constraint_g(segments, q_min, problem.constraint);
    const double tol = 1e-9 * std::max(1.0, std::abs(budget->amount));
    if (g_min > tol) {
      throw Infeasible("solve: budget " + std::to_string(budget->amount) +
                       " is below the minimum attainable spend; g(q~) = " +
                       std::to_string(g_min));
    }
    if (std::abs(g_min) <= tol) {
      solution.termination = Termination::kAtConstraintMinimizer;
      return finish(segments, q_min, std::move(solution));
    }
  }

  // Doubling phase: grow lambda_r until g(lambda_r) <= 0. f at lambda -> 0+
  // tends to sum(D), the supremum of the objective.
  double lambda_l = 0.0;
  double f_l = sum_d;
  double g_l = kInf;
  DualPoint right = eval_dual(segments, 1.0, problem.constraint);
  int iterations = 0;

  auto record = [&](char phase) {
    if (!cfg.record_trace) return;
    TraceEntry entry;
    entry.iteration = iterations;
    entry.phase = phase;
    entry.lambda_l = lambda_l;
    entry.lambda_r = right.lambda;
    entry.f_l = f_l;
    entry.f_r = right.f;
    entry.g_l = g_l;
    entry.g_r = right.g;
    solution.trace.push_back(entry);
  };

  while (right.g > 0.0) {
    if (solution.doubling_iterations >= cfg.max_doublings) {
      throw NonConvergence("solve: doubling phase exceeded " +
                           std::to_string(cfg.max_doublings) + " iterations");
    }
    lambda_l = right.lambda;
    f_l = right.f;
    g_l = right.g;
    right = eval_dual(segments, 2.0 * right.lambda, problem.constraint);
    ++solution.doubling_iterations;
    ++iterations;
    record('D');
  }

  // Midpoint bisection per the dual root-finding scheme; lambda_r is kept on
  // the g <= 0 side so the final allocation satisfies the constraint.
  while (true) {
    if (right.lambda - lambda_l <= cfg.epsilon) {
      solution.termination = Termination::kIntervalTol;
      break;
    }
    if (f_l - right.f <= epsilon_prime) {
      solution.termination = Termination::kObjectiveTol;
      break;
    }
    if (solution.bisection_iterations >= cfg.max_bisections) {
      throw NonConvergence("solve: bisection exceeded " +
                           std::to_string(cfg.max_bisections) + " iterations");
    }
    const double mid = 0.5 * (lambda_l + right.lambda);
    DualPoint candidate = eval_dual(segments, mid, problem.constraint);
    if (candidate.g > 0.0) {
      lambda_l = candidate.lambda;
      f_l = candidate.f;
      g_l = candidate.g;
    } else {
      right = std::move(candidate);
    }
    ++solution.bisection_iterations;
    ++iterations;
    record('B');
  }

  solution.iterations = iterations;
  solution.lambda_star = right.lambda;
  solution.lambda_l_final = lambda_l;
  solution.g_l_final = g_l;
  solution.g_r_final = right.g;
  return finish(segments, right.shares, std::move(solution));
}

Evaluation evaluate(std::span<const Segment> segments,
                    std::span<const double> costs) {
  if (costs.size() != segments.size()) {
    throw std::invalid_argument("evaluate: size mismatch");
  }
  Evaluation result;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double d = demand(segments[i], costs[i]);
    result.objective += d;
    result.spend += d * costs[i];
  }
  if (result.spend != 0.0) {
    result.roi = result.objective / result.spend;
  }
  return result;
}

}  // namespace budgetopt
