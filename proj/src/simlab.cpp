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

#include "budgetopt/simlab.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "budgetopt/errors.hpp"

namespace budgetopt {

namespace {

struct RunningStats {
  double sum = 0.0;
  double sum_sq = 0.0;
  int count = 0;

  void add(double x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  double mean() const { return count > 0 ? sum / count : 0.0; }
  double stddev() const {
    if (count < 1) return 0.0;
    const double m = mean();
    return std::sqrt(std::max(0.0, sum_sq / count - m * m));
  }
};

}  // namespace

Scenario generate(const ScenarioSpec& spec) {
  if (spec.n_segments < 1) {
    throw std::invalid_argument("generate: n_segments must be >= 1");
  }
  Scenario scenario;
  scenario.seed = spec.seed;
  scenario.segments.reserve(spec.n_segments);
  for (int i = 0; i < spec.n_segments; ++i) {
    Segment seg;
    seg.id = "s" + std::to_string(i);
    seg.size_D = Rng::substream(spec.seed, "D", i).uniform(0.0, 100.0);
    seg.bias_a = Rng::substream(spec.seed, "a", i).uniform(-1.0, 1.0);
    Rng rng_b = Rng::substream(spec.seed, "b", i);
    double b = rng_b.uniform(0.0, 1.0);
    while (b < 1e-9) b = rng_b.uniform(0.0, 1.0);
    seg.sensitivity_b = b;
    // U(0, 100) can also give a zero-measure D = 0; nudge inside the open
    // interval the same way.
    if (seg.size_D <= 0.0) seg.size_D = 1e-9;
    scenario.segments.push_back(std::move(seg));
  }
  scenario.budget =
      Rng::substream(spec.seed, "B").uniform(0.0, 100.0 * spec.n_segments);
  return scenario;
}

std::vector<Segment> perturb(std::span<const Segment> segments, double level,
                             BiasTarget which, Rng& rng) {
  if (!(level >= 0.0) || !(level < 1.0)) {
    throw std::invalid_argument("perturb: bias level must lie in [0, 1)");
  }
  const double eps = level > 0.0 ? rng.uniform(-level, level) : 0.0;
  std::vector<Segment> biased(segments.begin(), segments.end());
  for (Segment& seg : biased) {
    if (which == BiasTarget::kBias_a) {
      seg.bias_a += eps * std::abs(seg.bias_a);
    } else {
      seg.sensitivity_b += eps * std::abs(seg.sensitivity_b);
    }
  }
  return biased;
}

std::vector<SensitivityReport> sensitivity_experiment(
    const SensitivityConfig& config) {
  if (config.runs < 1) {
    throw std::invalid_argument("sensitivity_experiment: runs must be >= 1");
  }
  const std::vector<BiasTarget> targets = {BiasTarget::kBias_a,
                                           BiasTarget::kSensitivity_b};
  std::vector<RunningStats> obj_stats(config.bias_levels.size() * 2);
  std::vector<RunningStats> exc_stats(config.bias_levels.size() * 2);

  for (int run = 0; run < config.runs; ++run) {
    ScenarioSpec spec;
    spec.n_segments = config.n_segments;
    spec.seed = Rng::mix(Rng::mix(config.seed, Rng::tag("scenario")), run);
    const Scenario scenario = generate(spec);

    AllocationProblem truth;
    truth.segments = scenario.segments;
    truth.constraint = BudgetBound{scenario.budget};
    truth.config = config.solver;
    truth.config.record_trace = false;
    const AllocationSolution optimal = solve(truth);
    const double d_star = optimal.objective;

    for (std::size_t lvl = 0; lvl < config.bias_levels.size(); ++lvl) {
      for (std::size_t t = 0; t < targets.size(); ++t) {
        Rng eps_rng(Rng::mix(
            Rng::mix(Rng::mix(config.seed, Rng::tag("eps")), run),
            Rng::mix(lvl, t)));
        const std::vector<Segment> biased = perturb(
            scenario.segments, config.bias_levels[lvl], targets[t], eps_rng);

        AllocationProblem biased_problem;
        biased_problem.segments = biased;
        biased_problem.constraint = BudgetBound{scenario.budget};
        biased_problem.config = config.solver;
        biased_problem.config.record_trace = false;
        const AllocationSolution biased_solution = solve(biased_problem);

        // Evaluate the biased costs under the true response curves.
        const std::vector<double> costs = biased_solution.costs();
        const Evaluation eval = evaluate(scenario.segments, costs);
        obj_stats[lvl * 2 + t].add((d_star - eval.objective) / d_star);
        exc_stats[lvl * 2 + t].add((eval.spend - scenario.budget) /
                                   scenario.budget);
      }
    }
  }

  std::vector<SensitivityReport> reports;
  for (std::size_t lvl = 0; lvl < config.bias_levels.size(); ++lvl) {
    for (std::size_t t = 0; t < targets.size(); ++t) {
      SensitivityReport report;
      report.bias_level = config.bias_levels[lvl];
      report.which = targets[t];
      report.objective_error_mean = obj_stats[lvl * 2 + t].mean();
      report.objective_error_stddev = obj_stats[lvl * 2 + t].stddev();
      report.exceeded_budget_mean = exc_stats[lvl * 2 + t].mean();
      report.exceeded_budget_stddev = exc_stats[lvl * 2 + t].stddev();
      report.runs = config.runs;
      report.seed = config.seed;
      reports.push_back(report);
    }
  }
  return reports;
}

int dual_iteration_bound(double lambda_star, double epsilon) {
  const double bound = 2.0 * std::log2(std::max(lambda_star, 1.0)) +
                       std::log2(2.0 / epsilon);
  return static_cast<int>(std::ceil(bound));
}

std::vector<ConvergenceRun> convergence_experiment(
    const ConvergenceConfig& config) {
  std::vector<ConvergenceRun> runs;
  runs.reserve(config.runs);
  for (int run = 0; run < config.runs; ++run) {
    ScenarioSpec spec;
    spec.n_segments = config.n_segments;
    spec.seed = Rng::mix(Rng::mix(config.seed, Rng::tag("scenario")), run);
    const Scenario scenario = generate(spec);

    double sum_d = 0.0;
    for (const Segment& s : scenario.segments) sum_d += s.size_D;

    AllocationProblem problem;
    problem.segments = scenario.segments;
    problem.constraint = BudgetBound{scenario.budget};
    problem.config.epsilon = config.epsilon;
    problem.config.epsilon_prime = config.epsilon_prime_fraction * sum_d;
    const AllocationSolution solution = solve(problem);

    ConvergenceRun record;
    record.seed = spec.seed;
    record.iterations = solution.iterations;
    record.doubling_iterations = solution.doubling_iterations;
    record.bisection_iterations = solution.bisection_iterations;
    record.lambda_star = solution.lambda_star.value_or(0.0);
    record.termination = solution.termination;
    record.iteration_bound =
        dual_iteration_bound(record.lambda_star, config.epsilon);
    record.trace = solution.trace;
    runs.push_back(std::move(record));
  }
  return runs;
}

std::vector<double> option_grid(double cost_star, double distance) {
  if (!(distance > 0.0)) {
    throw std::invalid_argument("option_grid: distance must be > 0");
  }
  const long long k_lo =
      static_cast<long long>(std::floor((cost_star - 4.0 * distance) / distance));
  const long long k_hi =
      static_cast<long long>(std::ceil((cost_star + 4.0 * distance) / distance));
  std::set<double> options;
  for (long long k = k_lo; k <= k_hi; ++k) {
    options.insert(static_cast<double>(k) * distance);
  }
  options.insert(0.0);
  return {options.begin(), options.end()};
}

std::vector<DiscreteErrorCell> discrete_error_experiment(
    const DiscreteErrorConfig& config) {
  std::vector<DiscreteErrorCell> cells;
  for (const double distance : config.distances) {
    RunningStats bisect_stats;
    RunningStats direct_stats;
    for (int run = 0; run < config.runs; ++run) {
      ScenarioSpec spec;
      spec.n_segments = config.n_segments;
      spec.seed = Rng::mix(Rng::mix(Rng::mix(config.seed, Rng::tag("discrete")),
                                    static_cast<std::uint64_t>(run)),
                           Rng::tag(std::to_string(distance)));
      Scenario scenario = generate(spec);

      // The relaxed optimum fixes the option grids; both strategies then see
      // the same option sets.
      AllocationProblem relaxed_problem;
      relaxed_problem.segments = scenario.segments;
      relaxed_problem.constraint = BudgetBound{scenario.budget};
      relaxed_problem.config = config.solver;
      relaxed_problem.config.record_trace = false;
      const AllocationSolution relaxed = solve(relaxed_problem);
      for (std::size_t i = 0; i < scenario.segments.size(); ++i) {
        scenario.segments[i].options =
            option_grid(relaxed.per_segment[i].cost, distance);
      }

      const DiscreteSolution via_mckp = solve_discrete(
          scenario.segments, BudgetBound{scenario.budget},
          DiscreteStrategy::kBisectionThenMckp, config.solver);
      const DiscreteSolution direct = solve_discrete(
          scenario.segments, BudgetBound{scenario.budget},
          DiscreteStrategy::kDirectDyerZemel, config.solver);
      bisect_stats.add(*via_mckp.approx_error_upper_bound);
      direct_stats.add(*direct.approx_error_upper_bound);
    }
    for (const DiscreteStrategy strategy :
         {DiscreteStrategy::kBisectionThenMckp,
          DiscreteStrategy::kDirectDyerZemel}) {
      const RunningStats& stats =
          strategy == DiscreteStrategy::kBisectionThenMckp ? bisect_stats
                                                           : direct_stats;
      DiscreteErrorCell cell;
      cell.distance = distance;
      cell.strategy = strategy;
      cell.mean_percent = 100.0 * stats.mean();
      cell.stddev_percent = 100.0 * stats.stddev();
      cell.runs = config.runs;
      cell.seed = config.seed;
      cells.push_back(cell);
    }
  }
  return cells;
}

BruteForceResult brute_force_allocate(std::span<const Segment> segments,
                                      double budget, double step,
                                      double range) {
  const std::size_t n = segments.size();
  if (n == 0 || n > 3) {
    throw GridTooLarge("brute_force_allocate: only 1 <= N <= 3 supported");
  }
  if (!(step > 0.0) || !(range > 0.0)) {
    throw std::invalid_argument("brute_force_allocate: step, range > 0");
  }
  const std::size_t points = static_cast<std::size_t>(2.0 * range / step) + 1;
  double total = 1.0;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(points);
  if (total > 2e8) {
    throw GridTooLarge("brute_force_allocate: grid of " +
                       std::to_string(total) + " points exceeds the cap");
  }

  // Precompute per-segment demand and spend along the axis.
  std::vector<std::vector<double>> demand_axis(n), spend_axis(n);
  std::vector<double> axis(points);
  for (std::size_t k = 0; k < points; ++k) {
    axis[k] = -range + static_cast<double>(k) * step;
  }
  for (std::size_t i = 0; i < n; ++i) {
    demand_axis[i].resize(points);
    spend_axis[i].resize(points);
    for (std::size_t k = 0; k < points; ++k) {
      const double d = demand(segments[i], axis[k]);
      demand_axis[i][k] = d;
      spend_axis[i][k] = d * axis[k];
    }
  }

  BruteForceResult best;
  best.objective = -1.0;
  std::vector<std::size_t> idx(n, 0);
  const std::size_t last = n - 1;
  while (true) {
    double obj = 0.0, spend = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      obj += demand_axis[i][idx[i]];
      spend += spend_axis[i][idx[i]];
    }
    if (spend <= budget && obj > best.objective) {
      best.objective = obj;
      best.spend = spend;
      best.costs.resize(n);
      for (std::size_t i = 0; i < n; ++i) best.costs[i] = axis[idx[i]];
    }
    std::size_t pos = last;
    while (true) {
      if (++idx[pos] < points) break;
      idx[pos] = 0;
      if (pos == 0) goto done;
      --pos;
    }
  }
done:
  if (best.objective < 0.0) {
    throw Infeasible("brute_force_allocate: no grid point within budget");
  }
  return best;
}

}  // namespace budgetopt
