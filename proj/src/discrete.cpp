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

#include "budgetopt/discrete.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "budgetopt/errors.hpp"
#include "budgetopt/rng.hpp"

namespace budgetopt {

namespace {

struct ActiveItem {
  double profit = 0.0;
  double weight = 0.0;  // normalized, >= 0
  int orig_index = -1;  // index into the instance class
};

/// Lower median, deterministic.
double median_of(std::vector<double>& values) {
  const std::size_t mid = (values.size() - 1) / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  return values[mid];
}

}  // namespace

OptionBracket bracket_options(const Segment& segment, double cost_star) {
  OptionBracket bracket;
  for (const double option : segment.options) {
    if (option <= cost_star) {
      bracket.lower = option;  // options ascend, so the last one <= c* wins
    } else {
      bracket.upper = option;
      break;
    }
  }
  return bracket;
}

MckpInstance build_mckp(std::span<const Segment> segments,
                        const AllocationSolution& relaxed, double budget,
                        const MckpBuildConfig& config,
                        std::vector<std::size_t>* no_action) {
  if (relaxed.per_segment.size() != segments.size()) {
    throw std::invalid_argument(
        "build_mckp: relaxed solution does not match the segments");
  }
  MckpInstance instance;
  instance.capacity = budget;
  instance.classes.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& seg = segments[i];
    if (seg.options.empty()) {
      throw std::invalid_argument("build_mckp: segment '" + seg.id +
                                  "' has no options");
    }
    const OptionBracket bracket =
        bracket_options(seg, relaxed.per_segment[i].cost);
    std::vector<MckpItem> items;
    auto push_cost = [&](double c) {
      const double d = demand(seg, c);
      items.push_back({d, d * c, c});
    };
    if (bracket.lower.has_value()) {
      push_cost(*bracket.lower);
      if (bracket.upper.has_value()) push_cost(*bracket.upper);
    } else {
      // All options sit above the relaxed cost. The spend-feasibility
      // argument needs an item no heavier than the relaxed spend, so pad
      // with "do nothing" unless the caller opted out.
      if (config.allow_no_action) {
        items.push_back({demand(seg, 0.0), 0.0, 0.0});
        if (no_action != nullptr) no_action->push_back(i);
      }
      push_cost(seg.options.front());
    }
    instance.classes.push_back(std::move(items));
  }
  return instance;
}

std::vector<int> prune_class(std::span<const MckpItem> items) {
  std::vector<int> order(items.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
    if (items[lhs].weight != items[rhs].weight) {
      return items[lhs].weight < items[rhs].weight;
    }
    return items[lhs].profit > items[rhs].profit;
  });
  // Dominance: as weight grows, profit must strictly grow.
  std::vector<int> kept;
  for (const int idx : order) {
    if (!kept.empty() && items[idx].profit <= items[kept.back()].profit) {
      continue;
    }
    kept.push_back(idx);
  }
  // LP dominance: keep the upper concave hull in (weight, profit).
  std::vector<int> hull;
  for (const int idx : kept) {
    while (hull.size() >= 2) {
      const MckpItem& p0 = items[hull[hull.size() - 2]];
      const MckpItem& p1 = items[hull.back()];
      const MckpItem& p2 = items[idx];
      // p1 is LP-dominated if slope(p0,p1) <= slope(p1,p2).
      if ((p1.profit - p0.profit) * (p2.weight - p1.weight) <=
          (p2.profit - p1.profit) * (p1.weight - p0.weight)) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(idx);
  }
  return hull;
}

DiscreteSolution dyer_zemel(const MckpInstance& instance,
                            std::optional<std::uint64_t> seed) {
  const std::size_t n_classes = instance.classes.size();
  DiscreteSolution solution;
  if (n_classes == 0) return solution;

  // Normalize weights per class by their minimum; Dyer-Zemel assumes
  // nonnegative data and the shift preserves the optimum.
  double shift_total = 0.0;
  std::vector<std::vector<ActiveItem>> active(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const auto& cls = instance.classes[c];
    if (cls.empty()) {
      throw std::invalid_argument("dyer_zemel: class " + std::to_string(c) +
                                  " is empty");
    }
    double min_weight = cls.front().weight;
    for (const MckpItem& item : cls) {
      min_weight = std::min(min_weight, item.weight);
    }
    shift_total += min_weight;
    const std::vector<int> hull = prune_class(cls);
    active[c].reserve(hull.size());
    for (const int idx : hull) {
      active[c].push_back({cls[idx].profit, cls[idx].weight - min_weight, idx});
    }
  }
  const double capacity = instance.capacity - shift_total;
  if (capacity < 0.0) {
    throw InfeasibleInstance(
        "dyer_zemel: even the minimum-weight choice per class exceeds the "
        "capacity by " +
        std::to_string(-capacity));
  }
  if (seed.has_value()) {
    Rng rng(*seed);
    for (auto& cls : active) {
      for (std::size_t i = cls.size(); i > 1; --i) {
        std::swap(cls[i - 1],
                  cls[static_cast<std::size_t>(rng.uniform_int(0, i - 1))]);
      }
    }
  }

  struct Pair {
    std::size_t cls;
    std::size_t light, heavy;  // positions within active[cls]
    double slope;
  };

  std::optional<double> alpha_star;
  for (int round = 0; round < 256; ++round) {
    // Pair items two by two within each class, dropping pairwise-dominated
    // partners immediately.
    std::vector<Pair> pairs;
    std::vector<std::vector<char>> dead(n_classes);
    bool any_deleted = false;
    bool any_multi = false;
    for (std::size_t c = 0; c < n_classes; ++c) {
      dead[c].assign(active[c].size(), 0);
      if (active[c].size() >= 2) any_multi = true;
      for (std::size_t k = 0; k + 1 < active[c].size(); k += 2) {
        std::size_t light = k, heavy = k + 1;
        if (active[c][heavy].weight < active[c][light].weight) {
          std::swap(light, heavy);
        }
        const ActiveItem& lo = active[c][light];
        const ActiveItem& hi = active[c][heavy];
        if (hi.weight == lo.weight) {
          dead[c][lo.profit >= hi.profit ? heavy : light] = 1;
          any_deleted = true;
          continue;
        }
        if (lo.profit >= hi.profit) {  // heavier and no more profitable
          dead[c][heavy] = 1;
          any_deleted = true;
          continue;
        }
        pairs.push_back(
            {c, light, heavy, (hi.profit - lo.profit) / (hi.weight - lo.weight)});
      }
    }

    auto sweep = [&]() {
      for (std::size_t c = 0; c < n_classes; ++c) {
        std::vector<ActiveItem> next;
        next.reserve(active[c].size());
        for (std::size_t k = 0; k < active[c].size(); ++k) {
          if (!dead[c][k]) next.push_back(active[c][k]);
        }
        active[c] = std::move(next);
      }
    };

    if (pairs.empty()) {
      if (any_deleted) {
        sweep();
        continue;
      }
      if (!any_multi) break;  // every class is a singleton: forced choice
      sweep();
      continue;
    }

    std::vector<double> slopes;
    slopes.reserve(pairs.size());
    for (const Pair& p : pairs) slopes.push_back(p.slope);
    const double alpha = median_of(slopes);

    // Lightest / heaviest alpha-optimal completion weights.
    double weight_light = 0.0, weight_heavy = 0.0;
    for (std::size_t c = 0; c < n_classes; ++c) {
      double best = -std::numeric_limits<double>::infinity();
      for (const ActiveItem& item : active[c]) {
        best = std::max(best, item.profit - alpha * item.weight);
      }
      const double tol = 1e-9 * (1.0 + std::abs(best));
      double w_min = std::numeric_limits<double>::infinity();
      double w_max = -std::numeric_limits<double>::infinity();
      for (const ActiveItem& item : active[c]) {
        if (best - (item.profit - alpha * item.weight) <= tol) {
          w_min = std::min(w_min, item.weight);
          w_max = std::max(w_max, item.weight);
        }
      }
      weight_light += w_min;
      weight_heavy += w_max;
    }

    if (weight_light > capacity) {
      // Even the lightest alpha-optimal choice overflows: the optimal slope
      // exceeds alpha, so heavy partners of pairs at slope <= alpha are out.
      // (Corrected condition: strict >.)
      for (const Pair& p : pairs) {
        if (p.slope <= alpha) {
          dead[p.cls][p.heavy] = 1;
        }
      }
      sweep();
      continue;
    }
    if (weight_heavy <= capacity) {
      // The heaviest alpha-optimal choice still fits: the optimal slope is
      // at most alpha, so light partners of pairs at slope >= alpha are out.
      // (Corrected condition: <=.)
      for (const Pair& p : pairs) {
        if (p.slope >= alpha) {
          dead[p.cls][p.light] = 1;
        }
      }
      sweep();
      continue;
    }
    alpha_star = alpha;  // weight_light <= capacity < weight_heavy
    break;
  }

  // Construct the integer solution. Base choice: lightest alpha-optimal item
  // per class (or the forced singleton); then walk the alpha-optimal run of
  // each class upward while capacity allows. The first edge that does not
  // fit is the fractional LP class; rounding it down keeps feasibility.
  std::vector<const ActiveItem*> chosen(n_classes, nullptr);
  std::vector<std::vector<const ActiveItem*>> optimal_run(n_classes);
  double used = 0.0;
  double profit = 0.0;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<const ActiveItem*> run;
    if (alpha_star.has_value()) {
      double best = -std::numeric_limits<double>::infinity();
      for (const ActiveItem& item : active[c]) {
        best = std::max(best, item.profit - *alpha_star * item.weight);
      }
      const double tol = 1e-9 * (1.0 + std::abs(best));
      for (const ActiveItem& item : active[c]) {
        if (best - (item.profit - *alpha_star * item.weight) <= tol) {
          run.push_back(&item);
        }
      }
      std::sort(run.begin(), run.end(),
                [](const ActiveItem* x, const ActiveItem* y) {
                  return x->weight < y->weight;
                });
    } else {
      if (active[c].size() != 1) {
        throw NonConvergence("dyer_zemel: pruning loop left class " +
                             std::to_string(c) + " unresolved");
      }
      run.push_back(&active[c].front());
    }
    chosen[c] = run.front();
    used += run.front()->weight;
    profit += run.front()->profit;
    optimal_run[c] = std::move(run);
  }
  if (used > capacity) {
    throw NonConvergence("dyer_zemel: base choice exceeds capacity");
  }

  double lp_bound = profit;
  if (alpha_star.has_value()) {
    bool broke = false;
    for (std::size_t c = 0; c < n_classes && !broke; ++c) {
      const auto& run = optimal_run[c];
      for (std::size_t k = 1; k < run.size(); ++k) {
        const double dw = run[k]->weight - run[k - 1]->weight;
        if (used + dw <= capacity) {
          used += dw;
          profit += run[k]->profit - run[k - 1]->profit;
          chosen[c] = run[k];
        } else {
          solution.break_class = c;
          solution.break_profit_gap = run[k]->profit - run[k - 1]->profit;
          broke = true;
          break;
        }
      }
    }
    // Every upgrade edge carries slope alpha*, so when a fractional class
    // exists the LP tops up the leftover capacity at that rate; without one
    // the rounded solution is itself LP-optimal.
    if (broke) {
      lp_bound = profit + *alpha_star * (capacity - used);
    } else {
      lp_bound = profit;
    }
  }

  solution.chosen_index.resize(n_classes);
  solution.chosen_cost.resize(n_classes);
  for (std::size_t c = 0; c < n_classes; ++c) {
    const MckpItem& item = instance.classes[c][chosen[c]->orig_index];
    solution.chosen_index[c] = chosen[c]->orig_index;
    solution.chosen_cost[c] = item.cost_label;
    solution.objective += item.profit;
    solution.spend += item.weight;
  }
  solution.lp_bound = lp_bound;
  return solution;
}

const char* to_string(DiscreteStrategy strategy) {
  switch (strategy) {
    case DiscreteStrategy::kBisectionThenMckp:
      return "bisection_then_mckp";
    case DiscreteStrategy::kDirectDyerZemel:
      return "direct_dyer_zemel";
  }
  return "unknown";
}

DiscreteSolution solve_discrete(std::span<const Segment> segments,
                                const BudgetBound& budget,
                                DiscreteStrategy strategy,
                                const SolverConfig& config,
                                const MckpBuildConfig& build) {
  for (const Segment& seg : segments) {
    validate_segment(seg);
    if (seg.options.empty()) {
      throw std::invalid_argument("solve_discrete: segment '" + seg.id +
                                  "' has no options");
    }
  }

  AllocationProblem relaxed_problem;
  relaxed_problem.segments.assign(segments.begin(), segments.end());
  relaxed_problem.constraint = budget;
  relaxed_problem.config = config;
  relaxed_problem.config.record_trace = false;
  const AllocationSolution relaxed = solve(relaxed_problem);

  std::vector<std::size_t> no_action;
  MckpInstance instance;
  if (strategy == DiscreteStrategy::kBisectionThenMckp) {
    instance = build_mckp(segments, relaxed, budget.amount, build, &no_action);
  } else {
    instance.capacity = budget.amount;
    instance.classes.reserve(segments.size());
    for (const Segment& seg : segments) {
      std::vector<MckpItem> items;
      items.reserve(seg.options.size());
      for (const double c : seg.options) {
        const double d = demand(seg, c);
        items.push_back({d, d * c, c});
      }
      instance.classes.push_back(std::move(items));
    }
  }

  DiscreteSolution solution = dyer_zemel(instance);
  solution.no_action_segments = std::move(no_action);
  solution.segment_ids.reserve(segments.size());
  for (const Segment& seg : segments) solution.segment_ids.push_back(seg.id);

  // Approximate-error upper bound (d_u - d_a) / (d_u - d_0), with d_u the
  // relaxed continuous optimum and d_0 the no-action objective.
  const double d_u = relaxed.objective;
  double d_0 = 0.0;
  for (const Segment& seg : segments) d_0 += demand(seg, 0.0);
  const double gap = d_u - d_0;
  double bound = 0.0;
  if (gap > 1e-12 * std::max(1.0, std::abs(d_u))) {
    bound = (d_u - solution.objective) / gap;
  }
  solution.approx_error_upper_bound = std::clamp(bound, 0.0, 1.0);
  return solution;
}

}  // namespace budgetopt
