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

#ifndef BUDGETOPT_DISCRETE_HPP_
#define BUDGETOPT_DISCRETE_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "budgetopt/allocator.hpp"
#include "budgetopt/response.hpp"

namespace budgetopt {

// Discrete-option allocation: unit costs restricted to per-segment option
// sets. The problem maps onto a multiple-choice knapsack (one class per
// segment, exactly one item chosen per class, total weight capped by the
// budget) and is solved approximately by the Dyer-Zemel pairing/median
// algorithm on the LP relaxation, rounding the single fractional class down.

struct MckpItem {
  double profit = 0.0;      ///< d_i(c), sales units
  double weight = 0.0;      ///< d_i(c) * c, currency; negative for premiums
  double cost_label = 0.0;  ///< the unit cost this item encodes
};

struct MckpInstance {
  std::vector<std::vector<MckpItem>> classes;  ///< one nonempty class per segment
  double capacity = 0.0;                       ///< budget B
};

struct DiscreteSolution {
  /// Segment ids, parallel to the arrays below; empty for raw instances.
  std::vector<std::string> segment_ids;
  std::vector<double> chosen_cost;
  std::vector<int> chosen_index;  ///< index into the instance class
  double objective = 0.0;         ///< sum of chosen profits
  double spend = 0.0;             ///< sum of chosen weights
  /// Optimum of the knapsack LP relaxation (upper bound on any choice).
  double lp_bound = 0.0;
  /// Class rounded down from the fractional LP choice, when one exists.
  std::optional<std::size_t> break_class;
  /// Profit forfeited by the round-down: the break edge's profit gap.
  double break_profit_gap = 0.0;
  /// (d_u - d_a) / (d_u - d_0) clamped to [0, 1]; filled by solve_discrete.
  std::optional<double> approx_error_upper_bound;
  /// Segments whose class received the implicit no-action item because all
  /// options exceeded the relaxed cost.
  std::vector<std::size_t> no_action_segments;
};

/// Nearest options around a relaxed cost: `lower` is the largest option
/// <= c_star, `upper` the smallest option > c_star; either may be absent.
struct OptionBracket {
  std::optional<double> lower;
  std::optional<double> upper;
};

OptionBracket bracket_options(const Segment& segment, double cost_star);

struct MckpBuildConfig {
  /// When a segment has no option <= c*, pad its class with a free
  /// "no action" item (c = 0, profit d(0), weight 0) so the relaxed
  /// feasibility argument carries over. Off means such instances may be
  /// InfeasibleInstance.
  bool allow_no_action = true;
};

/// Two-item classes around the relaxed solution: per segment the bracket
/// options of c_i*, each item carrying profit d_i(c) and weight d_i(c) c.
/// If `no_action` is non-null it receives the indices of padded segments.
MckpInstance build_mckp(std::span<const Segment> segments,
                        const AllocationSolution& relaxed, double budget,
                        const MckpBuildConfig& config = {},
                        std::vector<std::size_t>* no_action = nullptr);

/// Removes dominated and LP-dominated items; returns indices of the
/// surviving upper-hull items in ascending weight order.
std::vector<int> prune_class(std::span<const MckpItem> items);

// Dyer-Zemel approximate MCKP solver (expected linear time).
//
// Weights are first normalized per class by their minimum so the algorithm
// sees nonnegative data; a capacity below the summed minima is
// InfeasibleInstance. Each round pairs the surviving items of every class,
// drops pairwise-dominated items, takes the median alpha of the pair slopes,
// and compares the lightest / heaviest alpha-optimal completions against the
// capacity: total lightest weight > capacity prunes the heavy item of every
// pair with slope <= alpha, total heaviest weight <= capacity prunes the
// light item of every pair with slope >= alpha, anything else means alpha is
// the LP-optimal slope. The returned integer solution rounds the one
// fractional class down to the feasible side, so spend <= capacity exactly.
//
// `seed` randomizes the pairing order; unset keeps the deterministic
// median-of-medians style selection.
DiscreteSolution dyer_zemel(const MckpInstance& instance,
                            std::optional<std::uint64_t> seed = std::nullopt);

enum class DiscreteStrategy {
  kBisectionThenMckp,  ///< relaxed solve -> two-item classes -> Dyer-Zemel
  kDirectDyerZemel     ///< one class per segment with every option as an item
};

const char* to_string(DiscreteStrategy strategy);

/// End-to-end discrete allocation under a budget bound. Both strategies also
/// solve the relaxed continuous problem: it supplies the bracket costs for
/// kBisectionThenMckp and the d_u term of the reported error upper bound
/// (d_u - d_a) / (d_u - d_0), with d_0 the no-action objective sum_i d_i(0).
DiscreteSolution solve_discrete(std::span<const Segment> segments,
                                const BudgetBound& budget,
                                DiscreteStrategy strategy,
                                const SolverConfig& config = {},
                                const MckpBuildConfig& build = {});

}  // namespace budgetopt

#endif  // BUDGETOPT_DISCRETE_HPP_
