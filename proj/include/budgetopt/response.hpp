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

#ifndef BUDGETOPT_RESPONSE_HPP_
#define BUDGETOPT_RESPONSE_HPP_

#include <map>
#include <string>
#include <vector>

namespace budgetopt {

/// Categorical context attached to a segment (feature name -> value).
using Context = std::map<std::string, std::string>;

// One market segment with a logit response curve
//
//   d(c) = D / (1 + exp(-(a + b c))),
//
// where c is the unit marketing cost (positive = discount, negative =
// premium), D the market size, and b > 0 the cost sensitivity.
struct Segment {
  std::string id;
  double size_D = 1.0;        ///< market size D > 0 (sales units)
  double bias_a = 0.0;        ///< logit bias a
  double sensitivity_b = 1.0; ///< cost slope b > 0
  /// Allowed unit costs for the discrete setting; strictly ascending when
  /// present, empty means the segment is continuous.
  std::vector<double> options;
  Context context;
};

/// Throws InvalidSegment unless D > 0, b > 0 and options (if any) are
/// strictly ascending. Rejecting b <= 0 at load time keeps the inverse share
/// map and the allocator's convex reformulation well defined.
void validate_segment(const Segment& segment);

/// Numerically stable logistic 1 / (1 + exp(-t)).
double sigmoid(double t);

/// The inflection point c = -a/b where the response curve is steepest;
/// interpreted as the market-average cost of the segment.
double market_cost(const Segment& segment);

/// Expected sales d(c) = D * sigmoid(a + b c). Strictly increasing in c,
/// range (0, D).
double demand(const Segment& segment, double cost);

/// Market share d(c) / D in (0, 1).
double share(const Segment& segment, double cost);

/// Point cost elasticity e(c) = b c / (1 + exp(a + b c)); equals -a/2 at the
/// market cost.
double elasticity(const Segment& segment, double cost);

/// Arc elasticity between two cost levels:
/// [d(c2) - d(c1)] c1 / ([c2 - c1] d(c1)). Converges to elasticity(c1) as
/// c2 -> c1. Throws DegenerateArc when c1 == c2 or c1 == 0.
double arc_elasticity(const Segment& segment, double cost1, double cost2);

/// Inverse of the share map: the cost at which share equals q, i.e.
/// c(q) = -a/b - [ln(1-q) - ln q] / b. Throws ShareOutOfRange unless
/// 0 < q < 1.
double inverse_cost(const Segment& segment, double share_q);

}  // namespace budgetopt

#endif  // BUDGETOPT_RESPONSE_HPP_
