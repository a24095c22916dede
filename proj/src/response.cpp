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

#include "budgetopt/response.hpp"

#include <cmath>
#include <string>

#include "budgetopt/errors.hpp"

namespace budgetopt {

void validate_segment(const Segment& segment) {
  if (!(segment.size_D > 0.0) || !std::isfinite(segment.size_D)) {
    throw InvalidSegment("segment '" + segment.id + "': D must be > 0");
  }
  if (!(segment.sensitivity_b > 0.0) || !std::isfinite(segment.sensitivity_b)) {
    throw InvalidSegment("segment '" + segment.id + "': b must be > 0");
  }
  if (!std::isfinite(segment.bias_a)) {
    throw InvalidSegment("segment '" + segment.id + "': a must be finite");
  }
  for (std::size_t i = 1; i < segment.options.size(); ++i) {
    if (!(segment.options[i - 1] < segment.options[i])) {
      throw InvalidSegment("segment '" + segment.id +
                           "': options must be strictly ascending");
    }
  }
}

double sigmoid(double t) {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double market_cost(const Segment& segment) {
  return -segment.bias_a / segment.sensitivity_b;
}

double demand(const Segment& segment, double cost) {
  return segment.size_D * sigmoid(segment.bias_a + segment.sensitivity_b * cost);
}

double share(const Segment& segment, double cost) {
  return sigmoid(segment.bias_a + segment.sensitivity_b * cost);
}

double elasticity(const Segment& segment, double cost) {
  // b c / (1 + exp(a + b c)) written through sigmoid(-t) to avoid overflow.
  const double t = segment.bias_a + segment.sensitivity_b * cost;
  return segment.sensitivity_b * cost * sigmoid(-t);
}

double arc_elasticity(const Segment& segment, double cost1, double cost2) {
  if (cost1 == cost2) {
    throw DegenerateArc("arc_elasticity: c1 and c2 must differ");
  }
  if (cost1 == 0.0) {
    throw DegenerateArc("arc_elasticity: c1 must be nonzero");
  }
  const double d1 = demand(segment, cost1);
  const double d2 = demand(segment, cost2);
  return (d2 - d1) * cost1 / ((cost2 - cost1) * d1);
}

double inverse_cost(const Segment& segment, double share_q) {
  if (!(share_q > 0.0) || !(share_q < 1.0)) {
    throw ShareOutOfRange("inverse_cost: share must lie in (0, 1), got " +
                          std::to_string(share_q));
  }
  return -segment.bias_a / segment.sensitivity_b -
         (std::log1p(-share_q) - std::log(share_q)) / segment.sensitivity_b;
}

}  // namespace budgetopt
