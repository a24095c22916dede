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

#include <doctest.h>

#include "budgetopt/errors.hpp"
#include "budgetopt/rng.hpp"
#include "test_oracles.hpp"

using namespace budgetopt;

namespace {

Segment make_segment(double D, double a, double b) {
  Segment seg;
  seg.id = "test";
  seg.size_D = D;
  seg.bias_a = a;
  seg.sensitivity_b = b;
  return seg;
}

}  // namespace

TEST_CASE("validate_segment rejects bad parameters") {
  CHECK_THROWS_AS(validate_segment(make_segment(0.0, 0.0, 1.0)), InvalidSegment);
  CHECK_THROWS_AS(validate_segment(make_segment(1.0, 0.0, 0.0)), InvalidSegment);
  CHECK_THROWS_AS(validate_segment(make_segment(1.0, 0.0, -2.0)),
                  InvalidSegment);
  Segment seg = make_segment(1.0, 0.0, 1.0);
  seg.options = {1.0, 1.0};
  CHECK_THROWS_AS(validate_segment(seg), InvalidSegment);
  seg.options = {1.0, 2.0, 3.0};
  CHECK_NOTHROW(validate_segment(seg));
}

TEST_CASE("demand fixed values") {
  // Half the market at the market cost.
  const Segment seg = make_segment(10.0, 1.5, 0.5);
  CHECK(demand(seg, market_cost(seg)) == doctest::Approx(5.0).epsilon(1e-12));

  const Segment sym = make_segment(1.0, 0.0, 1.0);
  CHECK(demand(sym, 0.0) == doctest::Approx(0.5).epsilon(1e-15));

  // Direct evaluation oracle: 100 / (1 + e^{-1}).
  const Segment ex = make_segment(100.0, 1.0, 2.0);
  CHECK(demand(ex, 0.0) == doctest::Approx(73.1058578630005).epsilon(1e-12));
}

TEST_CASE("demand is strictly increasing and bounded") {
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const Segment seg = make_segment(rng.uniform(0.1, 100.0),
                                     rng.uniform(-3.0, 3.0),
                                     rng.uniform(0.01, 5.0));
    double c1 = rng.uniform(-10.0, 10.0);
    double c2 = rng.uniform(-10.0, 10.0);
    if (c1 == c2) continue;
    if (c1 > c2) std::swap(c1, c2);
    const double d1 = demand(seg, c1);
    const double d2 = demand(seg, c2);
    CHECK(d1 < d2);
    CHECK(d1 > 0.0);
    CHECK(d2 < seg.size_D);
  }
}

TEST_CASE("demand derivative peaks at the market cost") {
  const Segment seg = make_segment(50.0, 0.8, 1.7);
  const double center = market_cost(seg);
  const double lo = center - 10.0 / seg.sensitivity_b;
  const double hi = center + 10.0 / seg.sensitivity_b;
  double best_slope = -1.0;
  double best_c = lo;
  for (int k = 0; k <= 1000; ++k) {
    const double c = lo + (hi - lo) * k / 1000.0;
    const double slope = budgetopt::testing::central_diff(
        [&](double x) { return demand(seg, x); }, c);
    if (slope > best_slope) {
      best_slope = slope;
      best_c = c;
    }
  }
  CHECK(std::abs(best_c - center) <= (hi - lo) / 1000.0 + 1e-12);
}

TEST_CASE("elasticity values") {
  const Segment seg = make_segment(10.0, 0.7, 1.3);
  CHECK(elasticity(seg, 0.0) == 0.0);
  // Elasticity at market cost equals -a/2.
  CHECK(elasticity(seg, market_cost(seg)) ==
        doctest::Approx(-seg.bias_a / 2.0).epsilon(1e-12));
  // 1 / (1 + e) at a=0, b=1, c=1.
  const Segment unit = make_segment(1.0, 0.0, 1.0);
  CHECK(elasticity(unit, 1.0) ==
        doctest::Approx(0.2689414213699951).epsilon(1e-12));
}

TEST_CASE("elasticity matches the finite-difference definition") {
  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Segment seg = make_segment(rng.uniform(1.0, 100.0),
                                     rng.uniform(-2.0, 2.0),
                                     rng.uniform(0.05, 3.0));
    const double c = rng.uniform(0.1, 5.0) * (rng.uniform01() < 0.5 ? -1 : 1);
    const double slope = budgetopt::testing::central_diff(
        [&](double x) { return demand(seg, x); }, c);
    const double expected = slope * c / demand(seg, c);
    CHECK(elasticity(seg, c) == doctest::Approx(expected).epsilon(1e-6));
  }
}

TEST_CASE("arc elasticity") {
  const Segment unit = make_segment(1.0, 0.0, 1.0);
  CHECK_THROWS_AS(arc_elasticity(unit, 1.0, 1.0), DegenerateArc);
  CHECK_THROWS_AS(arc_elasticity(unit, 0.0, 1.0), DegenerateArc);

  // Flat demand (b -> 0): no sales change, arc elasticity ~ 0.
  const Segment flat = make_segment(1.0, 0.0, 1e-12);
  CHECK(std::abs(arc_elasticity(flat, 1.0, 2.0)) < 1e-9);

  // Limit check against the point elasticity.
  CHECK(arc_elasticity(unit, 1.0, 1.01) ==
        doctest::Approx(elasticity(unit, 1.0)).epsilon(0.01));

  // Independent recomputation of the ratio formula at c1=-1, c2=1.
  const double d1 = 1.0 / (1.0 + std::exp(1.0));
  const double d2 = 1.0 / (1.0 + std::exp(-1.0));
  const double expected = (d2 - d1) * (-1.0) / (2.0 * d1);
  CHECK(arc_elasticity(unit, -1.0, 1.0) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("inverse_cost closed form and round trip") {
  const Segment seg = make_segment(4.0, 1.0, 2.0);
  CHECK(inverse_cost(seg, 0.5) ==
        doctest::Approx(market_cost(seg)).epsilon(1e-14));
  CHECK_THROWS_AS(inverse_cost(seg, 0.0), ShareOutOfRange);
  CHECK_THROWS_AS(inverse_cost(seg, 1.0), ShareOutOfRange);
  CHECK_THROWS_AS(inverse_cost(seg, -0.3), ShareOutOfRange);

  // Bisection oracle on share(c) = q.
  const double oracle = budgetopt::testing::bisect_root(
      [&](double c) { return share(seg, c) - 0.7311; }, -50.0, 50.0);
  CHECK(inverse_cost(seg, 0.7311) == doctest::Approx(oracle).epsilon(1e-10));

  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Segment random_seg = make_segment(rng.uniform(0.5, 50.0),
                                            rng.uniform(-2.0, 2.0),
                                            rng.uniform(0.05, 4.0));
    const double c = rng.uniform(-10.0, 10.0);
    CHECK(std::abs(inverse_cost(random_seg, share(random_seg, c)) - c) <=
          1e-10);
  }
}
