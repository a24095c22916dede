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

#include "budgetopt/lambertw.hpp"

#include <cmath>

#include <doctest.h>

#include "budgetopt/errors.hpp"
#include "budgetopt/rng.hpp"
#include "test_oracles.hpp"

using budgetopt::lambert_w;
using budgetopt::lambert_w_of_exp;
using budgetopt::Rng;
using budgetopt::WEvalConfig;

namespace {

// Omega constant: root of w e^w = 1, frozen from the bisection oracle below.
constexpr double kOmega = 0.5671432904097838;

}  // namespace

TEST_CASE("lambert_w fixed points") {
  CHECK(lambert_w(0.0) == 0.0);
  CHECK(lambert_w(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));

  // Independent oracle: bisection on w e^w - 1 over [0, 1].
  const double omega = budgetopt::testing::bisect_root(
      [](double w) { return w * std::exp(w) - 1.0; }, 0.0, 1.0);
  CHECK(omega == doctest::Approx(kOmega).epsilon(1e-14));
  CHECK(lambert_w(1.0) == doctest::Approx(omega).epsilon(1e-14));
}

TEST_CASE("lambert_w defining identity on random arguments") {
  Rng rng(20260311);
  for (int i = 0; i < 10000; ++i) {
    const double x = rng.uniform(0.0, 1e6);
    const double w = lambert_w(x);
    CHECK(std::abs(w * std::exp(w) - x) <= 1e-12 * std::max(1.0, x));
  }
}

TEST_CASE("lambert_w monotonicity") {
  Rng rng(77);
  for (int i = 0; i < 2000; ++i) {
    double x1 = rng.uniform(0.0, 1e5);
    double x2 = rng.uniform(0.0, 1e5);
    if (x1 > x2) std::swap(x1, x2);
    CHECK(lambert_w(x1) <= lambert_w(x2));
  }
}

TEST_CASE("lambert_w rejects bad arguments") {
  CHECK_THROWS_AS(lambert_w(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(lambert_w(std::nan("")), std::invalid_argument);
}

TEST_CASE("lambert_w_of_exp fixed points") {
  // w + ln w = 1 at w = 1.
  CHECK(lambert_w_of_exp(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  // W(exp(0)) = W(1) = Omega.
  CHECK(lambert_w_of_exp(0.0) == doctest::Approx(kOmega).epsilon(1e-14));

  // Fixed-point oracle w <- z - ln w for z = 1000, iterated to 1e-12.
  double w = 1000.0;
  for (int i = 0; i < 200; ++i) w = 1000.0 - std::log(w);
  CHECK(w == doctest::Approx(993.0991694723891).epsilon(1e-13));
  CHECK(lambert_w_of_exp(1000.0) == doctest::Approx(w).epsilon(1e-13));
}

TEST_CASE("lambert_w_of_exp agrees with lambert_w below the threshold") {
  Rng rng(99);
  const WEvalConfig config;
  for (int i = 0; i < 5000; ++i) {
    const double z = rng.uniform(-30.0, config.log_domain_threshold);
    const double direct = lambert_w(std::exp(z));
    CHECK(std::abs(lambert_w_of_exp(z) - direct) <= 10.0 * config.abs_tol);
  }
}

TEST_CASE("lambert_w_of_exp stays finite and accurate up to 1e8") {
  Rng rng(123);
  for (int i = 0; i < 2000; ++i) {
    const double z = std::exp(rng.uniform(std::log(30.0), std::log(1e8)));
    const double w = lambert_w_of_exp(z);
    CHECK(std::isfinite(w));
    CHECK(w > 0.0);
    CHECK(std::abs(w + std::log(w) - z) <= 1e-12 * std::max(1.0, std::abs(z)));
  }
  CHECK(std::isfinite(lambert_w_of_exp(1e8)));
}

TEST_CASE("lambert_w_of_exp respects a custom iteration budget") {
  WEvalConfig strict;
  strict.max_iter = 1;
  strict.abs_tol = 1e-15;
  CHECK_THROWS_AS(lambert_w_of_exp(987654.0, strict),
                  budgetopt::NonConvergence);
}
