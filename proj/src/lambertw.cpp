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
#include <limits>
#include <stdexcept>
#include <string>

#include "budgetopt/errors.hpp"

namespace budgetopt {
namespace {

// Initial guess for W(x), x >= 0. Series near zero, ln-based in the middle,
// two-term asymptotic expansion for large x.
double initial_guess(double x) {
  if (x < 1.0) {
    // W(x) = x - x^2 + 1.5 x^3 - ... for small x; truncations stay in the
    // Halley basin everywhere on [0, 1).
    return x * (1.0 - x + 1.5 * x * x) / (1.0 + 0.5 * x * x);
  }
  if (x < 20.0) {
    return 0.5 * std::log1p(x) + 0.25;
  }
  const double l1 = std::log(x);
  const double l2 = std::log(l1);
  return l1 - l2 + l2 / l1;
}

}  // namespace

double lambert_w(double x, const WEvalConfig& config) {
  if (std::isnan(x) || x < 0.0) {
    throw std::invalid_argument("lambert_w: argument must be >= 0");
  }
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) {
    throw std::invalid_argument("lambert_w: argument must be finite");
  }

  const double scale = std::max(1.0, x);
  double w = initial_guess(x);
  double residual = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < config.max_iter; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    residual = std::abs(f);
    // Converge well past the contract tolerance; extra Halley steps are
    // nearly free and the tail callers divide by small quantities.
    if (residual <= 0.25 * std::numeric_limits<double>::epsilon() * scale) {
      return w;
    }
    // Halley step for f(w) = w e^w - x.
    const double denom = ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0);
    const double step = f / denom;
    w -= step;
    if (std::abs(step) <= std::numeric_limits<double>::epsilon() * std::abs(w)) {
      break;
    }
  }
  residual = std::abs(w * std::exp(w) - x);
  if (!(residual <= config.abs_tol * scale)) {
    throw NonConvergence("lambert_w: residual " + std::to_string(residual) +
                         " above tolerance at x=" + std::to_string(x));
  }
  return w;
}

double lambert_w_of_exp(double z, const WEvalConfig& config) {
  if (std::isnan(z) || std::isinf(z)) {
    throw std::invalid_argument("lambert_w_of_exp: argument must be finite");
  }
  // W(e^z) = e^z to double precision once e^z is below the epsilon of 1;
  // exp underflow for very negative z is then the best representable answer.
  if (z <= -37.0) return std::exp(z);
  if (z <= config.log_domain_threshold) {
    return lambert_w(std::exp(z), config);
  }

  // Log domain: solve phi(w) = w + ln w - z = 0 with w0 from the asymptotic
  // expansion w ~ z - ln z. For z > 30 the root exceeds 26, so ln w and the
  // Halley denominators are well conditioned.
  const double scale = std::max(1.0, std::abs(z));
  double w = z - std::log(z);
  for (int iter = 0; iter < config.max_iter; ++iter) {
    const double f = w + std::log(w) - z;
    if (std::abs(f) <= 0.25 * std::numeric_limits<double>::epsilon() * scale) {
      break;
    }
    const double d1 = 1.0 + 1.0 / w;       // phi'
    const double d2 = -1.0 / (w * w);      // phi''
    const double step = 2.0 * f * d1 / (2.0 * d1 * d1 - f * d2);
    w -= step;
    if (std::abs(step) <= std::numeric_limits<double>::epsilon() * w) break;
  }
  const double residual = std::abs(w + std::log(w) - z);
  if (!(residual <= config.abs_tol * scale)) {
    throw NonConvergence("lambert_w_of_exp: residual " +
                         std::to_string(residual) + " above tolerance at z=" +
                         std::to_string(z));
  }
  return w;
}

}  // namespace budgetopt
