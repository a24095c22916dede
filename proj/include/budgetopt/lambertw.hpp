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

#ifndef BUDGETOPT_LAMBERTW_HPP_
#define BUDGETOPT_LAMBERTW_HPP_

namespace budgetopt {

/// Tolerances for the Lambert W evaluators.
struct WEvalConfig {
  /// Residual tolerance: |w e^w - x| <= abs_tol * max(1, x).
  double abs_tol = 1e-12;
  /// Iteration cap for the Halley loops.
  int max_iter = 64;
  /// Above this z, W(exp(z)) is solved in the log domain without forming
  /// exp(z). exp(30) ~ 1e13 is still exactly representable, leaving a wide
  /// margin before exp overflows near z = 709.
  double log_domain_threshold = 30.0;
};

// Principal-branch Lambert W for nonnegative arguments: the w >= 0 solving
// w * exp(w) = x. Halley iteration from an asymptotic initial guess; cubic
// convergence reaches machine accuracy in a handful of steps.
//
// Throws NonConvergence if |w e^w - x| <= abs_tol * max(1, x) cannot be met
// within max_iter, std::invalid_argument for x < 0 or NaN.
double lambert_w(double x, const WEvalConfig& config = {});

// W(exp(z)) computed without overflow: for large z the equivalent equation
// w + ln w = z is solved directly, so arguments such as z = 1e8 stay finite.
// Returns w > 0 with |w + ln w - z| <= abs_tol * max(1, |z|). For
// z <= log_domain_threshold this agrees with lambert_w(exp(z)).
double lambert_w_of_exp(double z, const WEvalConfig& config = {});

}  // namespace budgetopt

#endif  // BUDGETOPT_LAMBERTW_HPP_
