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

#ifndef BUDGETOPT_ERRORS_HPP_
#define BUDGETOPT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace budgetopt {

/// Base class of all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative routine failed to reach its residual tolerance.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A market share argument was outside the open interval (0, 1).
class ShareOutOfRange : public Error {
 public:
  using Error::Error;
};

/// Arc elasticity requested with c1 == c2 or c1 == 0.
class DegenerateArc : public Error {
 public:
  using Error::Error;
};

/// A segment violates its invariants (D <= 0, b <= 0, unsorted options).
class InvalidSegment : public Error {
 public:
  using Error::Error;
};

/// The budget bound is below the minimum attainable total spend.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// A knapsack instance admits no choice within its capacity.
class InfeasibleInstance : public Error {
 public:
  using Error::Error;
};

/// A segment id was not found in the model or input file.
class UnknownSegment : public Error {
 public:
  using Error::Error;
};

/// Training was requested on a dataset with no usable observations.
class EmptyDataset : public Error {
 public:
  using Error::Error;
};

/// Per-segment fit with fewer than two distinct cost values.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// RMAE denominator (sum of true values) is zero.
class ZeroDenominator : public Error {
 public:
  using Error::Error;
};

/// Brute-force grid would exceed the evaluation cap.
class GridTooLarge : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; carries a 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(message + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& message) : Error(message), line_(0) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace budgetopt

#endif  // BUDGETOPT_ERRORS_HPP_
