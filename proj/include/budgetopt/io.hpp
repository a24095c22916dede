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

#ifndef BUDGETOPT_IO_HPP_
#define BUDGETOPT_IO_HPP_

#include <map>
#include <span>
#include <string>
#include <vector>

#include "budgetopt/allocator.hpp"
#include "budgetopt/discrete.hpp"
#include "budgetopt/forecaster.hpp"
#include "budgetopt/simlab.hpp"

namespace budgetopt {

// File formats. All numeric output uses fixed 12-significant-digit
// formatting so identical inputs produce byte-identical files.

/// Rounds to 12 significant digits (the value written by every emitter).
double round12(double value);
std::string format12(double value);

// --- segments CSV: header segment_id,D,a,b[,options] with options as
// pipe-separated ascending reals. Parse errors carry 1-based line numbers.
std::vector<Segment> load_segments(const std::string& path);
void save_segments(std::span<const Segment> segments, const std::string& path);

// --- history CSV: header segment_id,cost,sales plus one column per
// categorical feature.
struct HistoryRow {
  std::string segment_id;
  double cost = 0.0;
  double sales = 0.0;
  Context context;
};

struct History {
  std::vector<HistoryRow> rows;
  std::vector<std::string> feature_names;
};

History load_history(const std::string& path);

/// Market sizes per segment id, either taken from a segments file or
/// approximated by the maximum sales observed in the history.
std::map<std::string, double> sizes_from_segments(
    std::span<const Segment> segments);
std::map<std::string, double> sizes_from_max_sales(const History& history);

/// Turns history rows into training observations (share = sales / D) plus
/// per-segment contexts. Rows whose segment has no size entry raise
/// UnknownSegment.
Dataset make_dataset(const History& history,
                     const std::map<std::string, double>& sizes);

// --- model document, format "sbb-v1": vocabulary, layer shapes, row-major
// weights, per-segment log_b and contexts.
void save_model(const SemiBlackBoxModel& model, const std::string& path);
SemiBlackBoxModel load_model(const std::string& path);

// --- allocation report: JSON document plus a per-segment CSV mirror.
void write_allocation_json(const AllocationSolution& solution,
                           const std::string& path);
void write_allocation_csv(const AllocationSolution& solution,
                          const std::string& path);
void write_discrete_json(const DiscreteSolution& solution,
                         DiscreteStrategy strategy, const std::string& path);
void write_discrete_csv(const DiscreteSolution& solution,
                        std::span<const Segment> segments,
                        const std::string& path);

// --- experiment reports (plot-ready long format).
void write_sensitivity_csv(std::span<const SensitivityReport> reports,
                           const std::string& path);
void write_sensitivity_json(std::span<const SensitivityReport> reports,
                            const std::string& path);
void write_convergence_csv(std::span<const ConvergenceRun> runs,
                           const std::string& path);
void write_discrete_error_csv(std::span<const DiscreteErrorCell> cells,
                              const std::string& path);
void write_discrete_error_json(std::span<const DiscreteErrorCell> cells,
                               const std::string& path);

// --- prediction rows (segment, cost, share, sales).
struct PredictionRow {
  std::string segment_id;
  double cost = 0.0;
  double share = 0.0;
  double sales = 0.0;
};

void write_predictions_csv(std::span<const PredictionRow> rows,
                           const std::string& path);

}  // namespace budgetopt

#endif  // BUDGETOPT_IO_HPP_
