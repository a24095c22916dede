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

#include "budgetopt/io.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "budgetopt/errors.hpp"

namespace budgetopt {

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error("cannot write '" + path + "'");
  }
  out << content;
  if (!out) {
    throw Error("short write to '" + path + "'");
  }
}

/// Splits one CSV line; supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv(const std::string& line, std::size_t lineno) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"' && current.empty()) {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (quoted) {
    throw ParseError("unterminated quote", lineno);
  }
  fields.push_back(std::move(current));
  return fields;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (const char ch : text) {
    if (ch == '\n') {
      if (!current.empty() && current.back() == '\r') current.pop_back();
      lines.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  if (!current.empty()) {
    if (current.back() == '\r') current.pop_back();
    lines.push_back(std::move(current));
  }
  return lines;
}

double parse_double(const std::string& text, const char* what,
                    std::size_t lineno) {
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') {
    throw ParseError(std::string("bad ") + what + " value '" + text + "'",
                     lineno);
  }
  return value;
}

json to_json12(double value) { return json(round12(value)); }

}  // namespace

double round12(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return std::strtod(buffer, nullptr);
}

std::string format12(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::vector<Segment> load_segments(const std::string& path) {
  const std::vector<std::string> lines = split_lines(slurp(path));
  if (lines.empty()) {
    throw ParseError("empty segments file '" + path + "'", 1);
  }
  const std::vector<std::string> header = split_csv(lines[0], 1);
  const std::vector<std::string> want = {"segment_id", "D", "a", "b"};
  const bool has_options = header.size() == 5 && header[4] == "options";
  if (header.size() < 4 || header.size() > 5 ||
      !std::equal(want.begin(), want.end(), header.begin()) ||
      (header.size() == 5 && !has_options)) {
    throw ParseError("segments header must be segment_id,D,a,b[,options]", 1);
  }

  std::vector<Segment> segments;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t lineno = i + 1;
    const std::vector<std::string> fields = split_csv(lines[i], lineno);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       lineno);
    }
    Segment seg;
    seg.id = fields[0];
    if (!seen.insert(seg.id).second) {
      throw ParseError("duplicate segment id '" + seg.id + "'", lineno);
    }
    seg.size_D = parse_double(fields[1], "D", lineno);
    seg.bias_a = parse_double(fields[2], "a", lineno);
    seg.sensitivity_b = parse_double(fields[3], "b", lineno);
    if (has_options && !fields[4].empty()) {
      std::stringstream pipe(fields[4]);
      std::string token;
      while (std::getline(pipe, token, '|')) {
        seg.options.push_back(parse_double(token, "option", lineno));
      }
    }
    try {
      validate_segment(seg);
    } catch (const InvalidSegment& bad) {
      throw ParseError(bad.what(), lineno);
    }
    segments.push_back(std::move(seg));
  }
  return segments;
}

void save_segments(std::span<const Segment> segments, const std::string& path) {
  std::ostringstream out;
  bool any_options = false;
  for (const Segment& seg : segments) {
    any_options = any_options || !seg.options.empty();
  }
  out << (any_options ? "segment_id,D,a,b,options\n" : "segment_id,D,a,b\n");
  for (const Segment& seg : segments) {
    out << seg.id << ',' << format12(seg.size_D) << ',' << format12(seg.bias_a)
        << ',' << format12(seg.sensitivity_b);
    if (any_options) {
      out << ',';
      for (std::size_t i = 0; i < seg.options.size(); ++i) {
        if (i > 0) out << '|';
        out << format12(seg.options[i]);
      }
    }
    out << '\n';
  }
  spit(path, out.str());
}

History load_history(const std::string& path) {
  const std::vector<std::string> lines = split_lines(slurp(path));
  if (lines.empty()) {
    throw ParseError("empty history file '" + path + "'", 1);
  }
  const std::vector<std::string> header = split_csv(lines[0], 1);
  if (header.size() < 3 || header[0] != "segment_id" || header[1] != "cost" ||
      header[2] != "sales") {
    throw ParseError("history header must start with segment_id,cost,sales", 1);
  }
  History history;
  history.feature_names.assign(header.begin() + 3, header.end());
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const std::size_t lineno = i + 1;
    const std::vector<std::string> fields = split_csv(lines[i], lineno);
    if (fields.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       lineno);
    }
    HistoryRow row;
    row.segment_id = fields[0];
    row.cost = parse_double(fields[1], "cost", lineno);
    row.sales = parse_double(fields[2], "sales", lineno);
    if (row.sales < 0.0) {
      throw ParseError("sales must be >= 0", lineno);
    }
    for (std::size_t f = 0; f < history.feature_names.size(); ++f) {
      row.context[history.feature_names[f]] = fields[3 + f];
    }
    history.rows.push_back(std::move(row));
  }
  return history;
}

std::map<std::string, double> sizes_from_segments(
    std::span<const Segment> segments) {
  std::map<std::string, double> sizes;
  for (const Segment& seg : segments) sizes[seg.id] = seg.size_D;
  return sizes;
}

std::map<std::string, double> sizes_from_max_sales(const History& history) {
  std::map<std::string, double> sizes;
  for (const HistoryRow& row : history.rows) {
    auto [it, inserted] = sizes.emplace(row.segment_id, row.sales);
    if (!inserted) it->second = std::max(it->second, row.sales);
  }
  return sizes;
}

Dataset make_dataset(const History& history,
                     const std::map<std::string, double>& sizes) {
  Dataset dataset;
  for (const HistoryRow& row : history.rows) {
    const auto it = sizes.find(row.segment_id);
    if (it == sizes.end()) {
      throw UnknownSegment("history row references unknown segment '" +
                           row.segment_id + "'");
    }
    if (!(it->second > 0.0)) {
      throw InvalidSegment("segment '" + row.segment_id +
                           "' has non-positive market size");
    }
    Observation obs;
    obs.segment_id = row.segment_id;
    obs.cost = row.cost;
    obs.share = std::clamp(row.sales / it->second, kShareClamp,
                           1.0 - kShareClamp);
    dataset.observations.push_back(std::move(obs));
    dataset.contexts[row.segment_id] = row.context;
  }
  return dataset;
}

void save_model(const SemiBlackBoxModel& model, const std::string& path) {
  json doc;
  doc["format"] = "sbb-v1";
  json features = json::array();
  for (const auto& feature : model.vocabulary.features()) {
    features.push_back(
        {{"name", feature.name}, {"categories", feature.categories}});
  }
  doc["features"] = features;
  json layers = json::array();
  for (const auto& layer : model.network.layers) {
    layers.push_back({{"in", layer.in},
                      {"out", layer.out},
                      {"weights", layer.weights},
                      {"bias", layer.bias}});
  }
  doc["network"] = {{"layers", layers}};
  json segments = json::array();
  for (const auto& entry : model.segments) {
    segments.push_back({{"id", entry.id},
                        {"context", entry.context},
                        {"log_b", entry.log_b}});
  }
  doc["segments"] = segments;
  spit(path, doc.dump(2) + "\n");
}

SemiBlackBoxModel load_model(const std::string& path) {
  json doc;
  try {
    doc = json::parse(slurp(path));
  } catch (const json::parse_error& err) {
    throw ParseError("model file '" + path + "': " + err.what());
  }
  if (doc.value("format", "") != "sbb-v1") {
    throw ParseError("model file '" + path + "' is not format sbb-v1");
  }
  SemiBlackBoxModel model;
  for (const auto& feature : doc.at("features")) {
    model.vocabulary.add_feature(feature.at("name").get<std::string>(),
                                 feature.at("categories")
                                     .get<std::vector<std::string>>());
  }
  for (const auto& layer : doc.at("network").at("layers")) {
    ElasticityNetwork::Layer l;
    l.in = layer.at("in").get<std::size_t>();
    l.out = layer.at("out").get<std::size_t>();
    l.weights = layer.at("weights").get<std::vector<double>>();
    l.bias = layer.at("bias").get<std::vector<double>>();
    if (l.weights.size() != l.in * l.out || l.bias.size() != l.out) {
      throw ParseError("model file '" + path + "': layer shape mismatch");
    }
    model.network.layers.push_back(std::move(l));
  }
  for (const auto& entry : doc.at("segments")) {
    SemiBlackBoxModel::SegmentEntry seg;
    seg.id = entry.at("id").get<std::string>();
    seg.context = entry.at("context").get<Context>();
    seg.log_b = entry.at("log_b").get<double>();
    model.segments.push_back(std::move(seg));
  }
  model.sort_segments();
  return model;
}

void write_allocation_json(const AllocationSolution& solution,
                           const std::string& path) {
  json doc;
  doc["lambda_star"] = solution.lambda_star.has_value()
                           ? to_json12(*solution.lambda_star)
                           : json(nullptr);
  doc["objective"] = to_json12(solution.objective);
  doc["spend"] = to_json12(solution.spend);
  doc["roi"] = solution.spend != 0.0
                   ? to_json12(solution.objective / solution.spend)
                   : json(nullptr);
  doc["iterations"] = solution.iterations;
  doc["termination"] = to_string(solution.termination);
  json rows = json::array();
  for (const auto& seg : solution.per_segment) {
    rows.push_back({{"id", seg.id},
                    {"c", to_json12(seg.cost)},
                    {"q", to_json12(seg.share)},
                    {"sales", to_json12(seg.sales)},
                    {"spend", to_json12(seg.spend)}});
  }
  doc["per_segment"] = rows;
  spit(path, doc.dump(2) + "\n");
}

void write_allocation_csv(const AllocationSolution& solution,
                          const std::string& path) {
  std::ostringstream out;
  out << "id,c,q,sales,spend\n";
  for (const auto& seg : solution.per_segment) {
    out << seg.id << ',' << format12(seg.cost) << ',' << format12(seg.share)
        << ',' << format12(seg.sales) << ',' << format12(seg.spend) << '\n';
  }
  spit(path, out.str());
}

void write_discrete_json(const DiscreteSolution& solution,
                         DiscreteStrategy strategy, const std::string& path) {
  json doc;
  doc["strategy"] = to_string(strategy);
  doc["objective"] = to_json12(solution.objective);
  doc["spend"] = to_json12(solution.spend);
  doc["lp_bound"] = to_json12(solution.lp_bound);
  doc["approx_error_upper_bound"] =
      solution.approx_error_upper_bound.has_value()
          ? to_json12(*solution.approx_error_upper_bound)
          : json(nullptr);
  doc["no_action_segments"] = solution.no_action_segments;
  json rows = json::array();
  for (std::size_t i = 0; i < solution.chosen_cost.size(); ++i) {
    rows.push_back(
        {{"id", i < solution.segment_ids.size() ? solution.segment_ids[i]
                                                : std::to_string(i)},
         {"c", to_json12(solution.chosen_cost[i])}});
  }
  doc["per_segment"] = rows;
  spit(path, doc.dump(2) + "\n");
}

void write_discrete_csv(const DiscreteSolution& solution,
                        std::span<const Segment> segments,
                        const std::string& path) {
  std::ostringstream out;
  out << "id,c,sales,spend\n";
  for (std::size_t i = 0; i < solution.chosen_cost.size(); ++i) {
    const double c = solution.chosen_cost[i];
    const double d = demand(segments[i], c);
    out << segments[i].id << ',' << format12(c) << ',' << format12(d) << ','
        << format12(d * c) << '\n';
  }
  spit(path, out.str());
}

void write_sensitivity_csv(std::span<const SensitivityReport> reports,
                           const std::string& path) {
  std::ostringstream out;
  out << "bias_level,target,objective_error_mean,objective_error_stddev,"
         "exceeded_budget_mean,exceeded_budget_stddev,runs,seed\n";
  for (const auto& report : reports) {
    out << format12(report.bias_level) << ','
        << (report.which == BiasTarget::kBias_a ? 'a' : 'b') << ','
        << format12(report.objective_error_mean) << ','
        << format12(report.objective_error_stddev) << ','
        << format12(report.exceeded_budget_mean) << ','
        << format12(report.exceeded_budget_stddev) << ',' << report.runs << ','
        << report.seed << '\n';
  }
  spit(path, out.str());
}

void write_sensitivity_json(std::span<const SensitivityReport> reports,
                            const std::string& path) {
  json rows = json::array();
  for (const auto& report : reports) {
    rows.push_back(
        {{"bias_level", to_json12(report.bias_level)},
         {"target", report.which == BiasTarget::kBias_a ? "a" : "b"},
         {"objective_error_mean", to_json12(report.objective_error_mean)},
         {"objective_error_stddev", to_json12(report.objective_error_stddev)},
         {"exceeded_budget_mean", to_json12(report.exceeded_budget_mean)},
         {"exceeded_budget_stddev", to_json12(report.exceeded_budget_stddev)},
         {"runs", report.runs},
         {"seed", report.seed}});
  }
  spit(path, rows.dump(2) + "\n");
}

void write_convergence_csv(std::span<const ConvergenceRun> runs,
                           const std::string& path) {
  std::ostringstream out;
  out << "run_seed,iteration,phase,lambda_l,lambda_r,f_l,f_r,g_l,g_r\n";
  for (const auto& run : runs) {
    for (const auto& entry : run.trace) {
      out << run.seed << ',' << entry.iteration << ',' << entry.phase << ','
          << format12(entry.lambda_l) << ',' << format12(entry.lambda_r) << ','
          << format12(entry.f_l) << ',' << format12(entry.f_r) << ','
          << format12(entry.g_l) << ',' << format12(entry.g_r) << '\n';
    }
  }
  spit(path, out.str());
}

void write_discrete_error_csv(std::span<const DiscreteErrorCell> cells,
                              const std::string& path) {
  std::ostringstream out;
  out << "distance,strategy,mean_percent,stddev_percent,runs,seed\n";
  for (const auto& cell : cells) {
    out << format12(cell.distance) << ',' << to_string(cell.strategy) << ','
        << format12(cell.mean_percent) << ',' << format12(cell.stddev_percent)
        << ',' << cell.runs << ',' << cell.seed << '\n';
  }
  spit(path, out.str());
}

void write_discrete_error_json(std::span<const DiscreteErrorCell> cells,
                               const std::string& path) {
  json rows = json::array();
  for (const auto& cell : cells) {
    rows.push_back({{"distance", to_json12(cell.distance)},
                    {"strategy", to_string(cell.strategy)},
                    {"mean_percent", to_json12(cell.mean_percent)},
                    {"stddev_percent", to_json12(cell.stddev_percent)},
                    {"runs", cell.runs},
                    {"seed", cell.seed}});
  }
  spit(path, rows.dump(2) + "\n");
}

void write_predictions_csv(std::span<const PredictionRow> rows,
                           const std::string& path) {
  std::ostringstream out;
  out << "segment_id,c,q,sales\n";
  for (const auto& row : rows) {
    out << row.segment_id << ',' << format12(row.cost) << ','
        << format12(row.share) << ',' << format12(row.sales) << '\n';
  }
  spit(path, out.str());
}

}  // namespace budgetopt
