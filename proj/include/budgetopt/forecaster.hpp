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

#ifndef BUDGETOPT_FORECASTER_HPP_
#define BUDGETOPT_FORECASTER_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "budgetopt/response.hpp"

namespace budgetopt {

// The semi-black-box response model: a shared feed-forward network maps the
// categorical context of a segment to its elasticity at market cost e(x),
// which fixes the logit bias a = -2 e(x); a per-segment sensitivity
// b = exp(log_b) completes the curve
//
//   q(c) = 1 / (1 + exp(2 e(x) - b c)).
//
// Sharing e(x) across segments with similar context is what lets sparsely
// observed segments borrow strength from the rest of the data.

/// Ordered one-hot vocabulary. Every feature block reserves its final slot
/// for unseen categories, so a feature with k known categories encodes into
/// k + 1 positions and any context value maps to exactly one hot index.
class FeatureVocabulary {
 public:
  struct Feature {
    std::string name;
    std::vector<std::string> categories;  ///< known values; unknown slot is last
  };

  /// Appends a feature; category indices are assigned in the given order.
  void add_feature(std::string name, std::vector<std::string> categories);

  /// Vocabulary over all features/values present in the contexts, with
  /// feature names and category values sorted for determinism.
  static FeatureVocabulary build(const std::map<std::string, Context>& contexts);

  /// Total one-hot width: sum over features of (categories + unknown slot).
  std::size_t encoded_width() const;

  /// Concatenated one-hot blocks; exactly one hot index per feature. Values
  /// absent from the vocabulary (or missing from the context) hit the
  /// feature's unknown slot.
  std::vector<double> encode(const Context& context) const;

  const std::vector<Feature>& features() const { return features_; }
  bool empty() const { return features_.empty(); }

 private:
  std::vector<Feature> features_;
};

/// Fully connected scalar-output network: input -> 16 -> 16 -> 16 -> 16 -> 1
/// with rectified-linear activations between layers. Weights are row-major
/// [out][in].
struct ElasticityNetwork {
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::vector<double> weights;  ///< out * in, row-major
    std::vector<double> bias;     ///< out
  };

  static constexpr std::size_t kHiddenWidth = 16;
  static constexpr std::size_t kLayerCount = 5;

  std::vector<Layer> layers;

  /// Network with the standard shape for the given input width; all
  /// parameters zero.
  static ElasticityNetwork make(std::size_t input_width);

  double forward(std::span<const double> input) const;

  /// Forward pass keeping every layer's output; activations[0] is the input
  /// and activations[kLayerCount] the scalar e(x).
  std::vector<std::vector<double>> forward_cached(
      std::span<const double> input) const;

  std::size_t parameter_count() const;
};

struct SemiBlackBoxModel {
  struct SegmentEntry {
    std::string id;
    Context context;
    double log_b = 0.0;  ///< b = exp(log_b) > 0
  };

  FeatureVocabulary vocabulary;
  ElasticityNetwork network;
  std::vector<SegmentEntry> segments;  ///< sorted by id

  /// Sorts the entries by id; loaders call this before lookups.
  void sort_segments();

  std::size_t segment_index(const std::string& id) const;  ///< UnknownSegment
  bool has_segment(const std::string& id) const;

  /// e(x) of a segment's context through the shared network.
  double elasticity_at_market_cost(std::size_t index) const;

  /// Logit parameters of a segment: a = -2 e(x), b = exp(log_b). Exporting
  /// them into a response::Segment reproduces predict_share exactly.
  std::pair<double, double> logit_params(std::size_t index) const;

  /// Predicted market share 1 / (1 + exp(2 e(x) - b c)) in (0, 1).
  double predict_share(const std::string& id, double cost) const;
  double predict_share_by_index(std::size_t index, double cost) const;
};

/// One historical observation: share = sales / D, clamped into
/// [kShareClamp, 1 - kShareClamp] before entering the likelihood.
struct Observation {
  std::string segment_id;
  double cost = 0.0;
  double share = 0.5;
  double weight = 1.0;
};

inline constexpr double kShareClamp = 1e-6;

struct Dataset {
  std::vector<Observation> observations;
  std::map<std::string, Context> contexts;  ///< per segment id
};

enum class InitScheme {
  /// Hidden layers U(-init_scale, init_scale), output layer and log_b zero.
  /// Strict zero initialization cannot train a deep rectified network, so
  /// this keeps the "start neutral" behavior (e(x) = 0, b = 1) while making
  /// the hidden stack trainable.
  kScaledUniform,
  /// Everything zero (the degenerate literal configuration; kept selectable).
  kZero,
};

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 200;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  InitScheme init_scheme = InitScheme::kScaledUniform;
  double init_scale = 0.05;
  /// 0 = full batch; otherwise shuffled minibatches of this size.
  int batch_size = 0;
};

/// Weighted mean negative log-likelihood of the observed shares:
/// -[q^ ln q + (1 - q^) ln(1 - q)] averaged over the batch.
double nll_loss(const SemiBlackBoxModel& model,
                std::span<const Observation> batch);

/// Analytic gradients of nll_loss, laid out as the network layers plus one
/// log_b slot per model segment. Exposed for finite-difference checks.
struct ModelGradients {
  std::vector<ElasticityNetwork::Layer> layers;  ///< same shapes as the network
  std::vector<double> log_b;
};

ModelGradients nll_gradients(const SemiBlackBoxModel& model,
                             std::span<const Observation> batch);

/// Trains the shared network and per-segment log_b by Adam on the mean NLL.
/// Deterministic for a fixed config seed. Throws EmptyDataset when no
/// observations are given.
SemiBlackBoxModel train(const Dataset& dataset, const TrainConfig& config);

/// Per-segment baseline: maximize the same likelihood over a single
/// segment's raw (a, b) by Adam from zero. Throws InsufficientData unless
/// the observations carry at least two distinct costs.
struct LogitFit {
  double bias_a = 0.0;
  double sensitivity_b = 0.0;
  double final_loss = 0.0;
};

LogitFit fit_independent_logit(std::span<const Observation> observations,
                               const TrainConfig& config = {});

/// Relative mean absolute error sum|y - y^| / sum y^, with y^ the true
/// values. Throws ZeroDenominator when the truths sum to zero.
double rmae(std::span<const double> predictions, std::span<const double> truths);

}  // namespace budgetopt

#endif  // BUDGETOPT_FORECASTER_HPP_
