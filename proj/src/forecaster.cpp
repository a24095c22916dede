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

#include "budgetopt/forecaster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "budgetopt/errors.hpp"
#include "budgetopt/rng.hpp"

namespace budgetopt {

namespace {

double clamp_share(double q) {
  return std::clamp(q, kShareClamp, 1.0 - kShareClamp);
}

/// Per-observation NLL term for predicted share q and observed share qh.
double nll_term(double q, double qh) {
  return -(qh * std::log(q) + (1.0 - qh) * std::log1p(-q));
}

}  // namespace

void FeatureVocabulary::add_feature(std::string name,
                                    std::vector<std::string> categories) {
  for (const Feature& f : features_) {
    if (f.name == name) {
      throw std::invalid_argument("vocabulary: duplicate feature '" + name +
                                  "'");
    }
  }
  features_.push_back({std::move(name), std::move(categories)});
}

FeatureVocabulary FeatureVocabulary::build(
    const std::map<std::string, Context>& contexts) {
  std::map<std::string, std::set<std::string>> values;
  for (const auto& [id, context] : contexts) {
    for (const auto& [feature, value] : context) {
      values[feature].insert(value);
    }
  }
  FeatureVocabulary vocab;
  for (const auto& [feature, cats] : values) {
    vocab.add_feature(feature, {cats.begin(), cats.end()});
  }
  return vocab;
}

std::size_t FeatureVocabulary::encoded_width() const {
  std::size_t width = 0;
  for (const Feature& f : features_) width += f.categories.size() + 1;
  return width;
}

std::vector<double> FeatureVocabulary::encode(const Context& context) const {
  std::vector<double> encoded(encoded_width(), 0.0);
  std::size_t offset = 0;
  for (const Feature& f : features_) {
    std::size_t hot = f.categories.size();  // unknown slot
    if (const auto it = context.find(f.name); it != context.end()) {
      const auto pos =
          std::find(f.categories.begin(), f.categories.end(), it->second);
      if (pos != f.categories.end()) {
        hot = static_cast<std::size_t>(pos - f.categories.begin());
      }
    }
    encoded[offset + hot] = 1.0;
    offset += f.categories.size() + 1;
  }
  return encoded;
}

ElasticityNetwork ElasticityNetwork::make(std::size_t input_width) {
  ElasticityNetwork net;
  std::size_t in = input_width;
  for (std::size_t layer = 0; layer < kLayerCount; ++layer) {
    const std::size_t out = layer + 1 < kLayerCount ? kHiddenWidth : 1;
    Layer l;
    l.in = in;
    l.out = out;
    l.weights.assign(in * out, 0.0);
    l.bias.assign(out, 0.0);
    net.layers.push_back(std::move(l));
    in = out;
  }
  return net;
}

double ElasticityNetwork::forward(std::span<const double> input) const {
  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  for (std::size_t layer = 0; layer < layers.size(); ++layer) {
    const Layer& l = layers[layer];
    next.assign(l.out, 0.0);
    for (std::size_t r = 0; r < l.out; ++r) {
      double z = l.bias[r];
      const double* row = l.weights.data() + r * l.in;
      for (std::size_t c = 0; c < l.in; ++c) z += row[c] * current[c];
      if (layer + 1 < layers.size()) z = std::max(z, 0.0);
      next[r] = z;
    }
    current.swap(next);
  }
  return current[0];
}

std::vector<std::vector<double>> ElasticityNetwork::forward_cached(
    std::span<const double> input) const {
  std::vector<std::vector<double>> acts;
  acts.reserve(layers.size() + 1);
  acts.emplace_back(input.begin(), input.end());
  for (std::size_t layer = 0; layer < layers.size(); ++layer) {
    const Layer& l = layers[layer];
    std::vector<double> out(l.out, 0.0);
    const std::vector<double>& prev = acts.back();
    for (std::size_t r = 0; r < l.out; ++r) {
      double z = l.bias[r];
      const double* row = l.weights.data() + r * l.in;
      for (std::size_t c = 0; c < l.in; ++c) z += row[c] * prev[c];
      if (layer + 1 < layers.size()) z = std::max(z, 0.0);
      out[r] = z;
    }
    acts.push_back(std::move(out));
  }
  return acts;
}

std::size_t ElasticityNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

void SemiBlackBoxModel::sort_segments() {
  std::sort(segments.begin(), segments.end(),
            [](const SegmentEntry& x, const SegmentEntry& y) {
              return x.id < y.id;
            });
}

std::size_t SemiBlackBoxModel::segment_index(const std::string& id) const {
  // Entries are kept sorted by id (train() and the model loader both
  // guarantee it), so lookup is a binary search.
  const auto it = std::lower_bound(
      segments.begin(), segments.end(), id,
      [](const SegmentEntry& entry, const std::string& key) {
        return entry.id < key;
      });
  if (it == segments.end() || it->id != id) {
    throw UnknownSegment("model has no segment '" + id + "'");
  }
  return static_cast<std::size_t>(it - segments.begin());
}

bool SemiBlackBoxModel::has_segment(const std::string& id) const {
  const auto it = std::lower_bound(
      segments.begin(), segments.end(), id,
      [](const SegmentEntry& entry, const std::string& key) {
        return entry.id < key;
      });
  return it != segments.end() && it->id == id;
}

double SemiBlackBoxModel::elasticity_at_market_cost(std::size_t index) const {
  const std::vector<double> x = vocabulary.encode(segments.at(index).context);
  return network.forward(x);
}

std::pair<double, double> SemiBlackBoxModel::logit_params(
    std::size_t index) const {
  const double e = elasticity_at_market_cost(index);
  return {-2.0 * e, std::exp(segments.at(index).log_b)};
}

double SemiBlackBoxModel::predict_share(const std::string& id,
                                        double cost) const {
  return predict_share_by_index(segment_index(id), cost);
}

double SemiBlackBoxModel::predict_share_by_index(std::size_t index,
                                                 double cost) const {
  const auto [a, b] = logit_params(index);
  return sigmoid(a + b * cost);
}

double nll_loss(const SemiBlackBoxModel& model,
                std::span<const Observation> batch) {
  double loss = 0.0;
  double total_weight = 0.0;
  // e(x) depends only on the segment, so evaluate it once per segment seen.
  std::map<std::string, std::pair<double, double>> params;
  for (const Observation& obs : batch) {
    auto it = params.find(obs.segment_id);
    if (it == params.end()) {
      it = params
               .emplace(obs.segment_id,
                        model.logit_params(model.segment_index(obs.segment_id)))
               .first;
    }
    const auto [a, b] = it->second;
    const double q = sigmoid(a + b * obs.cost);
    loss += obs.weight * nll_term(q, clamp_share(obs.share));
    total_weight += obs.weight;
  }
  if (total_weight <= 0.0) return 0.0;
  return loss / total_weight;
}

namespace {

/// Shared accumulation core of nll_gradients and train: walks the batch
/// grouped by segment, backpropagating the weighted dL/de into the network
/// gradient layers and the per-segment log_b slots.
struct GradientWorkspace {
  std::vector<std::vector<std::size_t>> obs_by_segment;
  std::vector<std::vector<double>> encoded;

  GradientWorkspace(const SemiBlackBoxModel& model,
                    std::span<const Observation> batch) {
    obs_by_segment.resize(model.segments.size());
    for (std::size_t k = 0; k < batch.size(); ++k) {
      obs_by_segment[model.segment_index(batch[k].segment_id)].push_back(k);
    }
    encoded.reserve(model.segments.size());
    for (const auto& entry : model.segments) {
      encoded.push_back(model.vocabulary.encode(entry.context));
    }
  }
};

void accumulate_gradients(const SemiBlackBoxModel& model,
                          std::span<const Observation> batch,
                          const GradientWorkspace& ws, ModelGradients* grads,
                          double* loss_out) {
  double total_weight = 0.0;
  for (const Observation& obs : batch) total_weight += obs.weight;
  if (total_weight <= 0.0) return;

  double loss = 0.0;
  const std::size_t n_layers = model.network.layers.size();
  for (std::size_t s = 0; s < model.segments.size(); ++s) {
    if (ws.obs_by_segment[s].empty()) continue;
    const auto acts = model.network.forward_cached(ws.encoded[s]);
    const double e = acts.back()[0];
    const double a = -2.0 * e;
    const double b = std::exp(model.segments[s].log_b);

    double de = 0.0;
    for (const std::size_t k : ws.obs_by_segment[s]) {
      const Observation& obs = batch[k];
      const double q = sigmoid(a + b * obs.cost);
      const double qh = clamp_share(obs.share);
      loss += obs.weight * nll_term(q, qh);
      // dL/dlogit of the cross entropy is (q - q^); a = -2e and b = exp(t)
      // give the chain factors below.
      const double dlogit = obs.weight * (q - qh) / total_weight;
      de += -2.0 * dlogit;
      grads->log_b[s] += dlogit * obs.cost * b;
    }

    std::vector<double> grad_out{de};
    std::vector<double> grad_in;
    for (std::size_t layer = n_layers; layer-- > 0;) {
      const auto& l = model.network.layers[layer];
      auto& gl = grads->layers[layer];
      const std::vector<double>& out_act = acts[layer + 1];
      const std::vector<double>& in_act = acts[layer];
      if (layer + 1 < n_layers) {
        for (std::size_t r = 0; r < l.out; ++r) {
          if (out_act[r] <= 0.0) grad_out[r] = 0.0;  // rectifier mask
        }
      }
      grad_in.assign(l.in, 0.0);
      for (std::size_t r = 0; r < l.out; ++r) {
        const double g = grad_out[r];
        if (g == 0.0) continue;
        double* grow = gl.weights.data() + r * l.in;
        const double* wrow = l.weights.data() + r * l.in;
        for (std::size_t c = 0; c < l.in; ++c) {
          grow[c] += g * in_act[c];
          grad_in[c] += g * wrow[c];
        }
        gl.bias[r] += g;
      }
      grad_out.swap(grad_in);
    }
  }
  if (loss_out != nullptr) *loss_out = loss / total_weight;
}

ModelGradients zero_gradients(const SemiBlackBoxModel& model) {
  ModelGradients grads;
  grads.layers.reserve(model.network.layers.size());
  for (const auto& l : model.network.layers) {
    ElasticityNetwork::Layer g;
    g.in = l.in;
    g.out = l.out;
    g.weights.assign(l.weights.size(), 0.0);
    g.bias.assign(l.bias.size(), 0.0);
    grads.layers.push_back(std::move(g));
  }
  grads.log_b.assign(model.segments.size(), 0.0);
  return grads;
}

/// Flat views over model parameters and their gradients, in a fixed order,
/// so the Adam state lines up across steps.
struct ParamView {
  std::vector<double*> params;
  std::vector<const double*> grads;
};

ParamView flatten(SemiBlackBoxModel& model, ModelGradients& grads) {
  ParamView view;
  for (std::size_t layer = 0; layer < model.network.layers.size(); ++layer) {
    auto& l = model.network.layers[layer];
    auto& g = grads.layers[layer];
    for (std::size_t i = 0; i < l.weights.size(); ++i) {
      view.params.push_back(&l.weights[i]);
      view.grads.push_back(&g.weights[i]);
    }
    for (std::size_t i = 0; i < l.bias.size(); ++i) {
      view.params.push_back(&l.bias[i]);
      view.grads.push_back(&g.bias[i]);
    }
  }
  for (std::size_t s = 0; s < model.segments.size(); ++s) {
    view.params.push_back(&model.segments[s].log_b);
    view.grads.push_back(&grads.log_b[s]);
  }
  return view;
}

struct AdamState {
  std::vector<double> m, v;
  int step = 0;

  explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}

  void apply(const ParamView& view, const TrainConfig& cfg) {
    ++step;
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, step);
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, step);
    for (std::size_t i = 0; i < view.params.size(); ++i) {
      const double g = *view.grads[i];
      m[i] = cfg.adam_beta1 * m[i] + (1.0 - cfg.adam_beta1) * g;
      v[i] = cfg.adam_beta2 * v[i] + (1.0 - cfg.adam_beta2) * g * g;
      const double update =
          cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.adam_epsilon);
      *view.params[i] -= update;
    }
  }
};

}  // namespace

ModelGradients nll_gradients(const SemiBlackBoxModel& model,
                             std::span<const Observation> batch) {
  ModelGradients grads = zero_gradients(model);
  GradientWorkspace ws(model, batch);
  accumulate_gradients(model, batch, ws, &grads, nullptr);
  return grads;
}

SemiBlackBoxModel train(const Dataset& dataset, const TrainConfig& config) {
  if (dataset.observations.empty()) {
    throw EmptyDataset("train: no observations");
  }
  if (!(config.learning_rate > 0.0) || config.epochs < 1) {
    throw std::invalid_argument("train: learning_rate > 0 and epochs >= 1");
  }

  SemiBlackBoxModel model;
  {
    // Segments are the ids seen in the observations, sorted; contexts come
    // from the dataset (absent context encodes as all-unknown).
    std::set<std::string> ids;
    for (const Observation& obs : dataset.observations) {
      ids.insert(obs.segment_id);
    }
    std::map<std::string, Context> contexts;
    for (const std::string& id : ids) {
      const auto it = dataset.contexts.find(id);
      contexts[id] = it != dataset.contexts.end() ? it->second : Context{};
    }
    model.vocabulary = FeatureVocabulary::build(contexts);
    for (const std::string& id : ids) {
      model.segments.push_back({id, contexts[id], 0.0});
    }
  }
  model.network = ElasticityNetwork::make(model.vocabulary.encoded_width());
  if (config.init_scheme == InitScheme::kScaledUniform) {
    for (std::size_t layer = 0; layer + 1 < model.network.layers.size();
         ++layer) {
      Rng rng = Rng::substream(config.seed, "init", layer);
      for (double& w : model.network.layers[layer].weights) {
        w = rng.uniform(-config.init_scale, config.init_scale);
      }
    }
  }

  GradientWorkspace ws(model, dataset.observations);
  ModelGradients grads = zero_gradients(model);
  const ParamView view = flatten(model, grads);
  AdamState adam(view.params.size());

  auto zero_out = [&grads]() {
    for (auto& l : grads.layers) {
      std::fill(l.weights.begin(), l.weights.end(), 0.0);
      std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
    std::fill(grads.log_b.begin(), grads.log_b.end(), 0.0);
  };

  if (config.batch_size <= 0) {
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      zero_out();
      accumulate_gradients(model, dataset.observations, ws, &grads, nullptr);
      adam.apply(view, config);
    }
    return model;
  }

  // Minibatch variant: shuffle observation order each epoch from a seeded
  // substream, rebuild the per-segment grouping per batch.
  std::vector<std::size_t> order(dataset.observations.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    Rng rng = Rng::substream(config.seed, "shuffle", epoch);
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1],
                order[static_cast<std::size_t>(rng.uniform_int(0, i - 1))]);
    }
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      const std::size_t stop =
          std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
      std::vector<Observation> batch;
      batch.reserve(stop - start);
      for (std::size_t k = start; k < stop; ++k) {
        batch.push_back(dataset.observations[order[k]]);
      }
      GradientWorkspace batch_ws(model, batch);
      zero_out();
      accumulate_gradients(model, batch, batch_ws, &grads, nullptr);
      adam.apply(view, config);
    }
  }
  return model;
}

LogitFit fit_independent_logit(std::span<const Observation> observations,
                               const TrainConfig& config) {
  if (observations.empty()) {
    throw EmptyDataset("fit_independent_logit: no observations");
  }
  bool distinct = false;
  for (const Observation& obs : observations) {
    if (obs.cost != observations.front().cost) {
      distinct = true;
      break;
    }
  }
  if (observations.size() < 2 || !distinct) {
    throw InsufficientData(
        "fit_independent_logit: need >= 2 observations with distinct costs "
        "(b is unidentifiable otherwise)");
  }

  double total_weight = 0.0;
  for (const Observation& obs : observations) total_weight += obs.weight;

  double a = 0.0, b = 0.0;
  double m[2] = {0.0, 0.0};
  double v[2] = {0.0, 0.0};
  double loss = 0.0;
  for (int step = 1; step <= config.epochs; ++step) {
    double ga = 0.0, gb = 0.0;
    loss = 0.0;
    for (const Observation& obs : observations) {
      const double q = sigmoid(a + b * obs.cost);
      const double qh = clamp_share(obs.share);
      loss += obs.weight * nll_term(q, qh);
      const double dlogit = obs.weight * (q - qh) / total_weight;
      ga += dlogit;
      gb += dlogit * obs.cost;
    }
    loss /= total_weight;
    const double g[2] = {ga, gb};
    const double c1 = 1.0 - std::pow(config.adam_beta1, step);
    const double c2 = 1.0 - std::pow(config.adam_beta2, step);
    for (int i = 0; i < 2; ++i) {
      m[i] = config.adam_beta1 * m[i] + (1.0 - config.adam_beta1) * g[i];
      v[i] = config.adam_beta2 * v[i] + (1.0 - config.adam_beta2) * g[i] * g[i];
      const double update = config.learning_rate * (m[i] / c1) /
                            (std::sqrt(v[i] / c2) + config.adam_epsilon);
      (i == 0 ? a : b) -= update;
    }
  }
  return {a, b, loss};
}

double rmae(std::span<const double> predictions,
            std::span<const double> truths) {
  if (predictions.size() != truths.size()) {
    throw std::invalid_argument("rmae: size mismatch");
  }
  double abs_err = 0.0;
  double denom = 0.0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    abs_err += std::abs(predictions[i] - truths[i]);
    denom += truths[i];
  }
  if (denom <= 0.0) {
    throw ZeroDenominator("rmae: truths sum to zero");
  }
  return abs_err / denom;
}

}  // namespace budgetopt
