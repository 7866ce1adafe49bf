// Copyright 2026 The MetaphorNet Authors.
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

#include "metaphornet/training.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "metaphornet/error.hpp"
#include "metaphornet/random.hpp"

namespace metaphornet {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ArgumentError("learning_rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ArgumentError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ArgumentError("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (batch_size < 1) throw ArgumentError("batch_size must be at least 1");
  if (epochs < 1) throw ArgumentError("epochs must be at least 1");
  if (!(clip_norm >= 0.0)) throw ArgumentError("clip_norm must be non-negative");
}

OptimizerState make_optimizer_state(std::span<Tensor* const> params) {
  OptimizerState state;
  for (const Tensor* p : params) {
    state.m.emplace_back(p->size(), 0.0);
    state.v.emplace_back(p->size(), 0.0);
  }
  return state;
}

void adam_step(std::span<Tensor* const> params, OptimizerState& state, const TrainConfig& config) {
  if (state.m.size() != params.size() || state.v.size() != params.size()) {
    throw ShapeError("adam_step: optimizer state tracks " + std::to_string(state.m.size()) +
                     " tensors, got " + std::to_string(params.size()));
  }
  for (std::size_t n = 0; n < params.size(); ++n) {
    const Tensor& p = *params[n];
    if (state.m[n].size() != p.size() || state.v[n].size() != p.size() ||
        p.grad().size() != p.size()) {
      throw ShapeError("adam_step: buffers of tensor " + std::to_string(n) +
                       " do not match shape " + shape_string(p.shape()));
    }
  }
  ++state.t;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(config.beta1, t);
  const double correction2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t n = 0; n < params.size(); ++n) {
    Tensor& p = *params[n];
    std::vector<double>& m = state.m[n];
    std::vector<double>& v = state.v[n];
    const std::span<const double> g = p.grad();
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = config.beta1 * m[i] + (1.0 - config.beta1) * g[i];
      v[i] = config.beta2 * v[i] + (1.0 - config.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  }
}

void write_history_csv(const TrainHistory& history, std::ostream& out) {
  out << "epoch,mean_loss,train_accuracy,seconds\n";
  out << std::setprecision(10);
  for (const EpochRecord& r : history.epochs) {
    out << r.epoch << ',' << r.mean_loss << ',' << r.train_accuracy << ',' << std::fixed
        << std::setprecision(3) << r.seconds << std::defaultfloat << std::setprecision(10)
        << '\n';
  }
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  write_history_csv(history, out);
}

namespace {

void clip_gradients(std::span<Tensor* const> params, double max_norm) {
  double total = 0.0;
  for (const Tensor* p : params) {
    for (const double g : p->grad()) total += g * g;
  }
  const double norm = std::sqrt(total);
  if (norm <= max_norm || norm == 0.0) return;
  const double factor = max_norm / norm;
  for (Tensor* p : params) {
    for (double& g : p->grad()) g *= factor;
  }
}

}  // namespace

TrainResult train(const Dataset& dataset, const EmbeddingSet& embeddings,
                  const ModelConfig& model_config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch) {
  model_config.validate();
  train_config.validate();
  if (dataset.empty()) throw EmptyInputError("training set is empty");
  if (embeddings.dim != model_config.embed_dim) {
    throw CoverageError("embedding dim " + std::to_string(embeddings.dim) +
                        " does not match model embed_dim " +
                        std::to_string(model_config.embed_dim));
  }
  const CoverageReport coverage = validate_coverage(embeddings, dataset);
  if (!coverage.missing_ids.empty() || !coverage.row_mismatches.empty()) {
    throw CoverageError("embeddings do not cover the training set:\n" + coverage.describe());
  }

  std::vector<Tensor> inputs;
  inputs.reserve(dataset.size());
  for (const Example& e : dataset.examples) inputs.push_back(embeddings.find(e.id)->to_tensor());

  TrainResult result;
  result.params = init_params(model_config);
  result.params.set_requires_grad(true);
  std::vector<Tensor*> tensors;
  for (auto& [name, t] : result.params.named()) tensors.push_back(t);
  OptimizerState state = make_optimizer_state(tensors);

  std::vector<std::size_t> order(dataset.size());
  for (std::size_t epoch = 1; epoch <= train_config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix64(train_config.seed + epoch));
    rng.shuffle(order);

    double loss_total = 0.0;
    std::size_t correct = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += train_config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + train_config.batch_size);
      result.params.zero_grad();
      Graph graph;
      const BoundParams bound = bind(graph, result.params);
      Var batch_loss;
      for (std::size_t b = begin; b < end; ++b) {
        const Example& example = dataset.examples[order[b]];
        const ForwardResult fwd = model_forward(graph, bound, model_config, inputs[order[b]]);
        const double score = fwd.score.item();
        correct += decide(score) == example.label ? 1 : 0;
        const Var loss = ad::binary_cross_entropy(fwd.score, example.label);
        batch_loss = b == begin ? loss : ad::add(batch_loss, loss);
      }
      loss_total += batch_loss.item();
      graph.backward(batch_loss);
      if (train_config.clip_norm > 0.0) clip_gradients(tensors, train_config.clip_norm);
      adam_step(tensors, state, train_config);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.mean_loss = loss_total / static_cast<double>(dataset.size());
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(dataset.size());
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  result.params.set_requires_grad(false);
  return result;
}

int decide(double score) { return score >= 0.5 ? 1 : 0; }

Prediction predict(const ModelParams& params, const ModelConfig& config,
                   const EmbeddingSet& embeddings, const Example& example) {
  const EmbeddingMatrix* m = embeddings.find(example.id);
  if (m == nullptr) throw CoverageError("no embedding for example \"" + example.id + "\"");
  if (m->rows != example.tokens.size()) {
    throw CoverageError("embedding for \"" + example.id + "\" has " + std::to_string(m->rows) +
                        " rows, example has " + std::to_string(example.tokens.size()) +
                        " tokens");
  }
  Prediction p;
  p.score = predict_score(params, config, m->to_tensor());
  p.label = decide(p.score);
  return p;
}

}  // namespace metaphornet
