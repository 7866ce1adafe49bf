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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "metaphornet/dataset.hpp"
#include "metaphornet/embedding_store.hpp"
#include "metaphornet/model.hpp"

namespace metaphornet {

struct TrainConfig {
  double learning_rate = 0.00003;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::size_t batch_size = 16;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  // Global gradient-norm cap per batch; 0 disables clipping.
  double clip_norm = 0.0;

  // Throws ArgumentError when a field is out of range.
  void validate() const;

  bool operator==(const TrainConfig&) const = default;
};

struct OptimizerState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::int64_t t = 0;
};

// Zeroed moment buffers shaped like `params`.
OptimizerState make_optimizer_state(std::span<Tensor* const> params);

// One Adam update from each tensor's accumulated grad():
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
//   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps), with t incremented first.
void adam_step(std::span<Tensor* const> params, OptimizerState& state, const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
  double seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
};

// epoch,mean_loss,train_accuracy,seconds
void write_history_csv(const TrainHistory& history, std::ostream& out);
void write_history_csv(const TrainHistory& history, const std::filesystem::path& path);

struct TrainResult {
  ModelParams params;
  TrainHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Mini-batch training: examples reshuffled every epoch with seed + epoch,
// batch losses summed and differentiated once, one Adam step per batch.
// Throws CoverageError before the first epoch if the embeddings do not
// cover the dataset.
TrainResult train(const Dataset& dataset, const EmbeddingSet& embeddings,
                  const ModelConfig& model_config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch = {});

struct Prediction {
  int label = 0;
  double score = 0.0;
};

// Decision rule: label 1 iff score >= 0.5.
int decide(double score);

// Throws CoverageError when the example has no embedding.
Prediction predict(const ModelParams& params, const ModelConfig& config,
                   const EmbeddingSet& embeddings, const Example& example);

}  // namespace metaphornet
