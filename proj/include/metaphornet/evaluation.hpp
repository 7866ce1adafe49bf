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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metaphornet/dataset.hpp"
#include "metaphornet/embedding_store.hpp"
#include "metaphornet/model.hpp"
#include "metaphornet/training.hpp"

namespace metaphornet {

// Positive class = metaphor.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  Confusion& operator+=(const Confusion& other);
  bool operator==(const Confusion&) const = default;
};

// Throws ArgumentError on length mismatch or empty input.
Confusion confusion(std::span<const int> predictions, std::span<const int> golds);

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  // Set when the corresponding ratio was 0/0 and reported as 0.
  bool precision_degenerate = false;
  bool recall_degenerate = false;
  bool f1_degenerate = false;

  bool degenerate() const { return precision_degenerate || recall_degenerate || f1_degenerate; }
};

// Throws EmptyInputError when the confusion is empty.
Metrics prf1_acc(const Confusion& c);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  // Threshold descends from +inf to -inf; a score counts as positive when
  // it is >= the threshold.
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Throws UndefinedMetricError unless both classes are present.
RocCurve roc_and_auc(std::span<const double> scores, std::span<const int> golds);

struct PredictionRecord {
  std::string id;
  int gold = 0;
  int pred = 0;
  double score = 0.0;
};

struct BaselineOutput {
  std::vector<PredictionRecord> predictions;
  // Test examples without a verb, left out of the predictions.
  std::size_t skipped = 0;
};

// Predicts metaphor iff the test verb was annotated metaphorically more often
// than literally in `train`; ties and unseen verbs predict literal.
BaselineOutput lexical_baseline(const Dataset& train, const Dataset& test);

struct FoldResult {
  std::size_t fold = 0;
  Confusion confusion;
  Metrics metrics;
  std::optional<double> auc;
};

struct EvalReport {
  std::string model;
  std::string dataset;
  std::size_t k = 0;
  std::uint64_t fold_seed = 0;
  // Pooled over all held-out predictions.
  Confusion confusion;
  Metrics metrics;
  std::optional<double> auc;
  std::vector<RocPoint> roc;
  std::vector<FoldResult> folds;
  std::vector<PredictionRecord> predictions;
  std::vector<TrainHistory> histories;
  std::size_t skipped = 0;
};

struct CrossvalOptions {
  std::string model_name = "bilstm_attention";
  // Folds trained concurrently; results do not depend on this.
  std::size_t threads = 1;
  // Invoked from worker threads, serialised by the harness.
  std::function<void(std::size_t fold, const EpochRecord&)> on_epoch;
};

// Trains on k-1 folds, scores the held-out fold, and pools every held-out
// prediction for the headline metrics and ROC.
EvalReport crossval(const Dataset& dataset, const EmbeddingSet& embeddings,
                    const ModelConfig& model_config, const TrainConfig& train_config,
                    std::size_t k, std::uint64_t fold_seed, const CrossvalOptions& options = {});

EvalReport crossval_lexical(const Dataset& dataset, std::size_t k, std::uint64_t fold_seed);

// Builds a report from per-fold predictions (fold order preserved).
EvalReport assemble_report(std::string model, std::string dataset, std::size_t k,
                           std::uint64_t fold_seed,
                           std::vector<std::vector<PredictionRecord>> fold_predictions);

// model,dataset,fold,P,R,F1,Acc,AUC with one row per fold and a "pooled" row.
void write_results_header(std::ostream& out);
void write_results_rows(const EvalReport& report, std::ostream& out);
void write_roc_csv(std::span<const RocPoint> points, std::ostream& out);
// {"id","gold","pred","score"} per line.
void write_predictions_jsonl(std::span<const PredictionRecord> predictions, std::ostream& out);
std::vector<PredictionRecord> read_predictions_jsonl(const std::filesystem::path& path);

}  // namespace metaphornet
