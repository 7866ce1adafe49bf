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

#include "metaphornet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "metaphornet/error.hpp"

namespace metaphornet {

Confusion& Confusion::operator+=(const Confusion& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

Confusion confusion(std::span<const int> predictions, std::span<const int> golds) {
  if (predictions.size() != golds.size()) {
    throw ArgumentError("confusion: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(golds.size()) + " gold labels");
  }
  if (golds.empty()) throw ArgumentError("confusion: no examples");
  Confusion c;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    const bool pred = predictions[i] == 1;
    const bool gold = golds[i] == 1;
    if (pred && gold) {
      ++c.tp;
    } else if (pred) {
      ++c.fp;
    } else if (gold) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

Metrics prf1_acc(const Confusion& c) {
  if (c.total() == 0) throw EmptyInputError("metrics of an empty confusion");
  Metrics m;
  auto ratio = [](std::size_t num, std::size_t den, bool& degenerate) {
    if (den == 0) {
      degenerate = true;
      return 0.0;
    }
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.precision = ratio(c.tp, c.tp + c.fp, m.precision_degenerate);
  m.recall = ratio(c.tp, c.tp + c.fn, m.recall_degenerate);
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  } else {
    m.f1_degenerate = true;
  }
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  return m;
}

RocCurve roc_and_auc(std::span<const double> scores, std::span<const int> golds) {
  if (scores.size() != golds.size()) {
    throw ArgumentError("roc: " + std::to_string(scores.size()) + " scores for " +
                        std::to_string(golds.size()) + " gold labels");
  }
  std::size_t positives = 0;
  for (const int g : golds) positives += g == 1 ? 1 : 0;
  const std::size_t negatives = golds.size() - positives;
  if (positives == 0 || negatives == 0) {
    throw UndefinedMetricError("AUC needs at least one positive and one negative example");
  }

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&scores](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const double inv_p = 1.0 / static_cast<double>(positives);
  const double inv_n = 1.0 / static_cast<double>(negatives);
  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
  // Twice the area in units of one (positive, negative) pair; exact in
  // integers, so the result matches the pairwise count up to one division.
  std::uint64_t doubled_area = 0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    const std::size_t prev_tp = tp, prev_fp = fp;
    while (i < order.size() && scores[order[i]] == threshold) {
      (golds[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    doubled_area += static_cast<std::uint64_t>(fp - prev_fp) * (tp + prev_tp);
    curve.points.push_back({threshold, static_cast<double>(fp) * inv_n,
                            static_cast<double>(tp) * inv_p});
  }
  curve.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 1.0});
  curve.auc = static_cast<double>(doubled_area) /
              (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
  return curve;
}

BaselineOutput lexical_baseline(const Dataset& train, const Dataset& test) {
  // verb -> (metaphor count, literal count)
  std::map<std::string, std::pair<std::size_t, std::size_t>> counts;
  for (const Example& e : train.examples) {
    const auto key = e.verb_key();
    if (!key) continue;
    auto& [metaphor, literal] = counts[*key];
    (e.label == 1 ? metaphor : literal) += 1;
  }
  BaselineOutput out;
  for (const Example& e : test.examples) {
    const auto key = e.verb_key();
    if (!key) {
      ++out.skipped;
      continue;
    }
    int pred = 0;
    if (const auto it = counts.find(*key); it != counts.end()) {
      pred = it->second.first > it->second.second ? 1 : 0;
    }
    out.predictions.push_back({e.id, e.label, pred, static_cast<double>(pred)});
  }
  return out;
}

namespace {

std::optional<double> try_auc(const std::vector<PredictionRecord>& predictions) {
  std::vector<double> scores;
  std::vector<int> golds;
  for (const auto& p : predictions) {
    scores.push_back(p.score);
    golds.push_back(p.gold);
  }
  try {
    return roc_and_auc(scores, golds).auc;
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
}

Confusion confusion_of(const std::vector<PredictionRecord>& predictions) {
  Confusion c;
  for (const auto& p : predictions) {
    if (p.pred == 1 && p.gold == 1) {
      ++c.tp;
    } else if (p.pred == 1) {
      ++c.fp;
    } else if (p.gold == 1) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

}  // namespace

EvalReport assemble_report(std::string model, std::string dataset, std::size_t k,
                           std::uint64_t fold_seed,
                           std::vector<std::vector<PredictionRecord>> fold_predictions) {
  EvalReport report;
  report.model = std::move(model);
  report.dataset = std::move(dataset);
  report.k = k;
  report.fold_seed = fold_seed;
  for (std::size_t f = 0; f < fold_predictions.size(); ++f) {
    FoldResult fold;
    fold.fold = f;
    fold.confusion = confusion_of(fold_predictions[f]);
    if (fold.confusion.total() > 0) fold.metrics = prf1_acc(fold.confusion);
    fold.auc = try_auc(fold_predictions[f]);
    report.confusion += fold.confusion;
    report.folds.push_back(fold);
    report.predictions.insert(report.predictions.end(), fold_predictions[f].begin(),
                              fold_predictions[f].end());
  }
  report.metrics = prf1_acc(report.confusion);
  std::vector<double> scores;
  std::vector<int> golds;
  for (const auto& p : report.predictions) {
    scores.push_back(p.score);
    golds.push_back(p.gold);
  }
  try {
    RocCurve curve = roc_and_auc(scores, golds);
    report.auc = curve.auc;
    report.roc = std::move(curve.points);
  } catch (const UndefinedMetricError&) {
  }
  return report;
}

EvalReport crossval_lexical(const Dataset& dataset, std::size_t k, std::uint64_t fold_seed) {
  const FoldPlan plan = make_folds(dataset, k, fold_seed);
  std::vector<std::vector<PredictionRecord>> fold_predictions;
  std::size_t skipped = 0;
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::string> train_ids;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train_ids.insert(train_ids.end(), plan.folds[g].begin(), plan.folds[g].end());
    }
    BaselineOutput out =
        lexical_baseline(dataset.subset(train_ids), dataset.subset(plan.folds[f]));
    skipped += out.skipped;
    fold_predictions.push_back(std::move(out.predictions));
  }
  EvalReport report =
      assemble_report("lexical_baseline", dataset.name, k, fold_seed, std::move(fold_predictions));
  report.skipped = skipped;
  return report;
}

EvalReport crossval(const Dataset& dataset, const EmbeddingSet& embeddings,
                    const ModelConfig& model_config, const TrainConfig& train_config,
                    std::size_t k, std::uint64_t fold_seed, const CrossvalOptions& options) {
  model_config.validate();
  train_config.validate();
  if (embeddings.dim != model_config.embed_dim) {
    throw CoverageError("embedding dim " + std::to_string(embeddings.dim) +
                        " does not match model embed_dim " +
                        std::to_string(model_config.embed_dim));
  }
  const CoverageReport coverage = validate_coverage(embeddings, dataset);
  if (!coverage.missing_ids.empty() || !coverage.row_mismatches.empty()) {
    throw CoverageError("embeddings do not cover the dataset:\n" + coverage.describe());
  }
  const FoldPlan plan = make_folds(dataset, k, fold_seed);

  std::vector<std::vector<PredictionRecord>> fold_predictions(k);
  std::vector<TrainHistory> histories(k);
  std::mutex callback_mutex;

  auto run_fold = [&](std::size_t f) {
    std::vector<std::string> train_ids;
    for (std::size_t g = 0; g < k; ++g) {
      if (g != f) train_ids.insert(train_ids.end(), plan.folds[g].begin(), plan.folds[g].end());
    }
    const Dataset train_set = dataset.subset(train_ids);
    const Dataset test_set = dataset.subset(plan.folds[f]);
    TrainConfig fold_config = train_config;
    fold_config.seed = train_config.seed + 1000003ULL * f;
    EpochCallback on_epoch;
    if (options.on_epoch) {
      on_epoch = [&, f](const EpochRecord& r) {
        std::lock_guard lock(callback_mutex);
        options.on_epoch(f, r);
      };
    }
    TrainResult trained = train(train_set, embeddings, model_config, fold_config, on_epoch);
    std::vector<PredictionRecord> preds;
    for (const Example& e : test_set.examples) {
      const Prediction p = predict(trained.params, model_config, embeddings, e);
      preds.push_back({e.id, e.label, p.label, p.score});
    }
    fold_predictions[f] = std::move(preds);
    histories[f] = std::move(trained.history);
  };

  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, k);
  if (threads == 1) {
    for (std::size_t f = 0; f < k; ++f) run_fold(f);
  } else {
    std::mutex queue_mutex;
    std::size_t next = 0;
    std::vector<std::exception_ptr> errors(k);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < threads; ++w) {
      workers.emplace_back([&] {
        for (;;) {
          std::size_t f;
          {
            std::lock_guard lock(queue_mutex);
            if (next == k) return;
            f = next++;
          }
          try {
            run_fold(f);
          } catch (...) {
            errors[f] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : workers) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  EvalReport report = assemble_report(options.model_name, dataset.name, k, fold_seed,
                                      std::move(fold_predictions));
  report.histories = std::move(histories);
  return report;
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string threshold_text(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_row(std::ostream& out, const EvalReport& report, const std::string& fold,
               const Metrics& m, const std::optional<double>& auc) {
  out << report.model << ',' << report.dataset << ',' << fold << ',' << fixed6(m.precision) << ','
      << fixed6(m.recall) << ',' << fixed6(m.f1) << ',' << fixed6(m.accuracy) << ','
      << (auc ? fixed6(*auc) : std::string("NA")) << '\n';
}

}  // namespace

void write_results_header(std::ostream& out) { out << "model,dataset,fold,P,R,F1,Acc,AUC\n"; }

void write_results_rows(const EvalReport& report, std::ostream& out) {
  for (const FoldResult& f : report.folds) {
    write_row(out, report, std::to_string(f.fold), f.metrics, f.auc);
  }
  write_row(out, report, "pooled", report.metrics, report.auc);
}

void write_roc_csv(std::span<const RocPoint> points, std::ostream& out) {
  out << "threshold,fpr,tpr\n";
  for (const RocPoint& p : points) {
    out << threshold_text(p.threshold) << ',' << threshold_text(p.fpr) << ','
        << threshold_text(p.tpr) << '\n';
  }
}

void write_predictions_jsonl(std::span<const PredictionRecord> predictions, std::ostream& out) {
  for (const PredictionRecord& p : predictions) {
    nlohmann::ordered_json obj;
    obj["id"] = p.id;
    obj["gold"] = p.gold;
    obj["pred"] = p.pred;
    obj["score"] = p.score;
    out << obj.dump() << '\n';
  }
}

std::vector<PredictionRecord> read_predictions_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open predictions " + path.string());
  std::vector<PredictionRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const nlohmann::json obj = nlohmann::json::parse(line);
      PredictionRecord p;
      p.id = obj.at("id").get<std::string>();
      p.gold = obj.at("gold").get<int>();
      p.pred = obj.at("pred").get<int>();
      p.score = obj.at("score").get<double>();
      if ((p.gold != 0 && p.gold != 1) || (p.pred != 0 && p.pred != 1)) {
        throw ParseError("gold and pred must be 0 or 1");
      }
      out.push_back(std::move(p));
    } catch (const nlohmann::json::exception& err) {
      throw ParseError("predictions line " + std::to_string(line_no) + ": " + err.what());
    } catch (const ParseError& err) {
      throw ParseError("predictions line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  return out;
}

}  // namespace metaphornet
