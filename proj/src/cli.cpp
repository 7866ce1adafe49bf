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

#include "metaphornet/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "metaphornet/checkpoint.hpp"
#include "metaphornet/dataset.hpp"
#include "metaphornet/embedding_store.hpp"
#include "metaphornet/error.hpp"
#include "metaphornet/evaluation.hpp"
#include "metaphornet/roc_svg.hpp"

namespace metaphornet {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Experiment config

namespace {

class ConfigReader {
 public:
  explicit ConfigReader(const json& root) : root_(root) {}

  const json* find(const json& obj, const std::string& key) const {
    const auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    throw UsageError("config field \"" + field + "\": " + what);
  }

  std::string string(const json& obj, const std::string& key, const std::string& field) const {
    const json* v = find(obj, key);
    if (v == nullptr) fail(field, "is required");
    if (!v->is_string()) fail(field, "must be a string");
    return v->get<std::string>();
  }

  template <typename T>
  void unsigned_field(const json& obj, const std::string& key, const std::string& field,
                      T& out, bool positive = false) const {
    const json* v = find(obj, key);
    if (v == nullptr) return;
    if (!v->is_number_unsigned()) fail(field, "must be a non-negative integer");
    const auto value = v->get<std::uint64_t>();
    if (positive && value == 0) fail(field, "must be positive");
    out = static_cast<T>(value);
  }

  void double_field(const json& obj, const std::string& key, const std::string& field,
                    double& out) const {
    const json* v = find(obj, key);
    if (v == nullptr) return;
    if (!v->is_number()) fail(field, "must be a number");
    out = v->get<double>();
  }

  const json& root() const { return root_; }

 private:
  const json& root_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

}  // namespace

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!root.is_object()) throw UsageError("config " + path.string() + " must be a JSON object");
  const ConfigReader r(root);
  const fs::path base = path.parent_path();

  ExperimentConfig cfg;
  cfg.dataset = resolve(base, r.string(root, "dataset", "dataset"));
  const json* emb = r.find(root, "embeddings");
  const json* syn = r.find(root, "synthetic");
  if ((emb == nullptr) == (syn == nullptr)) {
    throw UsageError("config must set exactly one of \"embeddings\" and \"synthetic\"");
  }
  if (emb != nullptr) {
    cfg.embeddings = resolve(base, r.string(root, "embeddings", "embeddings"));
  } else {
    if (!syn->is_object()) r.fail("synthetic", "must be an object");
    SyntheticSpec s;
    r.unsigned_field(*syn, "dim", "synthetic.dim", s.dim, true);
    r.unsigned_field(*syn, "seed", "synthetic.seed", s.seed);
    r.double_field(*syn, "separability", "synthetic.separability", s.separability);
    if (!(s.separability >= 0.0 && s.separability <= 1.0)) {
      r.fail("synthetic.separability", "must lie in [0, 1]");
    }
    cfg.synthetic = s;
  }

  if (const json* m = r.find(root, "model")) {
    if (!m->is_object()) r.fail("model", "must be an object");
    cfg.embed_dim_given = r.find(*m, "embed_dim") != nullptr;
    r.unsigned_field(*m, "embed_dim", "model.embed_dim", cfg.model.embed_dim, true);
    r.unsigned_field(*m, "lstm_hidden", "model.lstm_hidden", cfg.model.lstm_hidden, true);
    r.unsigned_field(*m, "heads", "model.heads", cfg.model.heads, true);
    cfg.model.context_dim = 2 * cfg.model.lstm_hidden;
    r.unsigned_field(*m, "context_dim", "model.context_dim", cfg.model.context_dim, true);
    r.unsigned_field(*m, "seed", "model.seed", cfg.model.seed);
  }
  if (const json* t = r.find(root, "train")) {
    if (!t->is_object()) r.fail("train", "must be an object");
    r.double_field(*t, "learning_rate", "train.learning_rate", cfg.train.learning_rate);
    r.double_field(*t, "beta1", "train.beta1", cfg.train.beta1);
    r.double_field(*t, "beta2", "train.beta2", cfg.train.beta2);
    r.double_field(*t, "epsilon", "train.epsilon", cfg.train.epsilon);
    r.unsigned_field(*t, "batch_size", "train.batch_size", cfg.train.batch_size, true);
    r.unsigned_field(*t, "epochs", "train.epochs", cfg.train.epochs, true);
    r.unsigned_field(*t, "seed", "train.seed", cfg.train.seed);
    r.double_field(*t, "clip_norm", "train.clip_norm", cfg.train.clip_norm);
    try {
      cfg.train.validate();
    } catch (const ArgumentError& e) {
      throw UsageError(std::string("config field \"train\": ") + e.what());
    }
  }
  r.unsigned_field(root, "k", "k", cfg.k);
  if (cfg.k < 2) r.fail("k", "must be at least 2");
  r.unsigned_field(root, "fold_seed", "fold_seed", cfg.fold_seed);
  if (r.find(root, "output_dir") != nullptr) {
    cfg.output_dir = resolve(base, r.string(root, "output_dir", "output_dir"));
  } else {
    cfg.output_dir = base / "out";
  }
  if (r.find(root, "model_name") != nullptr) {
    cfg.model_name = r.string(root, "model_name", "model_name");
  }

  if (!fs::exists(cfg.dataset)) {
    throw UsageError("config field \"dataset\": no such file " + cfg.dataset.string());
  }
  if (cfg.embeddings && !fs::exists(*cfg.embeddings)) {
    throw UsageError("config field \"embeddings\": no such file " + cfg.embeddings->string());
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

void require_file(const fs::path& p, const char* what) {
  if (!fs::exists(p)) throw UsageError(std::string(what) + " not found: " + p.string());
}

std::ofstream open_output(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw UsageError("cannot write " + p.string());
  return out;
}

std::string percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * fraction);
  return buf;
}

void print_stats(std::ostream& out, const std::string& name, const DatasetStats& s) {
  const int width = static_cast<int>(std::max<std::size_t>(10, name.size() + 2));
  out << std::left << std::setw(width) << "Dataset" << std::setw(12) << "# Examples"
      << std::setw(13) << "% Metaphors" << "# Unique Verbs\n"
      << std::setw(width) << name << std::setw(12) << s.count << std::setw(13)
      << percent(s.metaphor_fraction) << s.unique_verbs << '\n'
      << std::right;
}

struct ReferenceStats {
  std::size_t count;
  double fraction;
  std::size_t verbs;
};

// Published statistics of the two benchmark distributions.
ReferenceStats reference_stats(Source source) {
  return source == Source::trofi ? ReferenceStats{3737, 0.43, 50} : ReferenceStats{647, 0.49, 214};
}

std::size_t thread_count() {
  const char* env = std::getenv("METAPHORNET_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const unsigned long n = std::strtoul(env, &end, 10);
  if (end == env || *end != '\0' || n == 0) {
    throw UsageError(std::string("METAPHORNET_THREADS must be a positive integer, got \"") + env +
                     "\"");
  }
  return n;
}

void print_pooled(std::ostream& out, const EvalReport& report) {
  out << "model,dataset,fold,P,R,F1,Acc,AUC\n";
  std::ostringstream rows;
  write_results_rows(report, rows);
  std::string line, last;
  std::istringstream lines(rows.str());
  while (std::getline(lines, line)) last = line;
  out << last << '\n';
}

struct LoadedExperiment {
  ExperimentConfig config;
  Dataset dataset;
  EmbeddingSet embeddings;
};

LoadedExperiment load_experiment(const fs::path& config_path) {
  LoadedExperiment e;
  e.config = load_experiment_config(config_path);
  e.dataset = load_normalized(e.config.dataset);
  validate(e.dataset);
  if (e.config.embeddings) {
    e.embeddings = load_embeddings(*e.config.embeddings);
  } else {
    const SyntheticSpec& s = *e.config.synthetic;
    e.embeddings = synth_embeddings(e.dataset, s.dim, s.seed, s.separability);
  }
  if (!e.config.embed_dim_given) {
    e.config.model.embed_dim = e.embeddings.dim;
  } else if (e.config.model.embed_dim != e.embeddings.dim) {
    throw CoverageError("model.embed_dim " + std::to_string(e.config.model.embed_dim) +
                        " does not match embedding dim " + std::to_string(e.embeddings.dim));
  }
  const CoverageReport coverage = validate_coverage(e.embeddings, e.dataset);
  if (!coverage.missing_ids.empty() || !coverage.row_mismatches.empty()) {
    throw CoverageError("embeddings do not cover the dataset:\n" + coverage.describe());
  }
  return e;
}

int cmd_convert(const std::string& from, const fs::path& in, const fs::path& out_path,
                const std::string& report_path, std::ostream& out, std::ostream& err) {
  require_file(in, "raw input");
  const Conversion c = from == "trofi" ? convert_trofi(in) : convert_mohx(in);
  validate(c.dataset);
  auto file = open_output(out_path);
  write_normalized(c.dataset, file);

  const DatasetStats s = stats(c.dataset);
  print_stats(out, from == "trofi" ? "TroFi" : "MOH-X", s);
  for (const std::string& note : c.report.notes) out << "note: " << note << '\n';

  const ReferenceStats ref = reference_stats(from == "trofi" ? Source::trofi : Source::mohx);
  std::vector<std::string> discrepancies;
  if (s.count != ref.count) {
    discrepancies.push_back("examples " + std::to_string(s.count) + " vs reference " +
                            std::to_string(ref.count));
  }
  if (std::abs(s.metaphor_fraction - ref.fraction) > 0.005) {
    discrepancies.push_back("metaphor fraction " + percent(s.metaphor_fraction) +
                            " vs reference " + percent(ref.fraction));
  }
  if (s.unique_verbs != ref.verbs) {
    discrepancies.push_back("unique verbs " + std::to_string(s.unique_verbs) + " vs reference " +
                            std::to_string(ref.verbs));
  }
  for (const std::string& d : discrepancies) err << "discrepancy: " << d << '\n';

  if (!report_path.empty()) {
    nlohmann::ordered_json r;
    r["source"] = from;
    r["examples"] = s.count;
    r["metaphor_fraction"] = s.metaphor_fraction;
    r["unique_verbs"] = s.unique_verbs;
    r["dropped_unannotated"] = c.report.dropped_unannotated;
    r["verb_not_located"] = c.report.verb_not_located;
    r["discrepancies"] = discrepancies;
    auto f = open_output(report_path);
    f << r.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_stats(const fs::path& dataset_path, std::ostream& out) {
  require_file(dataset_path, "dataset");
  const Dataset d = load_normalized(dataset_path);
  print_stats(out, d.name, stats(d));
  return kExitOk;
}

int cmd_synth_embed(const fs::path& dataset_path, std::uint32_t dim, std::uint64_t seed,
                    double separability, const fs::path& out_path, std::ostream& out) {
  require_file(dataset_path, "dataset");
  if (dim == 0) throw UsageError("--dim must be positive");
  if (!(separability >= 0.0 && separability <= 1.0)) {
    throw UsageError("--separability must lie in [0, 1]");
  }
  const Dataset d = load_normalized(dataset_path);
  const EmbeddingSet set = synth_embeddings(d, dim, seed, separability);
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_embeddings(set, out_path);
  out << "wrote " << set.vectors.size() << " records of dim " << dim << " to " << out_path.string()
      << '\n';
  return kExitOk;
}

int cmd_train(const fs::path& config_path, const std::string& checkpoint_path, std::ostream& out) {
  require_file(config_path, "config");
  LoadedExperiment e = load_experiment(config_path);
  fs::create_directories(e.config.output_dir);
  TrainResult trained = train(e.dataset, e.embeddings, e.config.model, e.config.train,
                              [&out](const EpochRecord& r) {
                                out << "epoch " << r.epoch << " loss " << r.mean_loss
                                    << " train_acc " << r.train_accuracy << '\n';
                              });
  const fs::path ckpt = checkpoint_path.empty() ? e.config.output_dir / "model.ckpt"
                                                : fs::path(checkpoint_path);
  if (ckpt.has_parent_path()) fs::create_directories(ckpt.parent_path());
  write_checkpoint({e.config.model, std::move(trained.params), e.config.train.seed,
                    e.config.train.epochs},
                   ckpt);
  write_history_csv(trained.history, e.config.output_dir / "history.csv");
  out << "checkpoint: " << ckpt.string() << '\n';
  return kExitOk;
}

int cmd_crossval(const fs::path& config_path, std::ostream& out) {
  require_file(config_path, "config");
  const LoadedExperiment e = load_experiment(config_path);
  const fs::path dir = e.config.output_dir;
  fs::create_directories(dir);

  CrossvalOptions options;
  options.model_name = e.config.model_name;
  options.threads = thread_count();
  const EvalReport report = crossval(e.dataset, e.embeddings, e.config.model, e.config.train,
                                     e.config.k, e.config.fold_seed, options);

  {
    auto f = open_output(dir / "results.csv");
    write_results_header(f);
    write_results_rows(report, f);
  }
  {
    auto f = open_output(dir / "roc.csv");
    write_roc_csv(report.roc, f);
  }
  {
    auto f = open_output(dir / "predictions.jsonl");
    write_predictions_jsonl(report.predictions, f);
  }
  write_fold_plan(make_folds(e.dataset, e.config.k, e.config.fold_seed), dir / "folds.json");
  for (std::size_t f = 0; f < report.histories.size(); ++f) {
    write_history_csv(report.histories[f], dir / ("history_fold" + std::to_string(f) + ".csv"));
  }
  out << "fold_seed " << e.config.fold_seed << ", k " << e.config.k << '\n';
  print_pooled(out, report);
  return kExitOk;
}

int cmd_roc(const fs::path& predictions_path, const fs::path& out_path, const std::string& svg_path,
            std::ostream& out) {
  require_file(predictions_path, "predictions");
  const std::vector<PredictionRecord> preds = read_predictions_jsonl(predictions_path);
  std::vector<double> scores;
  std::vector<int> golds;
  for (const auto& p : preds) {
    scores.push_back(p.score);
    golds.push_back(p.gold);
  }
  const RocCurve curve = roc_and_auc(scores, golds);
  {
    auto f = open_output(out_path);
    write_roc_csv(curve.points, f);
  }
  if (!svg_path.empty()) {
    auto f = open_output(svg_path);
    f << render_roc_svg(curve.points, curve.auc);
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "AUC %.6f", curve.auc);
  out << buf << '\n';
  return kExitOk;
}

int cmd_predict(const fs::path& checkpoint_path, const fs::path& dataset_path,
                const fs::path& embeddings_path, const std::string& out_path, std::ostream& out) {
  require_file(checkpoint_path, "checkpoint");
  require_file(dataset_path, "dataset");
  require_file(embeddings_path, "embeddings");
  const Checkpoint ckpt = read_checkpoint(checkpoint_path);
  const Dataset d = load_normalized(dataset_path);
  const EmbeddingSet emb = load_embeddings(embeddings_path);
  if (emb.dim != ckpt.config.embed_dim) {
    throw CoverageError("checkpoint expects embed_dim " + std::to_string(ckpt.config.embed_dim) +
                        ", embeddings have dim " + std::to_string(emb.dim));
  }
  std::vector<PredictionRecord> preds;
  for (const Example& e : d.examples) {
    const Prediction p = predict(ckpt.params, ckpt.config, emb, e);
    preds.push_back({e.id, e.label, p.label, p.score});
  }
  if (out_path.empty()) {
    write_predictions_jsonl(preds, out);
  } else {
    auto f = open_output(out_path);
    write_predictions_jsonl(preds, f);
  }
  return kExitOk;
}

int cmd_baseline(const fs::path& dataset_path, std::size_t k, std::uint64_t seed,
                 const std::string& out_path, const std::string& predictions_path,
                 std::ostream& out, std::ostream& err) {
  require_file(dataset_path, "dataset");
  const Dataset d = load_normalized(dataset_path);
  validate(d);
  const EvalReport report = crossval_lexical(d, k, seed);
  if (report.skipped > 0) {
    err << "warning: " << report.skipped << " examples lack a verb and were skipped\n";
  }
  if (!out_path.empty()) {
    auto f = open_output(out_path);
    write_results_header(f);
    write_results_rows(report, f);
  }
  if (!predictions_path.empty()) {
    auto f = open_output(predictions_path);
    write_predictions_jsonl(report.predictions, f);
  }
  out << "fold_seed " << seed << ", k " << k << '\n';
  print_pooled(out, report);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metaphor detection with a BiLSTM and multi-head attention pooling", "metaphornet"};
  app.require_subcommand(1);

  std::string from, in, out_path, report_path;
  auto* convert = app.add_subcommand("convert", "Normalize a raw TroFi or MOH-X distribution");
  convert->add_option("--from", from, "Source format")
      ->required()
      ->check(CLI::IsMember({"trofi", "mohx"}));
  convert->add_option("--in", in, "Raw input file")->required();
  convert->add_option("--out", out_path, "Normalized JSONL output")->required();
  convert->add_option("--report", report_path, "Optional JSON conversion report");

  std::string dataset;
  auto* stats_cmd = app.add_subcommand("stats", "Print dataset statistics");
  stats_cmd->add_option("--dataset", dataset, "Normalized JSONL")->required();

  std::uint32_t dim = 32;
  std::uint64_t seed = 0;
  double separability = 1.0;
  auto* synth = app.add_subcommand("synth-embed", "Write synthetic embeddings for a dataset");
  synth->add_option("--dataset", dataset, "Normalized JSONL")->required();
  synth->add_option("--dim", dim, "Embedding width");
  synth->add_option("--seed", seed, "Generator seed");
  synth->add_option("--separability", separability, "Label signal strength in [0,1]");
  synth->add_option("--out", out_path, "MDEMB1 output")->required();

  std::string config, checkpoint;
  auto* train_cmd = app.add_subcommand("train", "Train on a whole dataset and save a checkpoint");
  train_cmd->add_option("--config", config, "Experiment config JSON")->required();
  train_cmd->add_option("--checkpoint", checkpoint, "Checkpoint path (default <output_dir>/model.ckpt)");

  auto* crossval_cmd = app.add_subcommand("crossval", "Run k-fold cross-validation");
  crossval_cmd->add_option("--config", config, "Experiment config JSON")->required();

  std::string predictions, svg;
  auto* roc = app.add_subcommand("roc", "ROC curve and AUC from a predictions file");
  roc->add_option("--predictions", predictions, "predictions.jsonl")->required();
  roc->add_option("--out", out_path, "roc.csv output")->required();
  roc->add_option("--svg", svg, "Optional SVG plot");

  std::string embeddings;
  auto* predict_cmd = app.add_subcommand("predict", "Score a dataset with a checkpoint");
  predict_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  predict_cmd->add_option("--dataset", dataset, "Normalized JSONL")->required();
  predict_cmd->add_option("--embeddings", embeddings, "MDEMB1 file")->required();
  predict_cmd->add_option("--out", out_path, "Output file (default stdout)");

  std::size_t k = 10;
  std::uint64_t fold_seed = 42;
  auto* baseline = app.add_subcommand("baseline", "Cross-validate the lexical baseline");
  baseline->add_option("--dataset", dataset, "Normalized JSONL")->required();
  baseline->add_option("--k", k, "Fold count");
  baseline->add_option("--seed", fold_seed, "Fold seed");
  baseline->add_option("--out", out_path, "results.csv output");
  baseline->add_option("--predictions", predictions, "Optional predictions.jsonl output");

  std::vector<std::string> argv_storage{"metaphornet"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const std::string& a : argv_storage) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (convert->parsed()) return cmd_convert(from, in, out_path, report_path, out, err);
    if (stats_cmd->parsed()) return cmd_stats(dataset, out);
    if (synth->parsed()) return cmd_synth_embed(dataset, dim, seed, separability, out_path, out);
    if (train_cmd->parsed()) return cmd_train(config, checkpoint, out);
    if (crossval_cmd->parsed()) return cmd_crossval(config, out);
    if (roc->parsed()) return cmd_roc(predictions, out_path, svg, out);
    if (predict_cmd->parsed()) {
      return cmd_predict(checkpoint, dataset, embeddings, out_path, out);
    }
    if (baseline->parsed()) {
      return cmd_baseline(dataset, k, fold_seed, out_path, predictions, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace metaphornet
