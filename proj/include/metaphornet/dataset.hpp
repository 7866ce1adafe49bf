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
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace metaphornet {

enum class Source { trofi, mohx, other };

std::string_view to_string(Source source);
Source source_from_string(std::string_view text);

// One labeled sentence. label: 0 = literal, 1 = metaphor.
struct Example {
  std::string id;
  std::vector<std::string> tokens;
  int label = 0;
  std::optional<std::size_t> verb_index;
  Source source = Source::other;
  // Lemma of the target verb when the source distribution names it. Tokens
  // at verb_index are inflected ("pasted"), so verb statistics and the
  // lexical baseline group by this field when present.
  std::optional<std::string> verb;

  // Lowercased lemma, falling back to the token at verb_index.
  std::optional<std::string> verb_key() const;

  bool operator==(const Example&) const = default;
};

struct Dataset {
  std::string name;
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
  const Example* find(std::string_view id) const;
  // Examples whose ids are listed, in the listed order.
  Dataset subset(const std::vector<std::string>& ids) const;

  bool operator==(const Dataset&) const = default;
};

// Throws IntegrityError on duplicate ids, empty token lists, labels outside
// {0,1}, or an out-of-range verb_index.
void validate(const Dataset& dataset);

// JSONL, one object per line:
// {"id", "tokens", "label", "verb_index", "source"} plus optional "verb".
Dataset load_normalized(const std::filesystem::path& path);
Dataset read_normalized(std::istream& in, std::string name);
void write_normalized(const Dataset& dataset, const std::filesystem::path& path);
void write_normalized(const Dataset& dataset, std::ostream& out);

struct ConversionReport {
  std::size_t kept = 0;
  // Sentences outside the literal/nonliteral clusters.
  std::size_t dropped_unannotated = 0;
  // Sentences where the target verb could not be located in the tokens.
  std::size_t verb_not_located = 0;
  std::vector<std::string> notes;
};

struct Conversion {
  Dataset dataset;
  ConversionReport report;
};

// Accepts the TroFi Example Base layout (***verb*** blocks with
// *literal cluster* / *nonliteral cluster* sections) and the
// verb,sentence,verb_idx,label CSV layout of the formatted distribution.
Conversion convert_trofi(const std::filesystem::path& raw_path);
Conversion convert_trofi_text(std::string_view raw, std::string name = "trofi");
// MOH-X CSV with a header naming at least verb, sentence and label columns.
Conversion convert_mohx(const std::filesystem::path& raw_path);
Conversion convert_mohx_text(std::string_view raw, std::string name = "mohx");

// Index of the token that realizes `lemma` (inflections and a short list of
// irregular forms), or nullopt.
std::optional<std::size_t> locate_verb(const std::vector<std::string>& tokens,
                                       std::string_view lemma);

std::vector<std::string> split_whitespace(std::string_view text);

struct DatasetStats {
  std::size_t count = 0;
  double metaphor_fraction = 0.0;
  std::size_t unique_verbs = 0;
};

// Throws EmptyInputError on an empty dataset.
DatasetStats stats(const Dataset& dataset);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> folds;

  bool operator==(const FoldPlan&) const = default;
};

// Seeded stratified partition: metaphor and literal ids are shuffled
// separately, laid end to end and dealt round-robin across the folds.
FoldPlan make_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed);

void write_fold_plan(const FoldPlan& plan, const std::filesystem::path& path);
FoldPlan read_fold_plan(const std::filesystem::path& path);

}  // namespace metaphornet
