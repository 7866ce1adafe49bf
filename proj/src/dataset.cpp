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

#include "metaphornet/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "metaphornet/csv.hpp"
#include "metaphornet/error.hpp"
#include "metaphornet/random.hpp"

namespace metaphornet {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(Source source) {
  switch (source) {
    case Source::trofi:
      return "trofi";
    case Source::mohx:
      return "mohx";
    case Source::other:
      return "other";
  }
  return "other";
}

Source source_from_string(std::string_view text) {
  if (text == "trofi") return Source::trofi;
  if (text == "mohx") return Source::mohx;
  if (text == "other") return Source::other;
  throw ParseError("unknown source \"" + std::string(text) + "\"");
}

namespace {

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Short excerpt of a raw region for error messages.
std::string quote_region(std::string_view text) {
  constexpr std::size_t kMax = 120;
  std::string out = "\"" + std::string(text.substr(0, kMax));
  if (text.size() > kMax) out += "...";
  return out + "\"";
}

}  // namespace

std::optional<std::string> Example::verb_key() const {
  if (verb && !verb->empty()) return lowercase(*verb);
  if (verb_index && *verb_index < tokens.size()) return lowercase(tokens[*verb_index]);
  return std::nullopt;
}

const Example* Dataset::find(std::string_view id) const {
  for (const Example& e : examples) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

Dataset Dataset::subset(const std::vector<std::string>& ids) const {
  std::unordered_map<std::string_view, const Example*> by_id;
  for (const Example& e : examples) by_id.emplace(e.id, &e);
  Dataset out;
  out.name = name;
  out.examples.reserve(ids.size());
  for (const std::string& id : ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw IntegrityError("unknown example id \"" + id + "\"");
    out.examples.push_back(*it->second);
  }
  return out;
}

void validate(const Dataset& dataset) {
  std::unordered_set<std::string_view> seen;
  for (const Example& e : dataset.examples) {
    if (!seen.insert(e.id).second) throw IntegrityError("duplicate id \"" + e.id + "\"");
    if (e.tokens.empty()) throw IntegrityError("example \"" + e.id + "\" has no tokens");
    if (e.label != 0 && e.label != 1) {
      throw IntegrityError("example \"" + e.id + "\" has label " + std::to_string(e.label));
    }
    if (e.verb_index && *e.verb_index >= e.tokens.size()) {
      throw IntegrityError("example \"" + e.id + "\" verb_index " +
                           std::to_string(*e.verb_index) + " out of range for " +
                           std::to_string(e.tokens.size()) + " tokens");
    }
  }
}

// ---------------------------------------------------------------------------
// Normalized JSONL

namespace {

Example example_from_json(const json& obj, std::size_t line_no) {
  auto fail = [line_no](const std::string& what) {
    return ParseError("line " + std::to_string(line_no) + ": " + what);
  };
  if (!obj.is_object()) throw fail("expected a JSON object");
  for (const char* field : {"id", "tokens", "label", "source"}) {
    if (!obj.contains(field)) throw fail("missing field \"" + std::string(field) + "\"");
  }
  Example e;
  if (!obj["id"].is_string()) throw fail("field \"id\" must be a string");
  e.id = obj["id"].get<std::string>();
  if (!obj["tokens"].is_array()) throw fail("field \"tokens\" must be an array");
  for (const json& t : obj["tokens"]) {
    if (!t.is_string()) throw fail("field \"tokens\" must hold strings");
    e.tokens.push_back(t.get<std::string>());
  }
  if (!obj["label"].is_number_integer()) throw fail("field \"label\" must be 0 or 1");
  e.label = obj["label"].get<int>();
  if (e.label != 0 && e.label != 1) throw fail("field \"label\" must be 0 or 1");
  if (obj.contains("verb_index") && !obj["verb_index"].is_null()) {
    if (!obj["verb_index"].is_number_unsigned()) {
      throw fail("field \"verb_index\" must be a non-negative integer or null");
    }
    e.verb_index = obj["verb_index"].get<std::size_t>();
  }
  if (!obj["source"].is_string()) throw fail("field \"source\" must be a string");
  try {
    e.source = source_from_string(obj["source"].get<std::string>());
  } catch (const ParseError& err) {
    throw fail(err.what());
  }
  if (obj.contains("verb") && !obj["verb"].is_null()) {
    if (!obj["verb"].is_string()) throw fail("field \"verb\" must be a string");
    e.verb = obj["verb"].get<std::string>();
  }
  if (e.tokens.empty()) throw fail("field \"tokens\" must be non-empty");
  if (e.verb_index && *e.verb_index >= e.tokens.size()) {
    throw fail("field \"verb_index\" out of range");
  }
  return e;
}

}  // namespace

Dataset read_normalized(std::istream& in, std::string name) {
  Dataset dataset;
  dataset.name = std::move(name);
  std::unordered_set<std::string> ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& err) {
      throw ParseError("line " + std::to_string(line_no) + ": " + err.what());
    }
    Example e = example_from_json(obj, line_no);
    if (!ids.insert(e.id).second) {
      throw IntegrityError("line " + std::to_string(line_no) + ": duplicate id \"" + e.id +
                           "\"");
    }
    dataset.examples.push_back(std::move(e));
  }
  return dataset;
}

Dataset load_normalized(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open dataset " + path.string());
  return read_normalized(in, path.stem().string());
}

void write_normalized(const Dataset& dataset, std::ostream& out) {
  for (const Example& e : dataset.examples) {
    ordered_json obj;
    obj["id"] = e.id;
    obj["tokens"] = e.tokens;
    obj["label"] = e.label;
    obj["verb_index"] = e.verb_index ? json(*e.verb_index) : json(nullptr);
    obj["source"] = std::string(to_string(e.source));
    if (e.verb) obj["verb"] = *e.verb;
    out << obj.dump() << '\n';
  }
}

void write_normalized(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  write_normalized(dataset, out);
}

// ---------------------------------------------------------------------------
// Source converters

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

namespace {

const std::map<std::string, std::vector<std::string>, std::less<>>& irregular_forms() {
  static const std::map<std::string, std::vector<std::string>, std::less<>> table = {
      {"bear", {"bore", "borne", "born"}},   {"beat", {"beaten"}},
      {"become", {"became"}},                {"begin", {"began", "begun"}},
      {"bite", {"bit", "bitten"}},           {"blow", {"blew", "blown"}},
      {"break", {"broke", "broken"}},        {"bring", {"brought"}},
      {"build", {"built"}},                  {"burn", {"burnt"}},
      {"buy", {"bought"}},                   {"catch", {"caught"}},
      {"choose", {"chose", "chosen"}},       {"come", {"came"}},
      {"dig", {"dug"}},                      {"draw", {"drew", "drawn"}},
      {"drink", {"drank", "drunk"}},         {"drive", {"drove", "driven"}},
      {"eat", {"ate", "eaten"}},             {"fall", {"fell", "fallen"}},
      {"feed", {"fed"}},                     {"feel", {"felt"}},
      {"fight", {"fought"}},                 {"find", {"found"}},
      {"flee", {"fled"}},                    {"fly", {"flew", "flown", "flies"}},
      {"freeze", {"froze", "frozen"}},       {"get", {"got", "gotten"}},
      {"give", {"gave", "given"}},           {"go", {"went", "gone", "goes"}},
      {"grow", {"grew", "grown"}},           {"hang", {"hung"}},
      {"hold", {"held"}},                    {"keep", {"kept"}},
      {"lay", {"laid"}},                     {"lead", {"led"}},
      {"leave", {"left"}},                   {"lend", {"lent"}},
      {"lie", {"lay", "lain", "lying"}},     {"lose", {"lost"}},
      {"make", {"made"}},                    {"meet", {"met"}},
      {"pay", {"paid"}},                     {"ride", {"rode", "ridden"}},
      {"rise", {"rose", "risen"}},           {"run", {"ran"}},
      {"say", {"said"}},                     {"see", {"saw", "seen"}},
      {"seek", {"sought"}},                  {"sell", {"sold"}},
      {"send", {"sent"}},                    {"shake", {"shook", "shaken"}},
      {"shine", {"shone"}},                  {"shoot", {"shot"}},
      {"shrink", {"shrank", "shrunk"}},      {"sing", {"sang", "sung"}},
      {"sink", {"sank", "sunk"}},            {"sleep", {"slept"}},
      {"slide", {"slid"}},                   {"speak", {"spoke", "spoken"}},
      {"spend", {"spent"}},                  {"spin", {"spun"}},
      {"spring", {"sprang", "sprung"}},      {"stand", {"stood"}},
      {"steal", {"stole", "stolen"}},        {"stick", {"stuck"}},
      {"sting", {"stung"}},                  {"stride", {"strode"}},
      {"strike", {"struck", "stricken"}},    {"sweep", {"swept"}},
      {"swell", {"swollen"}},                {"swim", {"swam", "swum"}},
      {"swing", {"swung"}},                  {"take", {"took", "taken"}},
      {"tear", {"tore", "torn"}},            {"tell", {"told"}},
      {"think", {"thought"}},                {"throw", {"threw", "thrown"}},
      {"wake", {"woke", "woken"}},           {"wear", {"wore", "worn"}},
      {"weave", {"wove", "woven"}},          {"win", {"won"}},
      {"wind", {"wound"}},                   {"wring", {"wrung"}},
      {"write", {"wrote", "written"}},
  };
  return table;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

std::vector<std::string> inflections(const std::string& lemma) {
  std::vector<std::string> forms = {lemma,        lemma + "s",   lemma + "es",
                                    lemma + "ed", lemma + "d",   lemma + "ing"};
  const std::size_t n = lemma.size();
  if (n >= 2 && lemma.ends_with("ie")) {
    forms.push_back(lemma.substr(0, n - 2) + "ying");
  }
  if (n >= 2 && lemma.back() == 'e') {
    const std::string stem = lemma.substr(0, n - 1);
    forms.push_back(stem + "ing");
    forms.push_back(stem + "ed");
  }
  if (n >= 2 && lemma.back() == 'y' && !is_vowel(lemma[n - 2])) {
    const std::string stem = lemma.substr(0, n - 1);
    forms.push_back(stem + "ies");
    forms.push_back(stem + "ied");
  }
  if (n >= 2 && !is_vowel(lemma.back()) && lemma.back() != 'w' && lemma.back() != 'x' &&
      lemma.back() != 'y') {
    const std::string doubled = lemma + lemma.back();
    forms.push_back(doubled + "ed");
    forms.push_back(doubled + "ing");
  }
  if (n >= 1 && lemma.back() == 'c') {
    forms.push_back(lemma + "ked");
    forms.push_back(lemma + "king");
  }
  if (const auto it = irregular_forms().find(lemma); it != irregular_forms().end()) {
    forms.insert(forms.end(), it->second.begin(), it->second.end());
  }
  return forms;
}

std::string strip_punct(std::string_view token) {
  std::size_t b = 0, e = token.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(token[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(token[e - 1]))) --e;
  return lowercase(token.substr(b, e - b));
}

}  // namespace

std::optional<std::size_t> locate_verb(const std::vector<std::string>& tokens,
                                       std::string_view lemma) {
  const std::string base = lowercase(trim(lemma));
  if (base.empty()) return std::nullopt;
  const std::vector<std::string> forms = inflections(base);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string t = strip_punct(tokens[i]);
    if (std::find(forms.begin(), forms.end(), t) != forms.end()) return i;
  }
  return std::nullopt;
}

namespace {

int parse_label(const std::string& text, std::string_view context) {
  const std::string t = trim(text);
  if (t == "0" || t == "0.0") return 0;
  if (t == "1" || t == "1.0") return 1;
  throw ConversionError("label \"" + t + "\" is not 0 or 1 in " + quote_region(context));
}

std::string padded(std::size_t n, int width) {
  std::ostringstream out;
  out << std::setw(width) << std::setfill('0') << n;
  return out.str();
}

bool looks_like_csv_header(std::string_view first_line) {
  const std::string lower = lowercase(first_line);
  return lower.find(',') != std::string::npos && lower.find("sentence") != std::string::npos;
}

std::string_view first_nonblank_line(std::string_view raw) {
  std::size_t pos = 0;
  while (pos < raw.size()) {
    std::size_t end = raw.find('\n', pos);
    if (end == std::string_view::npos) end = raw.size();
    std::string_view line = raw.substr(pos, end - pos);
    if (!trim(line).empty()) return line;
    pos = end + 1;
  }
  return {};
}

// Rows of a headed CSV as column-name -> value maps.
struct HeadedCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::optional<std::size_t> column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  }
};

HeadedCsv read_headed_csv(std::string_view raw) {
  std::vector<std::vector<std::string>> records;
  try {
    records = parse_csv(raw);
  } catch (const ParseError& err) {
    throw ConversionError(err.what());
  }
  if (records.empty()) throw ConversionError("empty raw file");
  HeadedCsv csv;
  for (const std::string& h : records.front()) csv.header.push_back(lowercase(trim(h)));
  csv.rows.assign(records.begin() + 1, records.end());
  return csv;
}

std::string join_row(const std::vector<std::string>& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out += ',';
    out += row[i];
  }
  return out;
}

// verb,sentence,label[,verb_idx][,id] rows, shared by both formatted
// distributions.
Conversion convert_verb_csv(std::string_view raw, std::string name, Source source,
                            const std::string& id_prefix) {
  const HeadedCsv csv = read_headed_csv(raw);
  const auto verb_col = csv.column("verb");
  const auto sentence_col = csv.column("sentence");
  const auto label_col = csv.column("label");
  if (!verb_col || !sentence_col || !label_col) {
    throw ConversionError("header must name verb, sentence and label columns, got " +
                          quote_region(join_row(csv.header)));
  }
  const auto index_col = csv.column("verb_idx");
  const auto id_col = csv.column("id");

  Conversion result;
  result.dataset.name = std::move(name);
  std::unordered_set<std::string> ids;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    if (row.size() != csv.header.size()) {
      throw ConversionError("row " + std::to_string(r + 2) + " has " +
                            std::to_string(row.size()) + " fields, header has " +
                            std::to_string(csv.header.size()) + ": " +
                            quote_region(join_row(row)));
    }
    Example e;
    e.source = source;
    e.id = id_col ? trim(row[*id_col]) : id_prefix + padded(r + 1, 4);
    e.tokens = split_whitespace(row[*sentence_col]);
    if (e.tokens.empty()) {
      throw ConversionError("row " + std::to_string(r + 2) + " has an empty sentence: " +
                            quote_region(join_row(row)));
    }
    e.label = parse_label(row[*label_col], join_row(row));
    e.verb = lowercase(trim(row[*verb_col]));
    if (index_col) {
      std::size_t idx = 0;
      const std::string text = trim(row[*index_col]);
      const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), idx);
      if (ec == std::errc() && ptr == text.data() + text.size() && idx < e.tokens.size()) {
        e.verb_index = idx;
      }
    }
    if (!e.verb_index) e.verb_index = locate_verb(e.tokens, *e.verb);
    if (!e.verb_index) ++result.report.verb_not_located;
    if (!ids.insert(e.id).second) throw IntegrityError("duplicate id \"" + e.id + "\"");
    result.dataset.examples.push_back(std::move(e));
  }
  if (result.dataset.empty()) throw ConversionError("raw file holds no records");
  result.report.kept = result.dataset.size();
  return result;
}

enum class Cluster { none, literal, nonliteral, unannotated };

Conversion convert_trofi_example_base(std::string_view raw, std::string name) {
  Conversion result;
  result.dataset.name = std::move(name);
  std::string verb;
  Cluster cluster = Cluster::none;
  std::map<std::string, std::size_t> per_verb;

  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < raw.size()) {
    std::size_t end = raw.find('\n', pos);
    if (end == std::string_view::npos) end = raw.size();
    const std::string line = trim(raw.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;

    if (line.front() == '*') {
      if (line.find_first_not_of('*') == std::string::npos) continue;
      const std::size_t lead = line.find_first_not_of('*');
      const std::size_t trail = line.size() - 1 - line.find_last_not_of('*');
      const std::string inner = lowercase(trim(line.substr(lead, line.size() - lead - trail)));
      if (lead >= 3 && trail >= 3 && inner.find_first_of(" \t") == std::string::npos) {
        verb = inner;
        cluster = Cluster::none;
      } else if (verb.empty()) {
        // Banner text before the first verb block.
      } else if (inner == "literal cluster") {
        cluster = Cluster::literal;
      } else if (inner == "nonliteral cluster") {
        cluster = Cluster::nonliteral;
      } else {
        cluster = Cluster::unannotated;
      }
      continue;
    }

    if (verb.empty()) continue;  // preamble before the first verb block
    if (cluster == Cluster::none) {
      throw ConversionError("line " + std::to_string(line_no) +
                            ": sentence outside a verb cluster: " + quote_region(line));
    }
    std::vector<std::string> fields = split_whitespace(line);
    std::size_t first_word = 1;
    if (fields.size() > 2 && fields[1].size() == 1 &&
        std::string_view("LNU").find(fields[1][0]) != std::string_view::npos) {
      first_word = 2;
    }
    if (fields.size() <= first_word) {
      throw ConversionError("line " + std::to_string(line_no) +
                            ": expected '<id> [tag] <sentence>', got " + quote_region(line));
    }
    if (cluster == Cluster::unannotated) {
      ++result.report.dropped_unannotated;
      continue;
    }

    Example e;
    e.source = Source::trofi;
    e.id = "trofi-" + verb + "-" + padded(++per_verb[verb], 4);
    e.tokens.assign(fields.begin() + static_cast<std::ptrdiff_t>(first_word), fields.end());
    e.label = cluster == Cluster::nonliteral ? 1 : 0;
    e.verb = verb;
    e.verb_index = locate_verb(e.tokens, verb);
    if (!e.verb_index) ++result.report.verb_not_located;
    result.dataset.examples.push_back(std::move(e));
  }
  if (result.dataset.empty()) {
    throw ConversionError("no annotated sentences found in " +
                          quote_region(raw.substr(0, std::min<std::size_t>(raw.size(), 120))));
  }
  result.report.kept = result.dataset.size();
  if (result.report.dropped_unannotated > 0) {
    result.report.notes.push_back("dropped " + std::to_string(result.report.dropped_unannotated) +
                                  " sentences from unannotated clusters");
  }
  return result;
}

void note_unlocated(Conversion& c) {
  if (c.report.verb_not_located > 0) {
    c.report.notes.push_back("target verb not located in " +
                             std::to_string(c.report.verb_not_located) + " sentences");
  }
}

}  // namespace

Conversion convert_trofi_text(std::string_view raw, std::string name) {
  if (trim(raw).empty()) throw ConversionError("empty raw file");
  Conversion c = looks_like_csv_header(first_nonblank_line(raw))
                     ? convert_verb_csv(raw, std::move(name), Source::trofi, "trofi-")
                     : convert_trofi_example_base(raw, std::move(name));
  note_unlocated(c);
  return c;
}

Conversion convert_trofi(const std::filesystem::path& raw_path) {
  return convert_trofi_text(read_file(raw_path), "trofi");
}

Conversion convert_mohx_text(std::string_view raw, std::string name) {
  if (trim(raw).empty()) throw ConversionError("empty raw file");
  if (!looks_like_csv_header(first_nonblank_line(raw))) {
    throw ConversionError("expected a CSV header naming a sentence column, got " +
                          quote_region(first_nonblank_line(raw)));
  }
  Conversion c = convert_verb_csv(raw, std::move(name), Source::mohx, "mohx-");
  note_unlocated(c);
  return c;
}

Conversion convert_mohx(const std::filesystem::path& raw_path) {
  return convert_mohx_text(read_file(raw_path), "mohx");
}

// ---------------------------------------------------------------------------
// Statistics and folds

DatasetStats stats(const Dataset& dataset) {
  if (dataset.empty()) throw EmptyInputError("stats of an empty dataset");
  DatasetStats s;
  s.count = dataset.size();
  std::size_t metaphors = 0;
  std::set<std::string> verbs;
  for (const Example& e : dataset.examples) {
    metaphors += e.label == 1 ? 1 : 0;
    if (auto key = e.verb_key()) verbs.insert(std::move(*key));
  }
  s.metaphor_fraction = static_cast<double>(metaphors) / static_cast<double>(s.count);
  s.unique_verbs = verbs.size();
  return s;
}

FoldPlan make_folds(const Dataset& dataset, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ArgumentError("fold count must be at least 2, got " + std::to_string(k));
  if (k > dataset.size()) {
    throw ArgumentError("fold count " + std::to_string(k) + " exceeds dataset size " +
                        std::to_string(dataset.size()));
  }
  std::vector<std::string> positives, negatives;
  for (const Example& e : dataset.examples) {
    (e.label == 1 ? positives : negatives).push_back(e.id);
  }
  Rng rng(mix64(seed ^ 0x6d65746170686f72ULL));
  rng.shuffle(positives);
  rng.shuffle(negatives);

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  std::size_t slot = 0;
  for (auto* group : {&positives, &negatives}) {
    for (std::string& id : *group) plan.folds[slot++ % k].push_back(std::move(id));
  }
  return plan;
}

void write_fold_plan(const FoldPlan& plan, const std::filesystem::path& path) {
  ordered_json obj;
  obj["k"] = plan.k;
  obj["seed"] = plan.seed;
  obj["folds"] = plan.folds;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out << obj.dump() << '\n';
}

FoldPlan read_fold_plan(const std::filesystem::path& path) {
  json obj;
  try {
    obj = json::parse(read_file(path));
    FoldPlan plan;
    plan.k = obj.at("k").get<std::size_t>();
    plan.seed = obj.at("seed").get<std::uint64_t>();
    plan.folds = obj.at("folds").get<std::vector<std::vector<std::string>>>();
    if (plan.folds.size() != plan.k) throw ParseError("fold count disagrees with k");
    return plan;
  } catch (const json::exception& err) {
    throw ParseError("fold plan " + path.string() + ": " + err.what());
  }
}

}  // namespace metaphornet
