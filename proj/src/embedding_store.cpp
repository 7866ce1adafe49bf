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

#include "metaphornet/embedding_store.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "binary_io.hpp"
#include "metaphornet/error.hpp"
#include "metaphornet/random.hpp"

namespace metaphornet {

namespace {

constexpr std::string_view kMagic("MDEMB1\0\0", 8);

}  // namespace

std::string_view to_string(Provider provider) {
  switch (provider) {
    case Provider::bert:
      return "bert";
    case Provider::elmo:
      return "elmo";
    case Provider::synthetic:
      return "synthetic";
  }
  return "unknown";
}

Tensor EmbeddingMatrix::to_tensor() const {
  return Tensor({rows, cols}, std::vector<double>(values.begin(), values.end()));
}

const EmbeddingMatrix* EmbeddingSet::find(std::string_view id) const {
  const auto it = vectors.find(id);
  return it == vectors.end() ? nullptr : &it->second;
}

std::vector<std::uint8_t> serialize_embeddings(const EmbeddingSet& set) {
  detail::ByteWriter w;
  w.raw(kMagic);
  w.u32(set.dim);
  w.u32(static_cast<std::uint32_t>(set.vectors.size()));
  w.u8(static_cast<std::uint8_t>(set.provider));
  for (const auto& [id, m] : set.vectors) {
    if (id.size() > UINT16_MAX) throw FormatError("id longer than 65535 bytes: " + id.substr(0, 40));
    if (m.cols != set.dim || m.values.size() != m.rows * m.cols) {
      throw FormatError("record \"" + id + "\" does not match dim " + std::to_string(set.dim));
    }
    w.u16(static_cast<std::uint16_t>(id.size()));
    w.raw(id);
    w.u32(static_cast<std::uint32_t>(m.rows));
    for (const float v : m.values) w.f32(v);
  }
  return std::move(w.bytes());
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = serialize_embeddings(set);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

EmbeddingSet parse_embeddings(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes);
  if (bytes.size() < kMagic.size() ||
      std::string_view(reinterpret_cast<const char*>(bytes.data()), kMagic.size()) != kMagic) {
    throw FormatError("bad magic: not an MDEMB1 file");
  }
  r.str(kMagic.size(), "magic");
  EmbeddingSet set;
  set.dim = r.u32("header dim");
  const std::uint32_t count = r.u32("header record_count");
  const std::uint8_t provider = r.u8("header provider");
  if (provider > 2) throw FormatError("unknown provider code " + std::to_string(provider));
  set.provider = static_cast<Provider>(provider);
  if (set.dim == 0) throw FormatError("header dim is 0");

  for (std::uint32_t i = 0; i < count; ++i) {
    const std::size_t record_offset = r.offset();
    const std::uint16_t id_len = r.u16("record id length");
    std::string id = r.str(id_len, "record id");
    EmbeddingMatrix m;
    m.rows = r.u32("record n_tokens");
    m.cols = set.dim;
    if (m.rows == 0) {
      throw CorruptionError("record \"" + id + "\" at byte offset " +
                            std::to_string(record_offset) + " has zero tokens");
    }
    if (m.rows * m.cols * 4 > r.remaining()) {
      throw CorruptionError("truncated record \"" + id + "\" at byte offset " +
                            std::to_string(r.offset()) + ": needs " +
                            std::to_string(m.rows * m.cols * 4) + " bytes, " +
                            std::to_string(r.remaining()) + " left");
    }
    m.values.resize(m.rows * m.cols);
    r.f32_array(m.values, "record values");
    for (const float v : m.values) {
      if (!std::isfinite(v)) {
        throw CorruptionError("record \"" + id + "\" at byte offset " +
                              std::to_string(record_offset) + " holds a non-finite value");
      }
    }
    if (!set.vectors.emplace(std::move(id), std::move(m)).second) {
      throw CorruptionError("duplicate record id at byte offset " + std::to_string(record_offset));
    }
  }
  if (r.remaining() != 0) {
    throw CorruptionError("header declares " + std::to_string(count) + " records but " +
                          std::to_string(r.remaining()) + " bytes follow at byte offset " +
                          std::to_string(r.offset()));
  }
  return set;
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open embeddings " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_embeddings(bytes);
}

namespace {

std::vector<double> unit_gaussian(Rng& rng, std::size_t dim) {
  std::vector<double> v(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& x : v) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& x : v) x *= inv;
  return v;
}

}  // namespace

EmbeddingSet synth_embeddings(const Dataset& dataset, std::uint32_t dim, std::uint64_t seed,
                              double separability) {
  if (dim == 0) throw ArgumentError("embedding dim must be at least 1");
  EmbeddingSet set;
  set.dim = dim;
  set.provider = Provider::synthetic;

  Rng direction_rng(mix64(seed ^ 0x6c6162656c646972ULL));
  const std::vector<double> direction = unit_gaussian(direction_rng, dim);

  for (const Example& e : dataset.examples) {
    EmbeddingMatrix m;
    m.rows = e.tokens.size();
    m.cols = dim;
    m.values.reserve(m.rows * m.cols);
    const double sign = e.label == 1 ? 1.0 : -1.0;
    const std::uint64_t example_hash = fnv1a(e.id, mix64(seed));
    for (std::size_t t = 0; t < e.tokens.size(); ++t) {
      Rng rng(mix64(fnv1a(e.tokens[t], example_hash) + 0x9e3779b97f4a7c15ULL * (t + 1)));
      const std::vector<double> base = unit_gaussian(rng, dim);
      for (std::size_t d = 0; d < dim; ++d) {
        m.values.push_back(static_cast<float>(base[d] + separability * sign * direction[d]));
      }
    }
    set.vectors.emplace(e.id, std::move(m));
  }
  return set;
}

std::string CoverageReport::describe(std::size_t max_items) const {
  std::ostringstream out;
  auto list = [&](const char* title, const std::vector<std::string>& ids) {
    if (ids.empty()) return;
    out << title << " (" << ids.size() << "):";
    for (std::size_t i = 0; i < ids.size() && i < max_items; ++i) out << ' ' << ids[i];
    if (ids.size() > max_items) out << " ...";
    out << '\n';
  };
  list("missing ids", missing_ids);
  list("extra ids", extra_ids);
  if (!row_mismatches.empty()) {
    out << "row-count mismatches (" << row_mismatches.size() << "):";
    for (std::size_t i = 0; i < row_mismatches.size() && i < max_items; ++i) {
      const auto& m = row_mismatches[i];
      out << ' ' << m.id << " expected " << m.expected_rows << " found " << m.found_rows;
    }
    if (row_mismatches.size() > max_items) out << " ...";
    out << '\n';
  }
  return out.str();
}

CoverageReport validate_coverage(const EmbeddingSet& embeddings, const Dataset& dataset) {
  CoverageReport report;
  std::unordered_set<std::string_view> dataset_ids;
  for (const Example& e : dataset.examples) {
    dataset_ids.insert(e.id);
    const EmbeddingMatrix* m = embeddings.find(e.id);
    if (m == nullptr) {
      report.missing_ids.push_back(e.id);
    } else if (m->rows != e.tokens.size()) {
      report.row_mismatches.push_back({e.id, e.tokens.size(), m->rows});
    }
  }
  for (const auto& [id, m] : embeddings.vectors) {
    if (!dataset_ids.contains(id)) report.extra_ids.push_back(id);
  }
  return report;
}

}  // namespace metaphornet
