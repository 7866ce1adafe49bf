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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metaphornet/dataset.hpp"
#include "metaphornet/tensor.hpp"

namespace metaphornet {

enum class Provider : std::uint8_t { bert = 0, elmo = 1, synthetic = 2 };

std::string_view to_string(Provider provider);

// Row-major [rows x cols] block of stored 32-bit values.
struct EmbeddingMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t r) const {
    return std::span<const float>(values).subspan(r * cols, cols);
  }
  // Widened to 64-bit, shape [rows x cols].
  Tensor to_tensor() const;

  bool operator==(const EmbeddingMatrix&) const = default;
};

// Frozen per-token vectors keyed by example id.
struct EmbeddingSet {
  std::uint32_t dim = 0;
  Provider provider = Provider::synthetic;
  std::map<std::string, EmbeddingMatrix, std::less<>> vectors;

  const EmbeddingMatrix* find(std::string_view id) const;

  bool operator==(const EmbeddingSet&) const = default;
};

// MDEMB1, little-endian:
//   "MDEMB1\0\0" | u32 dim | u32 record_count | u8 provider
//   per record: u16 id_len | id bytes | u32 n_tokens | n_tokens*dim f32
// Records are written in sorted id order.
EmbeddingSet load_embeddings(const std::filesystem::path& path);
EmbeddingSet parse_embeddings(std::span<const std::uint8_t> bytes);
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_embeddings(const EmbeddingSet& set);

// Each token vector is a unit-norm pseudorandom vector seeded by
// (seed, example id, position, token) plus separability times a fixed unit
// label direction, signed +1 for metaphors and -1 for literals.
EmbeddingSet synth_embeddings(const Dataset& dataset, std::uint32_t dim, std::uint64_t seed,
                              double separability);

struct CoverageMismatch {
  std::string id;
  std::size_t expected_rows = 0;
  std::size_t found_rows = 0;
};

struct CoverageReport {
  std::vector<std::string> missing_ids;
  std::vector<std::string> extra_ids;
  std::vector<CoverageMismatch> row_mismatches;

  bool empty() const {
    return missing_ids.empty() && extra_ids.empty() && row_mismatches.empty();
  }
  std::string describe(std::size_t max_items = 10) const;
};

CoverageReport validate_coverage(const EmbeddingSet& embeddings, const Dataset& dataset);

}  // namespace metaphornet
