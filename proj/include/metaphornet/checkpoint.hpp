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

#include "metaphornet/model.hpp"

namespace metaphornet {

struct Checkpoint {
  ModelConfig config;
  ModelParams params;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
};

// Layout: one JSON header line
//   {"config":{"embed_dim","lstm_hidden","heads","context_dim","seed"},"seed","epoch"}
// then, little-endian: u32 block_count and per tensor in ModelParams::named()
// order: u16 name_len | name | u32 rank | rank * u32 dims | f32 values.
void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path);
// Throws FormatError / CorruptionError on malformed files, including blocks
// whose names or shapes disagree with the header config.
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace metaphornet
