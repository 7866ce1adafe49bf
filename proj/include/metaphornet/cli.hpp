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
#include <vector>

#include "metaphornet/model.hpp"
#include "metaphornet/training.hpp"

namespace metaphornet {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;

struct SyntheticSpec {
  std::uint32_t dim = 32;
  std::uint64_t seed = 0;
  double separability = 1.0;
};

// Experiment description read from a JSON file. Relative paths resolve
// against the config file's directory.
struct ExperimentConfig {
  std::filesystem::path dataset;
  std::optional<std::filesystem::path> embeddings;
  std::optional<SyntheticSpec> synthetic;
  // Unset fields of the "model" object keep ModelConfig defaults, except
  // embed_dim (the embedding width) and context_dim (2 * lstm_hidden).
  ModelConfig model;
  bool embed_dim_given = false;
  TrainConfig train;
  std::size_t k = 10;
  std::uint64_t fold_seed = 42;
  std::filesystem::path output_dir = "out";
  std::string model_name = "bilstm_attention";
};

// Throws UsageError with a field-level message.
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

// Runs a subcommand (args exclude the program name) and returns its exit
// code: 0 success, 2 usage/config error, 3 data error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace metaphornet
