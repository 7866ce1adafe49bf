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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "metaphornet/dataset.hpp"
#include "metaphornet/random.hpp"
#include "metaphornet/tensor.hpp"

namespace metaphornet::testing {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    Rng rng(fnv1a(tag) ^ static_cast<std::uint64_t>(
                             std::chrono::steady_clock::now().time_since_epoch().count()));
    path_ = std::filesystem::temp_directory_path() /
            ("metaphornet-" + tag + "-" + std::to_string(rng.next()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline Tensor random_tensor(Shape shape, Rng& rng, double scale = 1.0) {
  Tensor t(std::move(shape));
  for (double& x : t.data()) x = scale * rng.uniform(-1.0, 1.0);
  return t;
}

// Random sentences over a small vocabulary, labels alternating 1,0,1,...
inline Dataset toy_dataset(std::size_t n, std::uint64_t seed, std::size_t verbs = 4) {
  Rng rng(seed);
  Dataset d;
  d.name = "toy";
  for (std::size_t i = 0; i < n; ++i) {
    Example e;
    e.id = "toy-" + std::to_string(i);
    const std::size_t len = 3 + rng.below(6);
    for (std::size_t j = 0; j < len; ++j) e.tokens.push_back("w" + std::to_string(rng.below(30)));
    e.verb_index = rng.below(len);
    e.verb = "v" + std::to_string(rng.below(verbs));
    e.label = static_cast<int>((i + 1) % 2);
    d.examples.push_back(std::move(e));
  }
  return d;
}

}  // namespace metaphornet::testing
