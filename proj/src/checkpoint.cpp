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

#include "metaphornet/checkpoint.hpp"

#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "binary_io.hpp"
#include "json.hpp"
#include "metaphornet/error.hpp"

namespace metaphornet {

using nlohmann::json;
using nlohmann::ordered_json;

void write_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
  ordered_json header;
  header["config"] = {{"embed_dim", checkpoint.config.embed_dim},
                      {"lstm_hidden", checkpoint.config.lstm_hidden},
                      {"heads", checkpoint.config.heads},
                      {"context_dim", checkpoint.config.context_dim},
                      {"seed", checkpoint.config.seed}};
  header["seed"] = checkpoint.seed;
  header["epoch"] = checkpoint.epoch;

  detail::ByteWriter w;
  w.raw(header.dump());
  w.raw("\n");
  const auto named = checkpoint.params.named();
  w.u32(static_cast<std::uint32_t>(named.size()));
  for (const auto& [name, t] : named) {
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.raw(name);
    w.u32(static_cast<std::uint32_t>(t->rank()));
    for (const std::size_t d : t->shape()) w.u32(static_cast<std::uint32_t>(d));
    for (const double v : t->data()) w.f32(static_cast<float>(v));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(w.bytes().data()),
            static_cast<std::streamsize>(w.bytes().size()));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open checkpoint " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  std::size_t newline = 0;
  while (newline < bytes.size() && bytes[newline] != '\n') ++newline;
  if (newline == bytes.size()) throw FormatError("checkpoint has no header line");

  Checkpoint ckpt;
  try {
    const json header =
        json::parse(std::string(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(newline)));
    const json& c = header.at("config");
    ckpt.config.embed_dim = c.at("embed_dim").get<std::size_t>();
    ckpt.config.lstm_hidden = c.at("lstm_hidden").get<std::size_t>();
    ckpt.config.heads = c.at("heads").get<std::size_t>();
    ckpt.config.context_dim = c.at("context_dim").get<std::size_t>();
    ckpt.config.seed = c.at("seed").get<std::uint64_t>();
    ckpt.seed = header.at("seed").get<std::uint64_t>();
    ckpt.epoch = header.at("epoch").get<std::size_t>();
  } catch (const json::exception& err) {
    throw FormatError(std::string("checkpoint header: ") + err.what());
  }
  try {
    ckpt.config.validate();
  } catch (const ArgumentError& err) {
    throw FormatError(std::string("checkpoint header: ") + err.what());
  }

  // Shapes come from a freshly initialised model; values are overwritten.
  ckpt.params = init_params(ckpt.config);
  auto named = ckpt.params.named();
  detail::ByteReader r(std::span<const std::uint8_t>(bytes).subspan(newline + 1));
  const std::uint32_t count = r.u32("block count");
  if (count != named.size()) {
    throw CorruptionError("checkpoint holds " + std::to_string(count) + " blocks, config needs " +
                          std::to_string(named.size()));
  }
  for (auto& [name, t] : named) {
    const std::size_t offset = newline + 1 + r.offset();
    const std::string found = r.str(r.u16("block name length"), "block name");
    if (found != name) {
      throw CorruptionError("block at byte offset " + std::to_string(offset) + " is \"" + found +
                            "\", expected \"" + name + "\"");
    }
    Shape shape(r.u32("block rank"));
    for (std::size_t& d : shape) d = r.u32("block dims");
    if (shape != t->shape()) {
      throw CorruptionError("block \"" + name + "\" has shape " + shape_string(shape) +
                            ", config needs " + shape_string(t->shape()));
    }
    std::vector<float> values(t->size());
    r.f32_array(values, "block values");
    for (std::size_t i = 0; i < values.size(); ++i) (*t)[i] = values[i];
  }
  if (r.remaining() != 0) {
    throw CorruptionError(std::to_string(r.remaining()) + " trailing bytes after last block");
  }
  if (!ckpt.params.all_finite()) throw CorruptionError("checkpoint holds non-finite values");
  return ckpt;
}

}  // namespace metaphornet
