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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metaphornet/autodiff.hpp"
#include "metaphornet/tensor.hpp"

namespace metaphornet {

struct ModelConfig {
  std::size_t embed_dim = 1024;
  std::size_t lstm_hidden = 256;
  std::size_t heads = 4;
  std::size_t context_dim = 512;
  std::uint64_t seed = 0;

  std::size_t encoder_dim() const { return 2 * lstm_hidden; }
  // Throws ArgumentError on a zero dimension.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;
};

struct LstmDirectionParams {
  // Gate weights act on [x_t ; h_{t-1}], shape [H x (d_in + H)].
  Tensor w_input, w_forget, w_output, w_cell;
  // [H x 1]
  Tensor b_input, b_forget, b_output, b_cell;
};

struct ModelParams {
  LstmDirectionParams forward;
  LstmDirectionParams backward;
  // Per head: scoring row [1 x 2H] and scalar bias [1 x 1].
  std::vector<Tensor> attention_w;
  std::vector<Tensor> attention_b;
  // Projection of the concatenated head contexts, [d_c x h*2H] and [d_c x 1].
  Tensor projection_w;
  Tensor projection_b;
  // Decoder, [1 x d_c] and [1 x 1].
  Tensor decoder_w;
  Tensor decoder_b;

  // Every tensor with a stable name, in checkpoint order:
  // lstm.{fwd,bwd}.{w_i,w_f,w_o,w_g,b_i,b_f,b_o,b_g}, attn.<j>.{w,b},
  // proj.w, proj.b, dec.w, dec.b.
  std::vector<std::pair<std::string, Tensor*>> named();
  std::vector<std::pair<std::string, const Tensor*>> named() const;

  void set_requires_grad(bool on);
  void zero_grad();
  bool all_finite() const;
  std::size_t parameter_count() const;
};

// Glorot-uniform weights, zero biases except forget-gate biases of 1.
ModelParams init_params(const ModelConfig& config);

// Glorot bound sqrt(6 / (fan_in + fan_out)) for a [fan_out x fan_in] weight.
double glorot_bound(std::size_t fan_in, std::size_t fan_out);

// Model tensors as graph leaves.
struct BoundParams {
  struct Direction {
    Var w_input, w_forget, w_output, w_cell;
    Var b_input, b_forget, b_output, b_cell;
  };
  Direction forward;
  Direction backward;
  std::vector<Var> attention_w;
  std::vector<Var> attention_b;
  Var projection_w, projection_b;
  Var decoder_w, decoder_b;
};

// Leaves that collect gradients into tensors with requires_grad set.
BoundParams bind(Graph& graph, ModelParams& params);
// Read-only leaves for inference.
BoundParams bind_frozen(Graph& graph, const ModelParams& params);

struct EncoderStates {
  // One [2H x 1] state per token: forward hidden state over backward hidden
  // state. Masked positions hold zeros and do not advance the recurrences.
  std::vector<Var> states;
};

// embeddings: [n x d_in]. An empty mask means every token is real.
EncoderStates bilstm_forward(Graph& graph, const BoundParams& params, const Tensor& embeddings,
                             const std::vector<bool>& mask = {});

struct AttentionOutput {
  // Per head, softmax weights over tokens, shape [1 x n].
  std::vector<Var> weights;
  // Per head, weighted sum of encoder states, [2H x 1].
  std::vector<Var> head_contexts;
  // Projected context, [d_c x 1].
  Var context;

  // Weights as an [h x n] value matrix.
  Tensor weight_matrix() const;
};

AttentionOutput attention_pool(Graph& graph, const BoundParams& params,
                               std::span<const Var> states, const std::vector<bool>& mask = {});

// sigmoid(W_dec c + b_dec) as a [1 x 1] node.
Var decode(Graph& graph, const BoundParams& params, Var context);

struct ForwardResult {
  Var score;
  AttentionOutput attention;
};

ForwardResult model_forward(Graph& graph, const BoundParams& params, const ModelConfig& config,
                            const Tensor& embeddings, const std::vector<bool>& mask = {});

// Score of one example without gradient bookkeeping.
double predict_score(const ModelParams& params, const ModelConfig& config,
                     const Tensor& embeddings);

}  // namespace metaphornet
