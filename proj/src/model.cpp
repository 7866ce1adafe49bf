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

#include "metaphornet/model.hpp"

#include <cmath>
#include <string>

#include "metaphornet/error.hpp"
#include "metaphornet/random.hpp"

namespace metaphornet {

void ModelConfig::validate() const {
  if (embed_dim == 0 || lstm_hidden == 0 || heads == 0 || context_dim == 0) {
    throw ArgumentError("model dimensions must be positive (embed_dim=" +
                        std::to_string(embed_dim) + ", lstm_hidden=" +
                        std::to_string(lstm_hidden) + ", heads=" + std::to_string(heads) +
                        ", context_dim=" + std::to_string(context_dim) + ")");
  }
}

namespace {

template <typename Params, typename Ptr>
std::vector<std::pair<std::string, Ptr>> named_impl(Params& p) {
  std::vector<std::pair<std::string, Ptr>> out;
  auto direction = [&out](const std::string& prefix, auto& d) {
    out.emplace_back(prefix + ".w_i", &d.w_input);
    out.emplace_back(prefix + ".w_f", &d.w_forget);
    out.emplace_back(prefix + ".w_o", &d.w_output);
    out.emplace_back(prefix + ".w_g", &d.w_cell);
    out.emplace_back(prefix + ".b_i", &d.b_input);
    out.emplace_back(prefix + ".b_f", &d.b_forget);
    out.emplace_back(prefix + ".b_o", &d.b_output);
    out.emplace_back(prefix + ".b_g", &d.b_cell);
  };
  direction("lstm.fwd", p.forward);
  direction("lstm.bwd", p.backward);
  for (std::size_t j = 0; j < p.attention_w.size(); ++j) {
    out.emplace_back("attn." + std::to_string(j) + ".w", &p.attention_w[j]);
    out.emplace_back("attn." + std::to_string(j) + ".b", &p.attention_b[j]);
  }
  out.emplace_back("proj.w", &p.projection_w);
  out.emplace_back("proj.b", &p.projection_b);
  out.emplace_back("dec.w", &p.decoder_w);
  out.emplace_back("dec.b", &p.decoder_b);
  return out;
}

}  // namespace

std::vector<std::pair<std::string, Tensor*>> ModelParams::named() {
  return named_impl<ModelParams, Tensor*>(*this);
}

std::vector<std::pair<std::string, const Tensor*>> ModelParams::named() const {
  return named_impl<const ModelParams, const Tensor*>(*this);
}

void ModelParams::set_requires_grad(bool on) {
  for (auto& [name, t] : named()) t->set_requires_grad(on);
}

void ModelParams::zero_grad() {
  for (auto& [name, t] : named()) t->zero_grad();
}

bool ModelParams::all_finite() const {
  for (const auto& [name, t] : named()) {
    if (!t->all_finite()) return false;
  }
  return true;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& [name, t] : named()) n += t->size();
  return n;
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

namespace {

Tensor glorot(Rng& rng, std::size_t rows, std::size_t cols) {
  const double bound = glorot_bound(cols, rows);
  Tensor t({rows, cols});
  for (double& v : t.data()) v = rng.uniform(-bound, bound);
  return t;
}

LstmDirectionParams init_direction(Rng& rng, std::size_t d_in, std::size_t hidden) {
  LstmDirectionParams d;
  d.w_input = glorot(rng, hidden, d_in + hidden);
  d.w_forget = glorot(rng, hidden, d_in + hidden);
  d.w_output = glorot(rng, hidden, d_in + hidden);
  d.w_cell = glorot(rng, hidden, d_in + hidden);
  d.b_input = Tensor({hidden, 1});
  d.b_forget = Tensor({hidden, 1}, std::vector<double>(hidden, 1.0));
  d.b_output = Tensor({hidden, 1});
  d.b_cell = Tensor({hidden, 1});
  return d;
}

}  // namespace

ModelParams init_params(const ModelConfig& config) {
  config.validate();
  Rng rng(mix64(config.seed ^ 0x696e6974706172ULL));
  const std::size_t enc = config.encoder_dim();
  ModelParams p;
  p.forward = init_direction(rng, config.embed_dim, config.lstm_hidden);
  p.backward = init_direction(rng, config.embed_dim, config.lstm_hidden);
  for (std::size_t j = 0; j < config.heads; ++j) {
    p.attention_w.push_back(glorot(rng, 1, enc));
    p.attention_b.emplace_back(Shape{1, 1});
  }
  p.projection_w = glorot(rng, config.context_dim, config.heads * enc);
  p.projection_b = Tensor({config.context_dim, 1});
  p.decoder_w = glorot(rng, 1, config.context_dim);
  p.decoder_b = Tensor({1, 1});
  return p;
}

namespace {

template <typename Params, typename Leaf>
BoundParams bind_with(Params& p, Leaf leaf) {
  auto direction = [&leaf](auto& d) {
    return BoundParams::Direction{leaf(d.w_input), leaf(d.w_forget), leaf(d.w_output),
                                  leaf(d.w_cell),  leaf(d.b_input),  leaf(d.b_forget),
                                  leaf(d.b_output), leaf(d.b_cell)};
  };
  BoundParams b;
  b.forward = direction(p.forward);
  b.backward = direction(p.backward);
  for (std::size_t j = 0; j < p.attention_w.size(); ++j) {
    b.attention_w.push_back(leaf(p.attention_w[j]));
    b.attention_b.push_back(leaf(p.attention_b[j]));
  }
  b.projection_w = leaf(p.projection_w);
  b.projection_b = leaf(p.projection_b);
  b.decoder_w = leaf(p.decoder_w);
  b.decoder_b = leaf(p.decoder_b);
  return b;
}

}  // namespace

BoundParams bind(Graph& graph, ModelParams& params) {
  return bind_with(params, [&graph](Tensor& t) { return graph.parameter(t); });
}

BoundParams bind_frozen(Graph& graph, const ModelParams& params) {
  return bind_with(params, [&graph](const Tensor& t) { return graph.frozen(t); });
}

namespace {

std::vector<bool> resolve_mask(const std::vector<bool>& mask, std::size_t n) {
  if (mask.empty()) return std::vector<bool>(n, true);
  if (mask.size() != n) {
    throw ShapeError("mask of length " + std::to_string(mask.size()) + " for " +
                     std::to_string(n) + " tokens");
  }
  return mask;
}

struct StepState {
  Var h;
  Var c;
};

StepState lstm_step(const BoundParams::Direction& d, Var x, const StepState& prev) {
  const Var parts[] = {x, prev.h};
  const Var z = ad::concat(parts, 0);
  const Var i = ad::sigmoid(ad::add(ad::matmul(d.w_input, z), d.b_input));
  const Var f = ad::sigmoid(ad::add(ad::matmul(d.w_forget, z), d.b_forget));
  const Var o = ad::sigmoid(ad::add(ad::matmul(d.w_output, z), d.b_output));
  const Var g = ad::tanh(ad::add(ad::matmul(d.w_cell, z), d.b_cell));
  const Var c = ad::add(ad::mul(f, prev.c), ad::mul(i, g));
  const Var h = ad::mul(o, ad::tanh(c));
  return {h, c};
}

}  // namespace

EncoderStates bilstm_forward(Graph& graph, const BoundParams& params, const Tensor& embeddings,
                             const std::vector<bool>& mask) {
  const Shape& w_shape = params.forward.w_input.shape();
  const std::size_t hidden = w_shape[0];
  const std::size_t d_in = w_shape[1] - hidden;
  if (embeddings.rank() != 2 || embeddings.dim(1) != d_in) {
    throw ShapeError("bilstm_forward: embeddings of shape " + shape_string(embeddings.shape()) +
                     " do not match input width " + std::to_string(d_in));
  }
  const std::size_t n = embeddings.dim(0);
  const std::vector<bool> real = resolve_mask(mask, n);

  std::vector<Var> inputs(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto row = embeddings.data().subspan(t * d_in, d_in);
    inputs[t] = graph.constant(Tensor({d_in, 1}, std::vector<double>(row.begin(), row.end())));
  }
  const Var zero = graph.constant(Tensor({hidden, 1}));

  std::vector<Var> fwd(n, zero), bwd(n, zero);
  StepState state{zero, zero};
  for (std::size_t t = 0; t < n; ++t) {
    if (!real[t]) continue;
    state = lstm_step(params.forward, inputs[t], state);
    fwd[t] = state.h;
  }
  state = {zero, zero};
  for (std::size_t t = n; t-- > 0;) {
    if (!real[t]) continue;
    state = lstm_step(params.backward, inputs[t], state);
    bwd[t] = state.h;
  }

  EncoderStates out;
  out.states.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const Var parts[] = {fwd[t], bwd[t]};
    out.states.push_back(ad::concat(parts, 0));
  }
  return out;
}

Tensor AttentionOutput::weight_matrix() const {
  const std::size_t h = weights.size();
  const std::size_t n = h == 0 ? 0 : weights[0].size();
  Tensor out({h, n});
  for (std::size_t j = 0; j < h; ++j) {
    const Tensor& w = weights[j].value();
    for (std::size_t i = 0; i < n; ++i) out.at(j, i) = w[i];
  }
  return out;
}

AttentionOutput attention_pool(Graph& graph, const BoundParams& params,
                               std::span<const Var> states, const std::vector<bool>& mask) {
  if (states.empty()) throw ArgumentError("attention_pool: empty sequence");
  const std::size_t n = states.size();
  const std::vector<bool> real = resolve_mask(mask, n);

  // Encoder states as columns, [2H x n].
  const Var stacked = ad::concat(states, 1);
  const Var ones = graph.constant(Tensor({1, n}, std::vector<double>(n, 1.0)));

  AttentionOutput out;
  for (std::size_t j = 0; j < params.attention_w.size(); ++j) {
    const Var logits = ad::add(ad::matmul(params.attention_w[j], stacked),
                               ad::matmul(params.attention_b[j], ones));
    const Var weights = ad::softmax_masked(logits, real);
    out.weights.push_back(weights);
    out.head_contexts.push_back(ad::matmul(stacked, ad::reshape(weights, {n, 1})));
  }
  const Var joined = ad::concat(out.head_contexts, 0);
  out.context = ad::add(ad::matmul(params.projection_w, joined), params.projection_b);
  return out;
}

Var decode(Graph&, const BoundParams& params, Var context) {
  if (context.shape() != Shape{params.decoder_w.shape()[1], 1}) {
    throw ShapeError("decode: context of shape " + shape_string(context.shape()) +
                     " does not match decoder " + shape_string(params.decoder_w.shape()));
  }
  return ad::sigmoid(ad::add(ad::matmul(params.decoder_w, context), params.decoder_b));
}

ForwardResult model_forward(Graph& graph, const BoundParams& params, const ModelConfig& config,
                            const Tensor& embeddings, const std::vector<bool>& mask) {
  if (embeddings.rank() != 2 || embeddings.dim(1) != config.embed_dim) {
    throw ShapeError("model_forward: embeddings of shape " + shape_string(embeddings.shape()) +
                     " but embed_dim is " + std::to_string(config.embed_dim));
  }
  const EncoderStates encoded = bilstm_forward(graph, params, embeddings, mask);
  ForwardResult result;
  result.attention = attention_pool(graph, params, encoded.states, mask);
  result.score = decode(graph, params, result.attention.context);
  return result;
}

double predict_score(const ModelParams& params, const ModelConfig& config,
                     const Tensor& embeddings) {
  Graph graph;
  const BoundParams bound = bind_frozen(graph, params);
  return model_forward(graph, bound, config, embeddings).score.item();
}

}  // namespace metaphornet
