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
#include <functional>
#include <span>
#include <vector>

#include "metaphornet/tensor.hpp"

namespace metaphornet {

class Graph;

// Handle to a node of a Graph. Cheap to copy; valid while its Graph lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t size() const { return value().size(); }
  // Value of a 1-element node.
  double item() const;

  Graph* graph() const { return graph_; }
  std::size_t id() const { return id_; }

 private:
  friend class Graph;
  Var(Graph* graph, std::size_t id) : graph_(graph), id_(id) {}

  Graph* graph_ = nullptr;
  std::size_t id_ = 0;
};

// Define-by-run tape. Nodes are appended in creation order, which is a
// topological order; backward() walks it once in reverse.
class Graph {
 public:
  // Called with the gradient flowing into a node; must add the
  // contributions for that node's inputs via grad_target().
  using BackwardFn = std::function<void(Graph&, std::span<const double>)>;

  Graph() = default;
  Graph(const Graph&) = delete;
  Graph& operator=(const Graph&) = delete;

  Var constant(Tensor value);
  // Leaf that reads `tensor` in place. If tensor.requires_grad(), backward()
  // adds into tensor.grad(); the tensor must outlive the graph.
  Var parameter(Tensor& tensor);
  // Leaf that reads `tensor` in place without collecting gradients.
  Var frozen(const Tensor& tensor);

  Var record(Tensor value, std::span<const Var> inputs, BackwardFn backward);

  const Tensor& value(std::size_t id) const;
  bool tracks_grad(std::size_t id) const { return nodes_[id].tracks_grad; }
  // Gradient accumulator of node `id`, or an empty span when the node does
  // not participate in differentiation.
  std::span<double> grad_target(std::size_t id);

  // Reverse accumulation from a 1-element seed, gradients summed over
  // fan-out, results added into every reachable requires_grad parameter.
  void backward(Var seed);

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    Tensor* grad_sink = nullptr;
    bool tracks_grad = false;
    BackwardFn backward;
    std::vector<double> grad;
  };

  void check_owned(const Var& v) const;

  std::vector<Node> nodes_;
};

namespace ad {

// [m x k] . [k x n] -> [m x n].
Var matmul(Var a, Var b);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double factor);
Var tanh(Var a);
Var sigmoid(Var a);
Var exp(Var a);
// Throws DomainError when any element is <= 0.
Var log(Var a);

// Softmax over the positions where mask is true; masked positions are 0.
// Stabilised by subtracting the maximum unmasked logit.
Var softmax_masked(Var logits, const std::vector<bool>& mask);

Var concat(std::span<const Var> parts, std::size_t axis);
Var reshape(Var a, Shape shape);
// Sum of all elements, shape [1].
Var sum(Var a);

// -[y ln s + (1 - y) ln(1 - s)] with s clamped to [1e-7, 1 - 1e-7]. At a
// clamped score the gradient is taken at the clamp point so saturated
// predictions still receive a learning signal.
Var binary_cross_entropy(Var score, double label);

}  // namespace ad

struct GradCheckReport {
  // Per input: max |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
  std::vector<double> max_relative_error;
  double tolerance = 0.0;

  double worst() const;
  bool passed() const { return worst() < tolerance; }
};

// Compares backward() against central differences. `f` builds a fresh
// graph binding `inputs` through Graph::parameter and returns a 1-element
// node. Inputs are restored before returning.
GradCheckReport grad_check(const std::function<Var(Graph&)>& f,
                           std::span<Tensor* const> inputs, double step = 1e-5,
                           double tolerance = 1e-6);

}  // namespace metaphornet
