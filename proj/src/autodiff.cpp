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

#include "metaphornet/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "metaphornet/error.hpp"

namespace metaphornet {

const Tensor& Var::value() const {
  if (graph_ == nullptr) throw GraphError("use of an unbound Var");
  return graph_->value(id_);
}

double Var::item() const {
  const Tensor& v = value();
  if (v.size() != 1) {
    throw ShapeError("item() on a tensor of shape " + shape_string(v.shape()));
  }
  return v[0];
}

Var Graph::constant(Tensor value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::parameter(Tensor& tensor) {
  Node node;
  node.external = &tensor;
  if (tensor.requires_grad()) {
    node.grad_sink = &tensor;
    node.tracks_grad = true;
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::frozen(const Tensor& tensor) {
  Node node;
  node.external = &tensor;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Graph::record(Tensor value, std::span<const Var> inputs, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  for (const Var& in : inputs) {
    check_owned(in);
    if (nodes_[in.id()].tracks_grad) node.tracks_grad = true;
  }
  if (node.tracks_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Graph::value(std::size_t id) const {
  const Node& node = nodes_.at(id);
  return node.external != nullptr ? *node.external : node.value;
}

std::span<double> Graph::grad_target(std::size_t id) {
  Node& node = nodes_[id];
  if (!node.tracks_grad) return {};
  if (node.grad.empty()) node.grad.assign(value(id).size(), 0.0);
  return node.grad;
}

void Graph::check_owned(const Var& v) const {
  if (v.graph() != this || v.id() >= nodes_.size()) {
    throw GraphError("node does not belong to this graph");
  }
}

void Graph::backward(Var seed) {
  check_owned(seed);
  if (value(seed.id()).size() != 1) {
    throw GraphError("backward seed must be a scalar, got shape " +
                     shape_string(value(seed.id()).shape()));
  }
  for (Node& node : nodes_) node.grad.clear();
  if (!nodes_[seed.id()].tracks_grad) return;

  grad_target(seed.id())[0] = 1.0;
  for (std::size_t i = seed.id() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (node.grad.empty()) continue;
    if (node.backward) {
      // Only inputs (lower ids) are written, so node.grad stays put.
      node.backward(*this, node.grad);
    } else if (node.grad_sink != nullptr) {
      std::span<double> dst = node.grad_sink->grad();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += node.grad[j];
    }
  }
}

namespace ad {
namespace {

Graph& graph_of(const Var& a) {
  if (a.graph() == nullptr) throw GraphError("use of an unbound Var");
  return *a.graph();
}

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
  if (a.graph() != b.graph()) throw GraphError(std::string(op) + ": mixed graphs");
}

// Elementwise unary op whose derivative is expressed through the input x and
// output y.
template <typename Fwd, typename Deriv>
Var unary(Var a, Fwd fwd, Deriv deriv) {
  Graph& g = graph_of(a);
  const Tensor& x = a.value();
  Tensor out(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = fwd(x[i]);
  const std::size_t in_id = a.id();
  Var result;
  const Var inputs[] = {a};
  result = g.record(std::move(out), inputs,
                    [in_id, deriv, out_id = g.size()](Graph& gr, std::span<const double> dy) {
                      const Tensor& xv = gr.value(in_id);
                      const Tensor& yv = gr.value(out_id);
                      std::span<double> dx = gr.grad_target(in_id);
                      for (std::size_t i = 0; i < dx.size(); ++i) {
                        dx[i] += dy[i] * deriv(xv[i], yv[i]);
                      }
                    });
  return result;
}

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Var matmul(Var a, Var b) {
  Graph& g = graph_of(a);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() != 2 || bv.rank() != 2 || av.dim(1) != bv.dim(0)) {
    throw ShapeError("matmul: incompatible shapes " + shape_string(av.shape()) +
                     " and " + shape_string(bv.shape()));
  }
  if (a.graph() != b.graph()) throw GraphError("matmul: mixed graphs");
  const std::size_t m = av.dim(0), k = av.dim(1), n = bv.dim(1);
  Tensor out({m, n});
  const double* A = av.data().data();
  const double* B = bv.data().data();
  double* C = out.data().data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      const double* brow = B + p * n;
      double* crow = C + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
  const Var inputs[] = {a, b};
  return g.record(std::move(out), inputs,
                  [a_id = a.id(), b_id = b.id(), m, k, n](Graph& gr,
                                                           std::span<const double> dc) {
                    const double* A = gr.value(a_id).data().data();
                    const double* B = gr.value(b_id).data().data();
                    // dA = dC . B^T
                    std::span<double> da = gr.grad_target(a_id);
                    if (!da.empty()) {
                      for (std::size_t i = 0; i < m; ++i) {
                        for (std::size_t p = 0; p < k; ++p) {
                          const double* brow = B + p * n;
                          const double* dcrow = dc.data() + i * n;
                          double acc = 0.0;
                          for (std::size_t j = 0; j < n; ++j) acc += dcrow[j] * brow[j];
                          da[i * k + p] += acc;
                        }
                      }
                    }
                    // dB = A^T . dC
                    std::span<double> db = gr.grad_target(b_id);
                    if (!db.empty()) {
                      for (std::size_t i = 0; i < m; ++i) {
                        const double* dcrow = dc.data() + i * n;
                        for (std::size_t p = 0; p < k; ++p) {
                          const double aip = A[i * k + p];
                          double* dbrow = db.data() + p * n;
                          for (std::size_t j = 0; j < n; ++j) dbrow[j] += aip * dcrow[j];
                        }
                      }
                    }
                  });
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Graph& g = graph_of(a);
  Tensor out(a.shape());
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  const Var inputs[] = {a, b};
  return g.record(std::move(out), inputs,
                  [a_id = a.id(), b_id = b.id()](Graph& gr, std::span<const double> dy) {
                    for (const std::size_t id : {a_id, b_id}) {
                      std::span<double> dx = gr.grad_target(id);
                      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
                    }
                  });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Graph& g = graph_of(a);
  Tensor out(a.shape());
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  const Var inputs[] = {a, b};
  return g.record(std::move(out), inputs,
                  [a_id = a.id(), b_id = b.id()](Graph& gr, std::span<const double> dy) {
                    std::span<double> da = gr.grad_target(a_id);
                    for (std::size_t i = 0; i < da.size(); ++i) da[i] += dy[i];
                    std::span<double> db = gr.grad_target(b_id);
                    for (std::size_t i = 0; i < db.size(); ++i) db[i] -= dy[i];
                  });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  Graph& g = graph_of(a);
  Tensor out(a.shape());
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  const Var inputs[] = {a, b};
  return g.record(std::move(out), inputs,
                  [a_id = a.id(), b_id = b.id()](Graph& gr, std::span<const double> dy) {
                    const Tensor& av = gr.value(a_id);
                    const Tensor& bv = gr.value(b_id);
                    std::span<double> da = gr.grad_target(a_id);
                    for (std::size_t i = 0; i < da.size(); ++i) da[i] += dy[i] * bv[i];
                    std::span<double> db = gr.grad_target(b_id);
                    for (std::size_t i = 0; i < db.size(); ++i) db[i] += dy[i] * av[i];
                  });
}

Var scale(Var a, double factor) {
  return unary(
      a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Var tanh(Var a) {
  return unary(
      a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Var sigmoid(Var a) {
  return unary(a, stable_sigmoid, [](double, double y) { return y * (1.0 - y); });
}

Var exp(Var a) {
  return unary(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var log(Var a) {
  const Tensor& x = a.value();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) {
      throw DomainError("log of non-positive value " + std::to_string(x[i]) +
                        " at index " + std::to_string(i));
    }
  }
  return unary(
      a, [](double v) { return std::log(v); },
      [](double v, double) { return 1.0 / v; });
}

Var softmax_masked(Var logits, const std::vector<bool>& mask) {
  Graph& g = graph_of(logits);
  const Tensor& z = logits.value();
  if (mask.size() != z.size()) {
    throw ShapeError("softmax_masked: mask of length " + std::to_string(mask.size()) +
                     " for logits of shape " + shape_string(z.shape()));
  }
  double max_logit = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (mask[i]) {
      max_logit = std::max(max_logit, z[i]);
      any = true;
    }
  }
  if (!any) throw InvalidMaskError("softmax_masked: every position is masked");

  Tensor out(z.shape());
  double total = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (mask[i]) {
      out[i] = std::exp(z[i] - max_logit);
      total += out[i];
    }
  }
  for (std::size_t i = 0; i < z.size(); ++i) out[i] /= total;

  const Var inputs[] = {logits};
  return g.record(std::move(out), inputs,
                  [in_id = logits.id(), out_id = g.size()](Graph& gr,
                                                          std::span<const double> dy) {
                    const Tensor& y = gr.value(out_id);
                    double dot = 0.0;
                    for (std::size_t i = 0; i < y.size(); ++i) dot += y[i] * dy[i];
                    std::span<double> dz = gr.grad_target(in_id);
                    // Masked outputs are exactly zero, so their gradient vanishes.
                    for (std::size_t i = 0; i < dz.size(); ++i) dz[i] += y[i] * (dy[i] - dot);
                  });
}

Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  Graph& g = graph_of(parts[0]);
  const Shape& first = parts[0].shape();
  if (axis >= first.size()) {
    throw ShapeError("concat: axis " + std::to_string(axis) + " out of range for " +
                     shape_string(first));
  }
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= first[d];
  for (std::size_t d = axis + 1; d < first.size(); ++d) inner *= first[d];

  std::vector<std::size_t> extents;
  std::size_t total = 0;
  for (const Var& p : parts) {
    const Shape& s = p.shape();
    bool ok = s.size() == first.size() && p.graph() == parts[0].graph();
    for (std::size_t d = 0; ok && d < s.size(); ++d) {
      if (d != axis && s[d] != first[d]) ok = false;
    }
    if (!ok) {
      throw ShapeError("concat: incompatible shapes " + shape_string(first) + " and " +
                       shape_string(s) + " along axis " + std::to_string(axis));
    }
    extents.push_back(s[axis]);
    total += s[axis];
  }

  Shape out_shape = first;
  out_shape[axis] = total;
  Tensor out(out_shape);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Tensor& v = parts[p].value();
    const std::size_t block = extents[p] * inner;
    for (std::size_t o = 0; o < outer; ++o) {
      std::copy_n(v.data().begin() + o * block, block,
                  out.data().begin() + o * total * inner + offset * inner);
    }
    offset += extents[p];
  }

  std::vector<std::size_t> ids;
  for (const Var& p : parts) ids.push_back(p.id());
  return g.record(std::move(out), parts,
                  [ids, extents, outer, inner, total](Graph& gr, std::span<const double> dy) {
                    std::size_t offset = 0;
                    for (std::size_t p = 0; p < ids.size(); ++p) {
                      std::span<double> dx = gr.grad_target(ids[p]);
                      const std::size_t block = extents[p] * inner;
                      if (!dx.empty()) {
                        for (std::size_t o = 0; o < outer; ++o) {
                          const double* src = dy.data() + o * total * inner + offset * inner;
                          double* dst = dx.data() + o * block;
                          for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
                        }
                      }
                      offset += extents[p];
                    }
                  });
}

Var reshape(Var a, Shape shape) {
  Graph& g = graph_of(a);
  if (shape_size(shape) != a.size()) {
    throw ShapeError("reshape: cannot view " + shape_string(a.shape()) + " as " +
                     shape_string(shape));
  }
  const Tensor& v = a.value();
  Tensor out(std::move(shape), std::vector<double>(v.data().begin(), v.data().end()));
  const Var inputs[] = {a};
  return g.record(std::move(out), inputs,
                  [in_id = a.id()](Graph& gr, std::span<const double> dy) {
                    std::span<double> dx = gr.grad_target(in_id);
                    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += dy[i];
                  });
}

Var sum(Var a) {
  Graph& g = graph_of(a);
  double total = 0.0;
  for (const double v : a.value().data()) total += v;
  const Var inputs[] = {a};
  return g.record(Tensor::scalar(total), inputs,
                  [in_id = a.id()](Graph& gr, std::span<const double> dy) {
                    std::span<double> dx = gr.grad_target(in_id);
                    for (double& d : dx) d += dy[0];
                  });
}

Var binary_cross_entropy(Var score, double label) {
  Graph& g = graph_of(score);
  constexpr double kLo = 1e-7;
  constexpr double kHi = 1.0 - 1e-7;
  if (score.size() != 1) {
    throw ShapeError("binary_cross_entropy: score must have one element, got " +
                     shape_string(score.shape()));
  }
  const double s = std::clamp(score.value()[0], kLo, kHi);
  const double loss = -(label * std::log(s) + (1.0 - label) * std::log(1.0 - s));
  const Var inputs[] = {score};
  return g.record(Tensor::scalar(loss), inputs,
                  [in_id = score.id(), s, label](Graph& gr, std::span<const double> dy) {
                    std::span<double> dx = gr.grad_target(in_id);
                    dx[0] += dy[0] * (-label / s + (1.0 - label) / (1.0 - s));
                  });
}

}  // namespace ad

double GradCheckReport::worst() const {
  double w = 0.0;
  for (const double e : max_relative_error) w = std::max(w, e);
  return w;
}

GradCheckReport grad_check(const std::function<Var(Graph&)>& f,
                           std::span<Tensor* const> inputs, double step,
                           double tolerance) {
  std::vector<bool> had_grad;
  for (Tensor* t : inputs) {
    had_grad.push_back(t->requires_grad());
    t->set_requires_grad(true);
  }

  std::vector<std::vector<double>> analytic;
  {
    Graph g;
    const Var out = f(g);
    g.backward(out);
    for (Tensor* t : inputs) analytic.emplace_back(t->grad().begin(), t->grad().end());
  }

  auto evaluate = [&f]() {
    Graph g;
    return f(g).item();
  };

  GradCheckReport report;
  report.tolerance = tolerance;
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    Tensor& t = *inputs[n];
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double saved = t[i];
      t[i] = saved + step;
      const double plus = evaluate();
      t[i] = saved - step;
      const double minus = evaluate();
      t[i] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double a = analytic[n][i];
      const double err =
          std::abs(a - numeric) / std::max(1e-8, std::abs(a) + std::abs(numeric));
      worst = std::max(worst, err);
    }
    report.max_relative_error.push_back(worst);
  }
  for (std::size_t n = 0; n < inputs.size(); ++n) inputs[n]->set_requires_grad(had_grad[n]);
  return report;
}

}  // namespace metaphornet
