//
// Copyright 2026 The gradleak Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "gradleak/tensor.h"

#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "gradleak/ops.h"

namespace gradleak {
namespace {

thread_local bool tls_grad_mode = true;

void check_finite(const char* op, std::span<const double> data) {
  for (double v : data) {
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite value produced by ") + op);
    }
  }
}

}  // namespace

Shape::Shape(std::initializer_list<std::size_t> dims) : dims_(dims) {}

Shape::Shape(std::vector<std::size_t> dims) : dims_(std::move(dims)) {}

std::size_t Shape::numel() const {
  return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                         std::multiplies<>());
}

std::size_t Shape::cols() const { return dims_.empty() ? 1 : dims_.back(); }

std::size_t Shape::rows() const {
  const std::size_t c = cols();
  return c == 0 ? 0 : numel() / c;
}

std::string Shape::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    if (i) os << 'x';
    os << dims_[i];
  }
  os << ']';
  return os.str();
}

Node::~Node() {
  // Long graphs would otherwise be torn down recursively.
  std::vector<std::shared_ptr<Node>> pending;
  for (auto& t : inputs) {
    if (t.node_) pending.push_back(std::move(t.node_));
  }
  inputs.clear();
  while (!pending.empty()) {
    std::shared_ptr<Node> n = std::move(pending.back());
    pending.pop_back();
    if (n.use_count() == 1) {
      for (auto& t : n->inputs) {
        if (t.node_) pending.push_back(std::move(t.node_));
      }
      n->inputs.clear();
    }
  }
}

Tensor Tensor::constant(Shape shape, std::vector<double> data) {
  if (shape.numel() != data.size()) {
    throw ShapeError("tensor data length " + std::to_string(data.size()) +
                     " does not match shape " + shape.to_string());
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(data);
  return Tensor(std::move(node));
}

Tensor Tensor::variable(Shape shape, std::vector<double> data) {
  Tensor t = constant(std::move(shape), std::move(data));
  t.node_->requires_grad = true;
  return t;
}

Tensor Tensor::zeros(Shape shape) {
  const std::size_t n = shape.numel();
  return constant(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::full(Shape shape, double value) {
  const std::size_t n = shape.numel();
  return constant(std::move(shape), std::vector<double>(n, value));
}

Tensor Tensor::scalar(double value) { return constant(Shape{}, {value}); }

Tensor Tensor::from_op(const char* op, Shape shape, std::vector<double> data,
                       std::vector<Tensor> inputs, BackwardFn backward) {
  check_finite(op, data);
  Tensor out = constant(std::move(shape), std::move(data));
  out.node_->op = op;
  if (!tls_grad_mode) return out;
  bool any = false;
  for (const Tensor& in : inputs) any = any || (in.defined() && in.requires_grad());
  if (!any) return out;
  out.node_->requires_grad = true;
  out.node_->inputs = std::move(inputs);
  out.node_->backward = std::move(backward);
  return out;
}

const Shape& Tensor::shape() const { return node_->shape; }

std::span<const double> Tensor::data() const { return node_->value; }

double Tensor::item() const {
  if (numel() != 1) {
    throw ShapeError("item() on tensor of shape " + shape().to_string());
  }
  return node_->value[0];
}

bool Tensor::requires_grad() const { return node_ && node_->requires_grad; }

bool Tensor::is_leaf() const { return !node_->backward; }

const char* Tensor::op_name() const { return node_->op; }

Tensor Tensor::detach() const { return constant(shape(), node_->value); }

Tensor Tensor::as_variable() const { return variable(shape(), node_->value); }

bool grad_mode_enabled() { return tls_grad_mode; }

GradModeGuard::GradModeGuard(bool enabled) : previous_(tls_grad_mode) {
  tls_grad_mode = enabled;
}

GradModeGuard::~GradModeGuard() { tls_grad_mode = previous_; }

std::vector<Tensor> grad(const Tensor& output, std::span<const Tensor> wrt,
                         bool create_graph, bool allow_unused) {
  if (!output.defined() || output.numel() != 1) {
    throw UsageError("grad() needs a scalar output");
  }
  GradModeGuard mode(create_graph);

  // Post-order over the differentiable part of the graph.
  std::vector<Tensor> order;
  std::unordered_map<const Node*, std::size_t> index;
  if (output.requires_grad()) {
    std::vector<std::pair<Tensor, std::size_t>> stack;
    stack.emplace_back(output, 0);
    index.emplace(output.node(), SIZE_MAX);
    while (!stack.empty()) {
      auto& [t, next] = stack.back();
      const auto& inputs = t.node()->inputs;
      if (next < inputs.size()) {
        const Tensor& in = inputs[next++];
        if (in.requires_grad() && !index.contains(in.node())) {
          index.emplace(in.node(), SIZE_MAX);
          stack.emplace_back(in, 0);
        }
        continue;
      }
      index[t.node()] = order.size();
      order.push_back(t);
      stack.pop_back();
    }
  }

  std::vector<bool> relevant(order.size(), false);
  for (const Tensor& w : wrt) {
    auto it = index.find(w.node());
    if (it != index.end()) relevant[it->second] = true;
  }
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (relevant[i]) continue;
    for (const Tensor& in : order[i].node()->inputs) {
      auto it = in.requires_grad() ? index.find(in.node()) : index.end();
      if (it != index.end() && relevant[it->second]) {
        relevant[i] = true;
        break;
      }
    }
  }

  std::vector<bool> keep(order.size(), false);
  for (const Tensor& w : wrt) {
    auto it = index.find(w.node());
    if (it != index.end()) keep[it->second] = true;
  }

  std::vector<Tensor> adjoint(order.size());
  if (!order.empty()) adjoint.back() = Tensor::full(output.shape(), 1.0);

  for (std::size_t i = order.size(); i-- > 0;) {
    if (!relevant[i] || !adjoint[i].defined()) continue;
    const Tensor& t = order[i];
    const Node* node = t.node();
    if (!node->backward) continue;
    std::vector<bool> needs(node->inputs.size(), false);
    bool any = false;
    for (std::size_t j = 0; j < node->inputs.size(); ++j) {
      const Tensor& in = node->inputs[j];
      if (!in.requires_grad()) continue;
      needs[j] = relevant[index.at(in.node())];
      any = any || needs[j];
    }
    if (any) {
      std::vector<Tensor> in_grads =
          node->backward(node->inputs, t, adjoint[i], needs);
      for (std::size_t j = 0; j < node->inputs.size(); ++j) {
        if (!needs[j]) continue;
        const Tensor& g = in_grads.at(j);
        if (!g.defined()) continue;
        if (!(g.shape() == node->inputs[j].shape())) {
          throw ShapeError(std::string("adjoint of ") + node->op +
                           " has shape " + g.shape().to_string() +
                           ", expected " +
                           node->inputs[j].shape().to_string());
        }
        Tensor& slot = adjoint[index.at(node->inputs[j].node())];
        slot = slot.defined() ? add(slot, g) : g;
      }
    }
    if (!keep[i]) adjoint[i] = Tensor();
  }

  std::vector<Tensor> result;
  result.reserve(wrt.size());
  for (const Tensor& w : wrt) {
    auto it = index.find(w.node());
    if (it != index.end() && adjoint[it->second].defined()) {
      result.push_back(adjoint[it->second]);
    } else if (allow_unused) {
      result.push_back(Tensor::zeros(w.shape()));
    } else {
      throw UsageError("grad(): output does not depend on a requested input");
    }
  }
  return result;
}

Tensor grad(const Tensor& output, const Tensor& wrt, bool create_graph) {
  return grad(output, std::span<const Tensor>(&wrt, 1), create_graph).front();
}

}  // namespace gradleak
