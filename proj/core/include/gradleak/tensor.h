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

#ifndef GRADLEAK_TENSOR_H_
#define GRADLEAK_TENSOR_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gradleak/errors.h"

namespace gradleak {

// Dimensions of a dense row-major array. An empty dimension list is a scalar.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<std::size_t> dims);
  explicit Shape(std::vector<std::size_t> dims);

  std::size_t rank() const { return dims_.size(); }
  std::size_t operator[](std::size_t i) const { return dims_[i]; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t numel() const;

  // Views every tensor as a matrix: the last axis is the column axis and all
  // leading axes are folded into rows. Scalars are 1x1.
  std::size_t cols() const;
  std::size_t rows() const;

  bool operator==(const Shape& other) const = default;
  std::string to_string() const;

 private:
  std::vector<std::size_t> dims_;
};

class Tensor;
struct Node;

// Adjoint rule of a primitive. Receives the op inputs, the op output and the
// incoming adjoint; returns one adjoint per input (an undefined Tensor where
// `needs[i]` is false). Rules must be written with differentiable primitives
// so that the returned adjoints are themselves graph-recorded.
using BackwardFn = std::function<std::vector<Tensor>(
    std::span<const Tensor> inputs, const Tensor& output, const Tensor& grad,
    const std::vector<bool>& needs)>;

// Handle to a node of the computation graph. Copies share the node; the value
// is immutable once created.
class Tensor {
 public:
  Tensor() = default;

  // Leaf constructors.
  static Tensor constant(Shape shape, std::vector<double> data);
  static Tensor variable(Shape shape, std::vector<double> data);
  static Tensor zeros(Shape shape);
  static Tensor full(Shape shape, double value);
  static Tensor scalar(double value);

  // Records a primitive application. When gradient recording is off, or no
  // input requires a gradient, the result is a plain constant leaf.
  static Tensor from_op(const char* op, Shape shape, std::vector<double> data,
                        std::vector<Tensor> inputs, BackwardFn backward);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::span<const double> data() const;
  std::size_t numel() const { return shape().numel(); }
  double item() const;
  double at(std::size_t flat_index) const { return data()[flat_index]; }

  bool requires_grad() const;
  bool is_leaf() const;
  const char* op_name() const;

  // Same value, no history, not requiring a gradient.
  Tensor detach() const;
  // Same value as a fresh leaf that requires a gradient.
  Tensor as_variable() const;

  const Node* node() const { return node_.get(); }
  bool same_node(const Tensor& other) const { return node_ == other.node_; }

 private:
  friend struct Node;
  explicit Tensor(std::shared_ptr<Node> node) : node_(std::move(node)) {}
  std::shared_ptr<Node> node_;
};

struct Node {
  ~Node();

  Shape shape;
  std::vector<double> value;
  std::vector<Tensor> inputs;
  BackwardFn backward;
  bool requires_grad = false;
  const char* op = "leaf";
};

// Gradient recording is thread-local and enabled by default.
bool grad_mode_enabled();

class GradModeGuard {
 public:
  explicit GradModeGuard(bool enabled);
  ~GradModeGuard();
  GradModeGuard(const GradModeGuard&) = delete;
  GradModeGuard& operator=(const GradModeGuard&) = delete;

 private:
  bool previous_;
};

class NoGradGuard : public GradModeGuard {
 public:
  NoGradGuard() : GradModeGuard(false) {}
};

// Reverse-mode gradient of a scalar `output` with respect to each tensor in
// `wrt`. With `create_graph` the returned gradients are recorded in the graph
// and may be differentiated again. A `wrt` entry that `output` does not depend
// on is a usage error unless `allow_unused`, in which case zeros are returned.
std::vector<Tensor> grad(const Tensor& output, std::span<const Tensor> wrt,
                         bool create_graph = false, bool allow_unused = false);

Tensor grad(const Tensor& output, const Tensor& wrt, bool create_graph = false);

}  // namespace gradleak

#endif  // GRADLEAK_TENSOR_H_
