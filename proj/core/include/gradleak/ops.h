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

// Differentiable primitives. Every adjoint rule is written in terms of the
// functions declared here, so gradients can be differentiated again.
//
// Matrix-style ops view a tensor of shape [..., n] as rows x n (see
// Shape::rows / Shape::cols) and return rank-2 results.

#ifndef GRADLEAK_OPS_H_
#define GRADLEAK_OPS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "gradleak/tensor.h"

namespace gradleak {

// Elementwise, operands of identical shape.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor div(const Tensor& a, const Tensor& b);
Tensor neg(const Tensor& a);
Tensor scale(const Tensor& a, double factor);
Tensor add_scalar(const Tensor& a, double offset);
Tensor exp(const Tensor& a);
Tensor log(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor sqrt(const Tensor& a);
Tensor pow(const Tensor& a, double exponent);
Tensor square(const Tensor& a);

// Exact GELU, x * Phi(x).
Tensor gelu(const Tensor& x);
// n-th derivative of the exact GELU, elementwise. order 0 is gelu itself.
Tensor gelu_derivative(const Tensor& x, int order);

// Reductions and broadcasts.
Tensor sum(const Tensor& a);                        // -> scalar
Tensor expand(const Tensor& s, const Shape& shape);  // scalar -> shape
Tensor sum_rows(const Tensor& x);                    // [m x n] -> [n]
Tensor broadcast_rows(const Tensor& v, std::size_t rows);  // [n] -> [rows x n]
Tensor sum_cols(const Tensor& x);                    // [m x n] -> [m]
Tensor broadcast_cols(const Tensor& v, std::size_t cols);  // [m] -> [m x cols]
Tensor reshape(const Tensor& a, const Shape& shape);

// Row-vector and column-vector conveniences built from the broadcasts.
Tensor add_rowvec(const Tensor& x, const Tensor& v);
Tensor mul_rowvec(const Tensor& x, const Tensor& v);

// op(a) * op(b) where op transposes when the flag is set. Rank-2 operands.
Tensor matmul(const Tensor& a, const Tensor& b, bool transpose_a = false,
              bool transpose_b = false);

// Rectangular block of the matrix view.
Tensor slice(const Tensor& x, std::size_t row0, std::size_t nrows,
             std::size_t col0, std::size_t ncols);
// Places x at (row0, col0) inside a zero matrix of rows x cols.
Tensor pad(const Tensor& x, std::size_t rows, std::size_t cols,
           std::size_t row0, std::size_t col0);
Tensor concat_cols(std::span<const Tensor> parts);
Tensor concat_rows(std::span<const Tensor> parts);

// out[i] = table[index[i]]
Tensor gather_rows(const Tensor& table, std::span<const std::size_t> index);
// out[index[i]] += x[i], out has `rows` rows.
Tensor scatter_rows(const Tensor& x, std::span<const std::size_t> index,
                    std::size_t rows);

Tensor softmax_rowwise(const Tensor& x);
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps);
// Mean over the batch of -log softmax(logits)[label].
Tensor cross_entropy_with_logits(const Tensor& logits,
                                 std::span<const int> labels);

Tensor dot(const Tensor& a, const Tensor& b);

}  // namespace gradleak

#endif  // GRADLEAK_OPS_H_
