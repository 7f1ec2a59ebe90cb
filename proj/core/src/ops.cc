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

#include "gradleak/ops.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace gradleak {
namespace {

using RowMajor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMap = Eigen::Map<const RowMajor>;
using MutMap = Eigen::Map<RowMajor>;

using Grads = std::vector<Tensor>;

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape())) {
    throw ShapeError(std::string(op) + ": shape mismatch " +
                     a.shape().to_string() + " vs " + b.shape().to_string());
  }
}

Shape matrix_shape(std::size_t rows, std::size_t cols) {
  return Shape{rows, cols};
}

template <typename F>
std::vector<double> map_unary(const Tensor& a, F f) {
  std::vector<double> out(a.numel());
  auto in = a.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(in[i]);
  return out;
}

template <typename F>
std::vector<double> map_binary(const Tensor& a, const Tensor& b, F f) {
  std::vector<double> out(a.numel());
  auto x = a.data();
  auto y = b.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(x[i], y[i]);
  return out;
}

// Probabilists' Hermite polynomial He_n(x).
double hermite(int n, double x) {
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int k = 1; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// k-th derivative of the standard normal CDF; k = 0 is the CDF itself.
double normal_cdf_derivative(int k, double x) {
  if (k == 0) return normal_cdf(x);
  const int m = k - 1;
  const double sign = (m % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite(m, x) * normal_pdf(x);
}

// d^n/dx^n [x * Phi(x)] = x * Phi^(n)(x) + n * Phi^(n-1)(x).
double gelu_nth(int n, double x) {
  if (n == 0) return x * normal_cdf(x);
  return x * normal_cdf_derivative(n, x) + n * normal_cdf_derivative(n - 1, x);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  return Tensor::from_op(
      "add", a.shape(), map_binary(a, b, [](double x, double y) { return x + y; }),
      {a, b},
      [](std::span<const Tensor>, const Tensor&, const Tensor& g,
         const std::vector<bool>& needs) {
        return Grads{needs[0] ? g : Tensor(), needs[1] ? g : Tensor()};
      });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  return Tensor::from_op(
      "sub", a.shape(), map_binary(a, b, [](double x, double y) { return x - y; }),
      {a, b},
      [](std::span<const Tensor>, const Tensor&, const Tensor& g,
         const std::vector<bool>& needs) {
        return Grads{needs[0] ? g : Tensor(), needs[1] ? neg(g) : Tensor()};
      });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  return Tensor::from_op(
      "mul", a.shape(), map_binary(a, b, [](double x, double y) { return x * y; }),
      {a, b},
      [](std::span<const Tensor> in, const Tensor&, const Tensor& g,
         const std::vector<bool>& needs) {
        return Grads{needs[0] ? mul(g, in[1]) : Tensor(),
                     needs[1] ? mul(g, in[0]) : Tensor()};
      });
}

Tensor div(const Tensor& a, const Tensor& b) {
  require_same_shape("div", a, b);
  return Tensor::from_op(
      "div", a.shape(), map_binary(a, b, [](double x, double y) { return x / y; }),
      {a, b},
      [](std::span<const Tensor> in, const Tensor& out, const Tensor& g,
         const std::vector<bool>& needs) {
        return Grads{needs[0] ? div(g, in[1]) : Tensor(),
                     needs[1] ? neg(div(mul(g, out), in[1])) : Tensor()};
      });
}

Tensor neg(const Tensor& a) { return scale(a, -1.0); }

Tensor scale(const Tensor& a, double factor) {
  return Tensor::from_op(
      "scale", a.shape(), map_unary(a, [factor](double x) { return factor * x; }),
      {a},
      [factor](std::span<const Tensor>, const Tensor&, const Tensor& g,
               const std::vector<bool>&) { return Grads{scale(g, factor)}; });
}

Tensor add_scalar(const Tensor& a, double offset) {
  return Tensor::from_op(
      "add_scalar", a.shape(),
      map_unary(a, [offset](double x) { return x + offset; }), {a},
      [](std::span<const Tensor>, const Tensor&, const Tensor& g,
         const std::vector<bool>&) { return Grads{g}; });
}

Tensor exp(const Tensor& a) {
  return Tensor::from_op(
      "exp", a.shape(), map_unary(a, [](double x) { return std::exp(x); }), {a},
      [](std::span<const Tensor>, const Tensor& out, const Tensor& g,
         const std::vector<bool>&) { return Grads{mul(g, out)}; });
}

Tensor log(const Tensor& a) {
  return Tensor::from_op(
      "log", a.shape(), map_unary(a, [](double x) { return std::log(x); }), {a},
      [](std::span<const Tensor> in, const Tensor&, const Tensor& g,
         const std::vector<bool>&) { return Grads{div(g, in[0])}; });
}

Tensor tanh(const Tensor& a) {
  return Tensor::from_op(
      "tanh", a.shape(), map_unary(a, [](double x) { return std::tanh(x); }),
      {a},
      [](std::span<const Tensor>, const Tensor& out, const Tensor& g,
         const std::vector<bool>&) {
        return Grads{mul(g, add_scalar(neg(square(out)), 1.0))};
      });
}

Tensor sqrt(const Tensor& a) {
  return Tensor::from_op(
      "sqrt", a.shape(), map_unary(a, [](double x) { return std::sqrt(x); }),
      {a},
      [](std::span<const Tensor>, const Tensor& out, const Tensor& g,
         const std::vector<bool>&) { return Grads{div(scale(g, 0.5), out)}; });
}

Tensor pow(const Tensor& a, double exponent) {
  return Tensor::from_op(
      "pow", a.shape(),
      map_unary(a, [exponent](double x) { return std::pow(x, exponent); }),
      {a},
      [exponent](std::span<const Tensor> in, const Tensor&, const Tensor& g,
                 const std::vector<bool>&) {
        return Grads{mul(g, scale(pow(in[0], exponent - 1.0), exponent))};
      });
}

Tensor square(const Tensor& a) { return mul(a, a); }

Tensor gelu(const Tensor& x) { return gelu_derivative(x, 0); }

Tensor gelu_derivative(const Tensor& x, int order) {
  if (order < 0) throw UsageError("gelu_derivative: negative order");
  static constexpr const char* kNames[] = {"gelu", "gelu'", "gelu''",
                                           "gelu'''"};
  const char* name = order < 4 ? kNames[order] : "gelu^(n)";
  return Tensor::from_op(
      name, x.shape(), map_unary(x, [order](double v) { return gelu_nth(order, v); }),
      {x},
      [order](std::span<const Tensor> in, const Tensor&, const Tensor& g,
              const std::vector<bool>&) {
        return Grads{mul(g, gelu_derivative(in[0], order + 1))};
      });
}

Tensor sum(const Tensor& a) {
  double total = 0.0;
  for (double v : a.data()) total += v;
  return Tensor::from_op(
      "sum", Shape{}, {total}, {a},
      [](std::span<const Tensor> in, const Tensor&, const Tensor& g,
         const std::vector<bool>&) { return Grads{expand(g, in[0].shape())}; });
}

Tensor expand(const Tensor& s, const Shape& shape) {
  if (s.numel() != 1) throw ShapeError("expand: operand is not a scalar");
  return Tensor::from_op(
      "expand", shape, std::vector<double>(shape.numel(), s.item()), {s},
      [](std::span<const Tensor> in, const Tensor&, const Tensor& g,
         const std::vector<bool>&) {
        return Grads{reshape(sum(g), in[0].shape())};
      });
}

Tensor sum_rows(const Tensor& x) {
  const std::size_t m = x.shape().rows();
  const std::size_t n = x.shape().cols();
  std::vector<double> out(n, 0.0);
  auto in = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) out[j] += in[i * n + j];
  }
  return Tensor::from_op(
      "sum_rows", Shape{n}, std::move(out), {x},
      [m](std::span<const Tensor> in, const Tensor&, const Tensor& g,
          const std::vector<bool>&) {
        return Grads{reshape(broadcast_rows(g, m), in[0].shape())};
      });
}

Tensor broadcast_rows(const Tensor& v, std::size_t rows) {
  const std::size_t n = v.numel();
  std::vector<double> out(rows * n);
  auto in = v.data();
  for (std::size_t i = 0; i < rows; ++i) {
    std::copy(in.begin(), in.end(), out.begin() + i * n);
  }
  return Tensor::from_op(
      "broadcast_rows", matrix_shape(rows, n), std::move(out), {v},
      [](std::span<const Tensor> in, const Tensor&, const Tensor& g,
         const std::vector<bool>&) {
        return Grads{reshape(sum_rows(g), in[0].shape())};
      });
}

Tensor sum_cols(const Tensor& x) {
  const std::size_t m = x.shape().rows();
  const std::size_t n = x.shape().cols();
  std::vector<double> out(m, 0.0);
  auto in = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += in[i * n + j];
    out[i] = acc;
  }
  return Tensor::from_op(
      "sum_cols", Shape{m}, std::move(out), {x},
      [n](std::span<const Tensor> in, const Tensor&, const Tensor& g,
          const std::vector<bool>&) {
        return Grads{reshape(broadcast_cols(g, n), in[0].shape())};
      });
}

Tensor broadcast_cols(const Tensor& v, std::size_t cols) {
  const std::size_t m = v.numel();
  std::vector<double> out(m * cols);
  auto in = v.data();
  for (std::size_t i = 0; i < m; ++i) {
    std::fill_n(out.begin() + i * cols, cols, in[i]);
  }
  return Tensor::from_op(
      "broadcast_cols", matrix_shape(m, cols), std::move(out), {v},
      [](std::span<const Tensor> in, const Tensor&, const Tensor& g,
         const std::vector<bool>&) {
        return Grads{reshape(sum_cols(g), in[0].shape())};
      });
}

Tensor reshape(const Tensor& a, const Shape& shape) {
  if (shape.numel() != a.numel()) {
    throw ShapeError("reshape: " + a.shape().to_string() + " -> " +
                     shape.to_string());
  }
  if (a.shape() == shape) return a;
  return Tensor::from_op(
      "reshape", shape, std::vector<double>(a.data().begin(), a.data().end()),
      {a},
      [](std::span<const Tensor> in, const Tensor&, const Tensor& g,
         const std::vector<bool>&) {
        return Grads{reshape(g, in[0].shape())};
      });
}

Tensor add_rowvec(const Tensor& x, const Tensor& v) {
  if (v.numel() != x.shape().cols()) {
    throw ShapeError("add_rowvec: width mismatch");
  }
  return add(x, reshape(broadcast_rows(v, x.shape().rows()), x.shape()));
}

Tensor mul_rowvec(const Tensor& x, const Tensor& v) {
  if (v.numel() != x.shape().cols()) {
    throw ShapeError("mul_rowvec: width mismatch");
  }
  return mul(x, reshape(broadcast_rows(v, x.shape().rows()), x.shape()));
}

Tensor matmul(const Tensor& a, const Tensor& b, bool transpose_a,
              bool transpose_b) {
  if (a.shape().rank() != 2 || b.shape().rank() != 2) {
    throw ShapeError("matmul: operands must be rank 2, got " +
                     a.shape().to_string() + " and " + b.shape().to_string());
  }
  const std::size_t ar = a.shape()[0], ac = a.shape()[1];
  const std::size_t br = b.shape()[0], bc = b.shape()[1];
  const std::size_t m = transpose_a ? ac : ar;
  const std::size_t k = transpose_a ? ar : ac;
  const std::size_t k2 = transpose_b ? bc : br;
  const std::size_t n = transpose_b ? br : bc;
  if (k != k2) {
    throw ShapeError("matmul: inner dimensions differ, " +
                     a.shape().to_string() + (transpose_a ? "^T" : "") +
                     " * " + b.shape().to_string() + (transpose_b ? "^T" : ""));
  }
  std::vector<double> out(m * n);
  ConstMap A(a.data().data(), ar, ac);
  ConstMap B(b.data().data(), br, bc);
  MutMap C(out.data(), m, n);
  if (!transpose_a && !transpose_b) {
    C.noalias() = A * B;
  } else if (!transpose_a) {
    C.noalias() = A * B.transpose();
  } else if (!transpose_b) {
    C.noalias() = A.transpose() * B;
  } else {
    C.noalias() = A.transpose() * B.transpose();
  }
  return Tensor::from_op(
      "matmul", matrix_shape(m, n), std::move(out), {a, b},
      [transpose_a, transpose_b](std::span<const Tensor> in, const Tensor&,
                                 const Tensor& g,
                                 const std::vector<bool>& needs) {
        const Tensor& A = in[0];
        const Tensor& B = in[1];
        Tensor ga, gb;
        if (!transpose_a && !transpose_b) {
          if (needs[0]) ga = matmul(g, B, false, true);
          if (needs[1]) gb = matmul(A, g, true, false);
        } else if (!transpose_a) {
          if (needs[0]) ga = matmul(g, B, false, false);
          if (needs[1]) gb = matmul(g, A, true, false);
        } else if (!transpose_b) {
          if (needs[0]) ga = matmul(B, g, false, true);
          if (needs[1]) gb = matmul(A, g, false, false);
        } else {
          if (needs[0]) ga = matmul(B, g, true, true);
          if (needs[1]) gb = matmul(g, A, true, true);
        }
        return Grads{ga, gb};
      });
}

Tensor slice(const Tensor& x, std::size_t row0, std::size_t nrows,
             std::size_t col0, std::size_t ncols) {
  const std::size_t m = x.shape().rows();
  const std::size_t n = x.shape().cols();
  if (row0 + nrows > m || col0 + ncols > n) {
    throw ShapeError("slice: block exceeds " + x.shape().to_string());
  }
  std::vector<double> out(nrows * ncols);
  auto in = x.data();
  for (std::size_t i = 0; i < nrows; ++i) {
    std::copy_n(in.begin() + (row0 + i) * n + col0, ncols,
                out.begin() + i * ncols);
  }
  return Tensor::from_op(
      "slice", matrix_shape(nrows, ncols), std::move(out), {x},
      [m, n, row0, col0](std::span<const Tensor> in, const Tensor&,
                         const Tensor& g, const std::vector<bool>&) {
        return Grads{reshape(pad(g, m, n, row0, col0), in[0].shape())};
      });
}

Tensor pad(const Tensor& x, std::size_t rows, std::size_t cols,
           std::size_t row0, std::size_t col0) {
  const std::size_t m = x.shape().rows();
  const std::size_t n = x.shape().cols();
  if (row0 + m > rows || col0 + n > cols) {
    throw ShapeError("pad: block does not fit");
  }
  std::vector<double> out(rows * cols, 0.0);
  auto in = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    std::copy_n(in.begin() + i * n, n, out.begin() + (row0 + i) * cols + col0);
  }
  return Tensor::from_op(
      "pad", matrix_shape(rows, cols), std::move(out), {x},
      [m, n, row0, col0](std::span<const Tensor> in, const Tensor&,
                         const Tensor& g, const std::vector<bool>&) {
        return Grads{reshape(slice(g, row0, m, col0, n), in[0].shape())};
      });
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_cols: no operands");
  const std::size_t m = parts[0].shape().rows();
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  for (const Tensor& p : parts) {
    if (p.shape().rows() != m) throw ShapeError("concat_cols: row mismatch");
    offsets.push_back(total);
    total += p.shape().cols();
  }
  std::vector<double> out(m * total);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const std::size_t n = parts[k].shape().cols();
    auto in = parts[k].data();
    for (std::size_t i = 0; i < m; ++i) {
      std::copy_n(in.begin() + i * n, n, out.begin() + i * total + offsets[k]);
    }
  }
  return Tensor::from_op(
      "concat_cols", matrix_shape(m, total), std::move(out),
      std::vector<Tensor>(parts.begin(), parts.end()),
      [m, offsets](std::span<const Tensor> in, const Tensor&, const Tensor& g,
                   const std::vector<bool>& needs) {
        Grads grads(in.size());
        for (std::size_t k = 0; k < in.size(); ++k) {
          if (!needs[k]) continue;
          grads[k] = reshape(slice(g, 0, m, offsets[k], in[k].shape().cols()),
                             in[k].shape());
        }
        return grads;
      });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no operands");
  const std::size_t n = parts[0].shape().cols();
  std::vector<std::size_t> offsets;
  std::size_t total = 0;
  std::vector<double> out;
  for (const Tensor& p : parts) {
    if (p.shape().cols() != n) throw ShapeError("concat_rows: column mismatch");
    offsets.push_back(total);
    total += p.shape().rows();
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  return Tensor::from_op(
      "concat_rows", matrix_shape(total, n), std::move(out),
      std::vector<Tensor>(parts.begin(), parts.end()),
      [n, offsets](std::span<const Tensor> in, const Tensor&, const Tensor& g,
                   const std::vector<bool>& needs) {
        Grads grads(in.size());
        for (std::size_t k = 0; k < in.size(); ++k) {
          if (!needs[k]) continue;
          grads[k] = reshape(slice(g, offsets[k], in[k].shape().rows(), 0, n),
                             in[k].shape());
        }
        return grads;
      });
}

Tensor gather_rows(const Tensor& table, std::span<const std::size_t> index) {
  const std::size_t rows = table.shape().rows();
  const std::size_t n = table.shape().cols();
  std::vector<double> out(index.size() * n);
  auto in = table.data();
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= rows) {
      throw InputError("gather_rows: index " + std::to_string(index[i]) +
                       " out of range for " + std::to_string(rows) + " rows");
    }
    std::copy_n(in.begin() + index[i] * n, n, out.begin() + i * n);
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return Tensor::from_op(
      "gather_rows", matrix_shape(index.size(), n), std::move(out), {table},
      [idx, rows](std::span<const Tensor> in, const Tensor&, const Tensor& g,
                  const std::vector<bool>&) {
        return Grads{reshape(scatter_rows(g, idx, rows), in[0].shape())};
      });
}

Tensor scatter_rows(const Tensor& x, std::span<const std::size_t> index,
                    std::size_t rows) {
  const std::size_t n = x.shape().cols();
  if (index.size() != x.shape().rows()) {
    throw ShapeError("scatter_rows: index length does not match rows");
  }
  std::vector<double> out(rows * n, 0.0);
  auto in = x.data();
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] >= rows) throw InputError("scatter_rows: index out of range");
    for (std::size_t j = 0; j < n; ++j) out[index[i] * n + j] += in[i * n + j];
  }
  std::vector<std::size_t> idx(index.begin(), index.end());
  return Tensor::from_op(
      "scatter_rows", matrix_shape(rows, n), std::move(out), {x},
      [idx](std::span<const Tensor> in, const Tensor&, const Tensor& g,
            const std::vector<bool>&) {
        return Grads{reshape(gather_rows(g, idx), in[0].shape())};
      });
}

Tensor softmax_rowwise(const Tensor& x) {
  const std::size_t m = x.shape().rows();
  const std::size_t n = x.shape().cols();
  if (n == 0) throw ShapeError("softmax_rowwise: empty rows");
  std::vector<double> out(m * n);
  auto in = x.data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = in.data() + i * n;
    const double mx = *std::max_element(row, row + n);
    double z = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      out[i * n + j] = std::exp(row[j] - mx);
      z += out[i * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] /= z;
  }
  return Tensor::from_op(
      "softmax", x.shape(), std::move(out), {x},
      [n](std::span<const Tensor>, const Tensor& y, const Tensor& g,
          const std::vector<bool>&) {
        // dx = y * (g - rowsum(g * y))
        Tensor inner = reshape(broadcast_cols(sum_cols(mul(g, y)), n), y.shape());
        return Grads{mul(y, sub(g, inner))};
      });
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps) {
  const std::size_t d = x.shape().cols();
  const std::size_t m = x.shape().rows();
  if (d < 2) throw ConfigError("layer_norm: normalized width must be >= 2");
  if (!(eps > 0.0)) throw ConfigError("layer_norm: eps must be positive");
  if (gamma.numel() != d || beta.numel() != d) {
    throw ShapeError("layer_norm: gamma/beta width mismatch");
  }
  const Tensor x2 = reshape(x, Shape{m, d});
  const Tensor mean = scale(sum_cols(x2), 1.0 / static_cast<double>(d));
  const Tensor centered = sub(x2, broadcast_cols(mean, d));
  const Tensor var = scale(sum_cols(square(centered)), 1.0 / static_cast<double>(d));
  const Tensor inv_std = pow(add_scalar(var, eps), -0.5);
  const Tensor normalized = mul(centered, broadcast_cols(inv_std, d));
  const Tensor y = add_rowvec(mul_rowvec(normalized, gamma), beta);
  return reshape(y, x.shape());
}

Tensor cross_entropy_with_logits(const Tensor& logits,
                                 std::span<const int> labels) {
  const std::size_t b = logits.shape().rows();
  const std::size_t k = logits.shape().cols();
  if (labels.size() != b) {
    throw InputError("cross_entropy: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(b) + " rows");
  }
  std::vector<double> onehot(b * k, 0.0);
  std::vector<double> shift(b * k);
  auto in = logits.data();
  for (std::size_t i = 0; i < b; ++i) {
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k) {
      throw InputError("cross_entropy: label " + std::to_string(labels[i]) +
                       " outside [0, " + std::to_string(k) + ")");
    }
    onehot[i * k + labels[i]] = 1.0;
    const double mx = *std::max_element(in.begin() + i * k, in.begin() + (i + 1) * k);
    std::fill_n(shift.begin() + i * k, k, -mx);
  }
  const Shape shape{b, k};
  // Max-shift is a constant, so it does not change any derivative.
  const Tensor z = add(reshape(logits, shape), Tensor::constant(shape, std::move(shift)));
  const Tensor lse = log(sum_cols(exp(z)));
  const Tensor log_probs = sub(z, broadcast_cols(lse, k));
  const Tensor picked = sum(mul(log_probs, Tensor::constant(shape, std::move(onehot))));
  return scale(picked, -1.0 / static_cast<double>(b));
}

Tensor dot(const Tensor& a, const Tensor& b) { return sum(mul(a, b)); }

}  // namespace gradleak
