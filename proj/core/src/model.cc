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

#include "gradleak/model.h"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "gradleak/ops.h"

namespace gradleak {
namespace {

constexpr double kInitStd = 0.02;

// Standard deviation of N(0, 1) restricted to [-2, 2].
double truncated_unit_std() {
  const double mass = std::erf(2.0 / std::numbers::sqrt2);
  const double density = std::exp(-2.0) / std::sqrt(2.0 * std::numbers::pi);
  return std::sqrt(1.0 - 4.0 * density / mass);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Tensor linear(const Tensor& x, const ParamStore& params,
              const std::string& name) {
  return add_rowvec(matmul(x, params.at(name + ".weight")),
                    params.at(name + ".bias"));
}

Tensor norm(const Tensor& x, const ParamStore& params, const std::string& name,
            double eps) {
  return layer_norm(x, params.at(name + ".gamma"), params.at(name + ".beta"),
                    eps);
}

// Multi-head self-attention over rows [B*T x d] without masking.
Tensor self_attention(const Tensor& h, const ParamStore& params,
                      const std::string& prefix, std::size_t batch,
                      std::size_t length) {
  const ModelConfig& c = params.config;
  const std::size_t dh = c.head_dim();
  const Tensor q = linear(h, params, prefix + "attn.q");
  const Tensor k = linear(h, params, prefix + "attn.k");
  const Tensor v = linear(h, params, prefix + "attn.v");
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<Tensor> rows;
  rows.reserve(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    std::vector<Tensor> heads;
    heads.reserve(c.num_heads);
    for (std::size_t hd = 0; hd < c.num_heads; ++hd) {
      const Tensor qs = slice(q, b * length, length, hd * dh, dh);
      const Tensor ks = slice(k, b * length, length, hd * dh, dh);
      const Tensor vs = slice(v, b * length, length, hd * dh, dh);
      const Tensor probs =
          softmax_rowwise(scale(matmul(qs, ks, false, true), inv_scale));
      heads.push_back(matmul(probs, vs));
    }
    rows.push_back(c.num_heads == 1 ? heads.front() : concat_cols(heads));
  }
  const Tensor context = batch == 1 ? rows.front() : concat_rows(rows);
  return linear(context, params, prefix + "attn.o");
}

Tensor encode(const ParamStore& params, const Tensor& word_rows,
              std::size_t batch, std::size_t length) {
  const ModelConfig& c = params.config;
  if (length > c.max_seq_len) {
    throw InputError("sequence length " + std::to_string(length) +
                     " exceeds max_seq_len " + std::to_string(c.max_seq_len));
  }
  std::vector<std::size_t> positions(batch * length);
  for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i % length;
  const Tensor pos = gather_rows(params.at("embed.pos"), positions);
  Tensor h = norm(add(word_rows, pos), params, "embed.ln", c.layer_norm_eps);
  for (std::size_t i = 0; i < c.num_layers; ++i) {
    const std::string p = layer_prefix(i);
    const Tensor attn = self_attention(h, params, p, batch, length);
    h = norm(add(h, attn), params, p + "attn.ln", c.layer_norm_eps);
    const Tensor inner = gelu(linear(h, params, p + "ffn.f"));
    h = norm(add(h, linear(inner, params, p + "ffn.p")), params, p + "ffn.ln",
             c.layer_norm_eps);
  }
  std::vector<std::size_t> first(batch);
  for (std::size_t b = 0; b < batch; ++b) first[b] = b * length;
  const Tensor pooled = tanh(linear(gather_rows(h, first), params, "cls.pool"));
  return linear(pooled, params, "cls.out");
}

void check_batch(const ParamStore& params, const TokenBatch& input) {
  if (input.batch == 0 || input.length == 0 ||
      input.ids.size() != input.batch * input.length) {
    throw InputError("token batch is empty or ragged");
  }
  for (int id : input.ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= params.config.vocab_size) {
      throw InputError("token id " + std::to_string(id) +
                       " outside vocabulary of size " +
                       std::to_string(params.config.vocab_size));
    }
  }
}

}  // namespace

const Tensor& ParamStore::at(const std::string& name) const {
  auto it = blocks.find(name);
  if (it == blocks.end()) throw UsageError("no parameter block '" + name + "'");
  return it->second;
}

const Tensor& GradStore::at(const std::string& name) const {
  auto it = blocks.find(name);
  if (it == blocks.end()) throw UsageError("no gradient block '" + name + "'");
  return it->second;
}

std::vector<double> GradStore::flatten() const {
  std::vector<double> flat;
  for (const auto& [name, t] : blocks) {
    flat.insert(flat.end(), t.data().begin(), t.data().end());
  }
  return flat;
}

TokenBatch TokenBatch::from_rows(const std::vector<std::vector<int>>& rows) {
  TokenBatch batch;
  batch.batch = rows.size();
  batch.length = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != batch.length) {
      throw InputError("sequences in one batch must have equal length");
    }
    batch.ids.insert(batch.ids.end(), r.begin(), r.end());
  }
  return batch;
}

std::vector<int> TokenBatch::row(std::size_t b) const {
  return {ids.begin() + static_cast<std::ptrdiff_t>(b * length),
          ids.begin() + static_cast<std::ptrdiff_t>((b + 1) * length)};
}

ParamStore init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  // Truncation shrinks the spread; rescale so weights keep std kInitStd.
  const double unit = kInitStd / truncated_unit_std();
  ParamStore params;
  params.config = config;
  for (const auto& [name, shape] : block_shapes(config)) {
    std::vector<double> values(shape.numel(), 0.0);
    if (ends_with(name, ".gamma")) {
      std::fill(values.begin(), values.end(), 1.0);
    } else if (ends_with(name, ".weight") || name == "embed.word" ||
               name == "embed.pos") {
      for (double& v : values) {
        double z = normal(rng);
        while (std::abs(z) > 2.0) z = normal(rng);
        v = unit * z;
      }
    }
    params.blocks.emplace(name, Tensor::variable(shape, std::move(values)));
  }
  return params;
}

Tensor lookup_embeddings(const ParamStore& params, const TokenBatch& input) {
  check_batch(params, input);
  std::vector<std::size_t> ids(input.ids.begin(), input.ids.end());
  return reshape(gather_rows(params.at("embed.word"), ids),
                 Shape{input.batch, input.length, params.config.hidden_dim});
}

Tensor forward(const ParamStore& params, const TokenBatch& input) {
  check_batch(params, input);
  std::vector<std::size_t> ids(input.ids.begin(), input.ids.end());
  return encode(params, gather_rows(params.at("embed.word"), ids), input.batch,
                input.length);
}

Tensor forward(const ParamStore& params, const Tensor& embeddings) {
  const Shape& s = embeddings.shape();
  if (s.rank() != 3 || s[2] != params.config.hidden_dim) {
    throw ShapeError("embedding input must be [B x T x d], got " +
                     s.to_string());
  }
  return encode(params, reshape(embeddings, Shape{s[0] * s[1], s[2]}), s[0],
                s[1]);
}

GradStore victim_gradients(const ParamStore& params, const TokenBatch& batch,
                           std::span<const int> labels) {
  const Tensor loss = cross_entropy_with_logits(forward(params, batch), labels);
  std::vector<Tensor> wrt;
  std::vector<std::string> names;
  for (const auto& [name, t] : params.blocks) {
    names.push_back(name);
    wrt.push_back(t);
  }
  std::vector<Tensor> grads = grad(loss, wrt, false, /*allow_unused=*/true);
  GradStore store;
  for (std::size_t i = 0; i < names.size(); ++i) {
    store.blocks.emplace(names[i], std::move(grads[i]));
  }
  return store;
}

std::vector<Tensor> embedding_input_gradients(
    const ParamStore& params, const Tensor& embeddings,
    std::span<const int> labels, std::span<const std::string> names,
    bool create_graph) {
  const Tensor loss =
      cross_entropy_with_logits(forward(params, embeddings), labels);
  std::vector<Tensor> wrt;
  wrt.reserve(names.size());
  for (const auto& n : names) wrt.push_back(params.at(n));
  return grad(loss, wrt, create_graph);
}

ParamCount count_params(const ModelConfig& config, const ModuleKey& key) {
  const auto shapes = block_shapes(config);
  std::size_t total = 0;
  for (const auto& [name, shape] : shapes) total += shape.numel();
  ParamCount result;
  for (const auto& name : blocks_for_key(key, config)) {
    result.count += shapes.at(name).numel();
  }
  result.ratio = static_cast<double>(result.count) / static_cast<double>(total);
  return result;
}

}  // namespace gradleak
