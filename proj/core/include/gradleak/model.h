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

#ifndef GRADLEAK_MODEL_H_
#define GRADLEAK_MODEL_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gradleak/model_config.h"
#include "gradleak/module_key.h"
#include "gradleak/tensor.h"

namespace gradleak {

using BlockMap = std::map<std::string, Tensor>;

// Model weights by canonical block name. Blocks are leaf tensors that require
// gradients; the store is never mutated after construction, so one instance
// can be shared read-only across threads.
struct ParamStore {
  ModelConfig config;
  BlockMap blocks;

  const Tensor& at(const std::string& name) const;
};

// Gradients of the victim loss, keyed like ParamStore.
struct GradStore {
  BlockMap blocks;

  const Tensor& at(const std::string& name) const;
  // Flattened values in block order.
  std::vector<double> flatten() const;
};

// Token ids of B sequences of equal length T, row-major.
struct TokenBatch {
  std::size_t batch = 0;
  std::size_t length = 0;
  std::vector<int> ids;

  static TokenBatch from_rows(const std::vector<std::vector<int>>& rows);
  std::vector<int> row(std::size_t b) const;
};

// Weights and embeddings: a normal truncated at two standard deviations,
// rescaled to standard deviation 0.02. Biases and LayerNorm betas zero;
// LayerNorm gammas one.
ParamStore init_params(const ModelConfig& config, std::uint64_t seed);

// Logits [B x K] from token ids.
Tensor forward(const ParamStore& params, const TokenBatch& input);
// Logits [B x K] from word embeddings [B x T x d] (position embeddings are
// still added inside).
Tensor forward(const ParamStore& params, const Tensor& embeddings);

// Word-embedding rows of the batch, shaped [B x T x d].
Tensor lookup_embeddings(const ParamStore& params, const TokenBatch& input);

// Gradient of the mean cross-entropy of the batch w.r.t. every block.
GradStore victim_gradients(const ParamStore& params, const TokenBatch& batch,
                           std::span<const int> labels);

// Gradients of the mean cross-entropy w.r.t. the named blocks when the model
// is fed continuous embeddings. `embed.word` is not reachable in this mode.
// With create_graph the results can be differentiated w.r.t. embeddings.
std::vector<Tensor> embedding_input_gradients(
    const ParamStore& params, const Tensor& embeddings,
    std::span<const int> labels, std::span<const std::string> names,
    bool create_graph);

struct ParamCount {
  std::size_t count = 0;
  double ratio = 0.0;  // of count_params(all)
};

// Linear keys count the weight matrix only; coarser keys count every block.
ParamCount count_params(const ModelConfig& config, const ModuleKey& key);

}  // namespace gradleak

#endif  // GRADLEAK_MODEL_H_
