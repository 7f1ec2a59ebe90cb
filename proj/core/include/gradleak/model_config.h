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

#ifndef GRADLEAK_MODEL_CONFIG_H_
#define GRADLEAK_MODEL_CONFIG_H_

#include <cstddef>
#include <map>
#include <string>

#include "gradleak/tensor.h"

namespace gradleak {

// Dimensions of the BERT-style encoder classifier.
struct ModelConfig {
  std::size_t num_layers = 2;
  std::size_t hidden_dim = 64;
  std::size_t num_heads = 4;
  std::size_t ffn_dim = 128;
  std::size_t vocab_size = 256;
  std::size_t max_seq_len = 16;
  std::size_t num_classes = 2;
  double layer_norm_eps = 1e-12;

  std::size_t head_dim() const { return hidden_dim / num_heads; }

  // Throws ConfigError on violated invariants.
  void validate() const;

  bool operator==(const ModelConfig&) const = default;

  // The desk-scale reference instance.
  static ModelConfig toy();
  // BERT-base dimensions (vocabulary 30522, 512 positions).
  static ModelConfig bert_base();
};

// Canonical block name -> shape, iterated in lexicographic order.
std::map<std::string, Shape> block_shapes(const ModelConfig& config);

std::string layer_prefix(std::size_t layer);

}  // namespace gradleak

#endif  // GRADLEAK_MODEL_CONFIG_H_
