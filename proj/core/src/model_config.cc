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

#include "gradleak/model_config.h"

#include <string>

namespace gradleak {

void ModelConfig::validate() const {
  if (num_layers < 1 || hidden_dim < 1 || num_heads < 1 || ffn_dim < 1 ||
      vocab_size < 1 || max_seq_len < 1 || num_classes < 1) {
    throw ConfigError("model dimensions must all be >= 1");
  }
  if (hidden_dim % num_heads != 0) {
    throw ConfigError("hidden_dim " + std::to_string(hidden_dim) +
                      " is not divisible by num_heads " +
                      std::to_string(num_heads));
  }
  if (!(layer_norm_eps > 0.0)) {
    throw ConfigError("layer_norm_eps must be positive");
  }
}

ModelConfig ModelConfig::toy() { return ModelConfig{}; }

ModelConfig ModelConfig::bert_base() {
  ModelConfig c;
  c.num_layers = 12;
  c.hidden_dim = 768;
  c.num_heads = 12;
  c.ffn_dim = 3072;
  c.vocab_size = 30522;
  c.max_seq_len = 512;
  c.num_classes = 2;
  return c;
}

std::string layer_prefix(std::size_t layer) {
  return "layer." + std::to_string(layer) + ".";
}

std::map<std::string, Shape> block_shapes(const ModelConfig& c) {
  const std::size_t d = c.hidden_dim;
  std::map<std::string, Shape> shapes;
  shapes["embed.word"] = Shape{c.vocab_size, d};
  shapes["embed.pos"] = Shape{c.max_seq_len, d};
  shapes["embed.ln.gamma"] = Shape{d};
  shapes["embed.ln.beta"] = Shape{d};
  for (std::size_t i = 0; i < c.num_layers; ++i) {
    const std::string p = layer_prefix(i);
    for (const char* m : {"q", "k", "v", "o"}) {
      shapes[p + "attn." + m + ".weight"] = Shape{d, d};
      shapes[p + "attn." + m + ".bias"] = Shape{d};
    }
    shapes[p + "attn.ln.gamma"] = Shape{d};
    shapes[p + "attn.ln.beta"] = Shape{d};
    shapes[p + "ffn.f.weight"] = Shape{d, c.ffn_dim};
    shapes[p + "ffn.f.bias"] = Shape{c.ffn_dim};
    shapes[p + "ffn.p.weight"] = Shape{c.ffn_dim, d};
    shapes[p + "ffn.p.bias"] = Shape{d};
    shapes[p + "ffn.ln.gamma"] = Shape{d};
    shapes[p + "ffn.ln.beta"] = Shape{d};
  }
  shapes["cls.pool.weight"] = Shape{d, d};
  shapes["cls.pool.bias"] = Shape{d};
  shapes["cls.out.weight"] = Shape{d, c.num_classes};
  shapes["cls.out.bias"] = Shape{c.num_classes};
  return shapes;
}

}  // namespace gradleak
