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

#ifndef GRADLEAK_MODULE_KEY_H_
#define GRADLEAK_MODULE_KEY_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gradleak/model_config.h"

namespace gradleak {

// Gradient granularities. The first six are single linear projections inside
// one encoder layer: attention query/key/value/output and the FFN's fully
// connected and output projections.
enum class Part {
  kQuery,
  kKey,
  kValue,
  kAttnOutput,
  kFfnFc,
  kFfnOut,
  kLayer,
  kAllTransformer,
  kEmbeddings,
  kClassifier,
  kAll,
};

struct ModuleKey {
  Part part = Part::kAll;
  std::optional<std::size_t> layer;

  bool is_linear() const;
  bool needs_layer() const;

  // Checks the index rule and, when given, the layer bound of config.
  void validate(const ModelConfig* config = nullptr) const;

  // Grammar part[@index], e.g. "q@1", "layer@0", "transformer", "all".
  static ModuleKey parse(std::string_view text);
  std::string to_string() const;

  bool operator==(const ModuleKey&) const = default;
};

// Canonical block names the key covers, in lexicographic order. Linear keys
// cover the weight matrix only.
std::vector<std::string> blocks_for_key(const ModuleKey& key,
                                        const ModelConfig& config);

}  // namespace gradleak

#endif  // GRADLEAK_MODULE_KEY_H_
