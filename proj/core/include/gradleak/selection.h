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

#ifndef GRADLEAK_SELECTION_H_
#define GRADLEAK_SELECTION_H_

#include <string>
#include <string_view>
#include <vector>

#include "gradleak/model.h"
#include "gradleak/module_key.h"

namespace gradleak {

// The gradient subset an attacker observes, with one positive weight per key.
struct Selection {
  std::vector<ModuleKey> keys;
  std::vector<double> weights;

  static Selection single(const ModuleKey& key, double weight = 1.0);
  // Keys joined with '+', e.g. "q@1+k@1". Every weight is 1.
  static Selection parse(std::string_view text);
  // Full gradient with each term weighted 1/l.
  static Selection baseline(const ModelConfig& config);

  std::string to_string() const;
  void validate(const ModelConfig& config) const;
};

struct ViewBlock {
  std::string name;
  Tensor grad;
  double weight = 1.0;
};

// Resolved blocks in selection order, lexicographic within a key.
struct GradientView {
  std::vector<ViewBlock> blocks;

  std::vector<std::string> names() const;
  bool contains(const std::string& name) const;
  const ViewBlock& at(const std::string& name) const;
};

// Throws UsageError when two keys cover the same block or an index is out of
// range for config.
GradientView resolve(const Selection& selection, const GradStore& grads,
                     const ModelConfig& config);

// Parameters covered by the selection over count_params(all).
double used_ratio(const Selection& selection, const ModelConfig& config);

// Every block multiplied by factor.
GradientView scaled(const GradientView& view, double factor);

}  // namespace gradleak

#endif  // GRADLEAK_SELECTION_H_
