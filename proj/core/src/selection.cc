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

#include "gradleak/selection.h"

#include <set>

#include "gradleak/ops.h"

namespace gradleak {

Selection Selection::single(const ModuleKey& key, double weight) {
  return Selection{{key}, {weight}};
}

Selection Selection::parse(std::string_view text) {
  Selection s;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto plus = text.find('+', start);
    const auto end = plus == std::string_view::npos ? text.size() : plus;
    s.keys.push_back(ModuleKey::parse(text.substr(start, end - start)));
    s.weights.push_back(1.0);
    if (plus == std::string_view::npos) break;
    start = plus + 1;
  }
  return s;
}

Selection Selection::baseline(const ModelConfig& config) {
  return single(ModuleKey{Part::kAll, std::nullopt},
                1.0 / static_cast<double>(config.num_layers));
}

std::string Selection::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < keys.size(); ++i) {
    if (i) s += '+';
    s += keys[i].to_string();
  }
  return s;
}

void Selection::validate(const ModelConfig& config) const {
  if (keys.empty()) throw UsageError("selection has no module keys");
  if (weights.size() != keys.size()) {
    throw UsageError("selection needs one weight per key");
  }
  for (double w : weights) {
    if (!(w > 0.0)) throw UsageError("selection weights must be positive");
  }
  for (const auto& k : keys) k.validate(&config);
}

std::vector<std::string> GradientView::names() const {
  std::vector<std::string> out;
  for (const auto& b : blocks) out.push_back(b.name);
  return out;
}

bool GradientView::contains(const std::string& name) const {
  for (const auto& b : blocks) {
    if (b.name == name) return true;
  }
  return false;
}

const ViewBlock& GradientView::at(const std::string& name) const {
  for (const auto& b : blocks) {
    if (b.name == name) return b;
  }
  throw UsageError("gradient view has no block '" + name + "'");
}

GradientView resolve(const Selection& selection, const GradStore& grads,
                     const ModelConfig& config) {
  selection.validate(config);
  GradientView view;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < selection.keys.size(); ++i) {
    for (auto& name : blocks_for_key(selection.keys[i], config)) {
      if (!seen.insert(name).second) {
        throw UsageError("block '" + name + "' is covered twice by selection " +
                         selection.to_string());
      }
      view.blocks.push_back({name, grads.at(name), selection.weights[i]});
    }
  }
  return view;
}

double used_ratio(const Selection& selection, const ModelConfig& config) {
  selection.validate(config);
  double ratio = 0.0;
  for (const auto& key : selection.keys) ratio += count_params(config, key).ratio;
  return ratio;
}

GradientView scaled(const GradientView& view, double factor) {
  GradientView out = view;
  for (auto& b : out.blocks) b.grad = scale(b.grad.detach(), factor);
  return out;
}

}  // namespace gradleak
