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

#include "gradleak/module_key.h"

#include <array>
#include <charconv>
#include <string>
#include <utility>

namespace gradleak {
namespace {

struct PartName {
  Part part;
  std::string_view name;
};

constexpr std::array<PartName, 11> kPartNames = {{
    {Part::kQuery, "q"},
    {Part::kKey, "k"},
    {Part::kValue, "v"},
    {Part::kAttnOutput, "o"},
    {Part::kFfnFc, "f"},
    {Part::kFfnOut, "p"},
    {Part::kLayer, "layer"},
    {Part::kAllTransformer, "transformer"},
    {Part::kEmbeddings, "embeddings"},
    {Part::kClassifier, "classifier"},
    {Part::kAll, "all"},
}};

std::string_view part_name(Part part) {
  for (const auto& p : kPartNames) {
    if (p.part == part) return p.name;
  }
  return "?";
}

std::string linear_block(Part part, std::size_t layer) {
  const std::string p = layer_prefix(layer);
  switch (part) {
    case Part::kQuery:
      return p + "attn.q.weight";
    case Part::kKey:
      return p + "attn.k.weight";
    case Part::kValue:
      return p + "attn.v.weight";
    case Part::kAttnOutput:
      return p + "attn.o.weight";
    case Part::kFfnFc:
      return p + "ffn.f.weight";
    case Part::kFfnOut:
      return p + "ffn.p.weight";
    default:
      throw UsageError("not a linear part");
  }
}

bool starts_with(const std::string& s, const std::string& prefix) {
  return s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

bool ModuleKey::is_linear() const {
  switch (part) {
    case Part::kQuery:
    case Part::kKey:
    case Part::kValue:
    case Part::kAttnOutput:
    case Part::kFfnFc:
    case Part::kFfnOut:
      return true;
    default:
      return false;
  }
}

bool ModuleKey::needs_layer() const {
  return is_linear() || part == Part::kLayer;
}

void ModuleKey::validate(const ModelConfig* config) const {
  if (needs_layer() && !layer) {
    throw UsageError("module key '" + std::string(part_name(part)) +
                     "' requires a layer index");
  }
  if (!needs_layer() && layer) {
    throw UsageError("module key '" + std::string(part_name(part)) +
                     "' does not take a layer index");
  }
  if (config && layer && *layer >= config->num_layers) {
    throw UsageError("layer index " + std::to_string(*layer) +
                     " out of range for a " +
                     std::to_string(config->num_layers) + "-layer model");
  }
}

ModuleKey ModuleKey::parse(std::string_view text) {
  const auto at = text.find('@');
  const std::string_view name = text.substr(0, at);
  ModuleKey key;
  bool found = false;
  for (const auto& p : kPartNames) {
    if (p.name == name) {
      key.part = p.part;
      found = true;
    }
  }
  if (!found) {
    throw UsageError("unknown module key '" + std::string(text) + "'");
  }
  if (at != std::string_view::npos) {
    const std::string_view digits = text.substr(at + 1);
    std::size_t index = 0;
    auto [ptr, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (digits.empty() || ec != std::errc() ||
        ptr != digits.data() + digits.size()) {
      throw UsageError("bad layer index in module key '" + std::string(text) +
                       "'");
    }
    key.layer = index;
  }
  key.validate();
  return key;
}

std::string ModuleKey::to_string() const {
  std::string s(part_name(part));
  if (layer) s += "@" + std::to_string(*layer);
  return s;
}

std::vector<std::string> blocks_for_key(const ModuleKey& key,
                                        const ModelConfig& config) {
  key.validate(&config);
  if (key.is_linear()) return {linear_block(key.part, *key.layer)};
  std::vector<std::string> names;
  for (const auto& [name, shape] : block_shapes(config)) {
    bool take = false;
    switch (key.part) {
      case Part::kLayer:
        take = starts_with(name, layer_prefix(*key.layer));
        break;
      case Part::kAllTransformer:
        take = starts_with(name, "layer.");
        break;
      case Part::kEmbeddings:
        take = starts_with(name, "embed.");
        break;
      case Part::kClassifier:
        take = starts_with(name, "cls.");
        break;
      case Part::kAll:
        take = true;
        break;
      default:
        break;
    }
    if (take) names.push_back(name);
  }
  return names;
}

}  // namespace gradleak
