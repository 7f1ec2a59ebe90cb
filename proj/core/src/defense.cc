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

#include "gradleak/defense.h"

#include <cmath>
#include <string>

namespace gradleak {

void DpConfig::validate() const {
  if (!(clip_bound > 0.0)) throw ConfigError("clip bound must be positive");
  if (!(noise_multiplier >= 0.0) || std::isinf(noise_multiplier)) {
    throw ConfigError("noise multiplier must be finite and >= 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (std::isinf(clip_bound) && noise_multiplier > 0.0) {
    throw ConfigError("noise needs a finite clip bound");
  }
}

GradStore dp_transform(std::span<const GradStore> per_example,
                       const DpConfig& dp, std::mt19937_64& rng) {
  dp.validate();
  if (per_example.empty()) {
    throw InputError("dp_transform needs at least one example gradient");
  }
  const GradStore& first = per_example.front();
  std::vector<double> acc;
  for (const GradStore& g : per_example) {
    if (g.blocks.size() != first.blocks.size()) {
      throw InputError("per-example gradients have different block sets");
    }
    std::vector<double> flat;
    auto it = first.blocks.begin();
    for (const auto& [name, t] : g.blocks) {
      if (name != it->first || !(t.shape() == it->second.shape())) {
        throw InputError("per-example gradients have different block sets");
      }
      flat.insert(flat.end(), t.data().begin(), t.data().end());
      ++it;
    }
    double norm_sq = 0.0;
    for (double v : flat) norm_sq += v * v;
    const double norm = std::sqrt(norm_sq);
    double factor = 1.0;
    if (!std::isinf(dp.clip_bound) && norm > dp.clip_bound) {
      factor = dp.clip_bound / norm;
    }
    if (acc.empty()) acc.assign(flat.size(), 0.0);
    for (std::size_t i = 0; i < flat.size(); ++i) acc[i] += factor * flat[i];
  }
  const double b = static_cast<double>(per_example.size());
  const double noise_std =
      dp.noise_multiplier > 0.0 ? dp.noise_multiplier * dp.clip_bound / b : 0.0;
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : acc) {
    v /= b;
    if (noise_std > 0.0) v += noise_std * normal(rng);
  }

  GradStore out;
  std::size_t offset = 0;
  for (const auto& [name, t] : first.blocks) {
    const std::size_t n = t.numel();
    out.blocks.emplace(
        name, Tensor::constant(t.shape(),
                               std::vector<double>(acc.begin() + offset,
                                                   acc.begin() + offset + n)));
    offset += n;
  }
  return out;
}

GradStore defended_victim_gradients(const ParamStore& params,
                                    const TokenBatch& batch,
                                    std::span<const int> labels,
                                    const DpConfig& dp) {
  if (labels.size() != batch.batch) {
    throw InputError("need one label per sequence");
  }
  std::vector<GradStore> per_example;
  per_example.reserve(batch.batch);
  for (std::size_t b = 0; b < batch.batch; ++b) {
    const TokenBatch one = TokenBatch::from_rows({batch.row(b)});
    per_example.push_back(victim_gradients(params, one, labels.subspan(b, 1)));
  }
  std::mt19937_64 rng(dp.seed);
  return dp_transform(per_example, dp, rng);
}

}  // namespace gradleak
