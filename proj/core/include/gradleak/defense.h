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

#ifndef GRADLEAK_DEFENSE_H_
#define GRADLEAK_DEFENSE_H_

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "gradleak/model.h"

namespace gradleak {

// DP-SGD knobs. clip_bound = infinity disables clipping.
struct DpConfig {
  static constexpr double kNoClip = std::numeric_limits<double>::infinity();

  double clip_bound = 1.0;
  double noise_multiplier = 0.0;
  double delta = 2e-5;
  std::uint64_t seed = 0;

  void validate() const;
};

// Clips each example's full gradient to global l2 norm clip_bound, averages,
// and adds N(0, (sigma * C / B)^2) noise per coordinate drawn from rng in
// block order.
GradStore dp_transform(std::span<const GradStore> per_example,
                       const DpConfig& dp, std::mt19937_64& rng);

// Per-example victim gradients passed through dp_transform with a generator
// seeded from dp.seed.
GradStore defended_victim_gradients(const ParamStore& params,
                                    const TokenBatch& batch,
                                    std::span<const int> labels,
                                    const DpConfig& dp);

}  // namespace gradleak

#endif  // GRADLEAK_DEFENSE_H_
