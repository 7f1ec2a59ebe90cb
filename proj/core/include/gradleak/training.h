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

#ifndef GRADLEAK_TRAINING_H_
#define GRADLEAK_TRAINING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gradleak/corpus.h"
#include "gradleak/defense.h"
#include "gradleak/model.h"

namespace gradleak {

struct TrainConfig {
  std::size_t epochs = 2;
  double learning_rate = 0.1;
  std::size_t batch_size = 8;
  std::uint64_t seed = 0;
  // When set, every step's gradient goes through dp_transform.
  std::optional<DpConfig> dp;
};

struct UtilityMetrics {
  double accuracy = 0.0;
  double f1 = 0.0;
  double mcc = 0.0;
};

struct TrainResult {
  ParamStore params;
  UtilityMetrics metrics;  // on the held-out set
  std::size_t steps = 0;
};

// Plain mini-batch gradient descent. Batches only group sentences of equal
// length; the last batch of each length per epoch may be short.
TrainResult train(const ParamStore& params, std::span<const Sentence> train_set,
                  std::span<const Sentence> heldout, const TrainConfig& config);

std::vector<int> predict(const ParamStore& params,
                         std::span<const Sentence> sentences);
UtilityMetrics evaluate(const ParamStore& params,
                        std::span<const Sentence> sentences);

}  // namespace gradleak

#endif  // GRADLEAK_TRAINING_H_
