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

// JSON encodings of the configuration types, used by the experiment config
// file, run manifests and checkpoint headers. Missing fields keep defaults.

#ifndef GRADLEAK_SERIALIZATION_H_
#define GRADLEAK_SERIALIZATION_H_

#include <nlohmann/json.hpp>

#include "gradleak/attack.h"
#include "gradleak/corpus.h"
#include "gradleak/defense.h"
#include "gradleak/model_config.h"
#include "gradleak/training.h"

namespace gradleak {

void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);
void to_json(nlohmann::json& j, const AttackConfig& c);
void from_json(const nlohmann::json& j, AttackConfig& c);
void to_json(nlohmann::json& j, const DpConfig& c);
void from_json(const nlohmann::json& j, DpConfig& c);
void to_json(nlohmann::json& j, const CorpusSpec& c);
void from_json(const nlohmann::json& j, CorpusSpec& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

}  // namespace gradleak

#endif  // GRADLEAK_SERIALIZATION_H_
