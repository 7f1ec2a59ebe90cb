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

#include "gradleak/serialization.h"

#include <cmath>

namespace gradleak {
namespace {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) j.at(key).get_to(field);
}

}  // namespace

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"num_layers", c.num_layers},     {"hidden_dim", c.hidden_dim},
       {"num_heads", c.num_heads},       {"ffn_dim", c.ffn_dim},
       {"vocab_size", c.vocab_size},     {"max_seq_len", c.max_seq_len},
       {"num_classes", c.num_classes},   {"layer_norm_eps", c.layer_norm_eps}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  read_opt(j, "num_layers", c.num_layers);
  read_opt(j, "hidden_dim", c.hidden_dim);
  read_opt(j, "num_heads", c.num_heads);
  read_opt(j, "ffn_dim", c.ffn_dim);
  read_opt(j, "vocab_size", c.vocab_size);
  read_opt(j, "max_seq_len", c.max_seq_len);
  read_opt(j, "num_classes", c.num_classes);
  read_opt(j, "layer_norm_eps", c.layer_norm_eps);
}

void to_json(nlohmann::json& j, const AttackConfig& c) {
  j = {{"steps", c.steps},
       {"learning_rate", c.learning_rate},
       {"final_lr_fraction", c.final_lr_fraction},
       {"adam_beta1", c.adam_beta1},
       {"adam_beta2", c.adam_beta2},
       {"adam_eps", c.adam_eps},
       {"init_candidates", c.init_candidates},
       {"reg_weight", c.reg_weight},
       {"projection_period", c.projection_period},
       {"reorder_budget", c.reorder_budget},
       {"labels_known", c.labels_known},
       {"length_known", c.length_known},
       {"seed", c.seed},
       {"trace_period", c.trace_period},
       {"early_stop_loss", c.early_stop_loss}};
}

void from_json(const nlohmann::json& j, AttackConfig& c) {
  read_opt(j, "steps", c.steps);
  read_opt(j, "learning_rate", c.learning_rate);
  read_opt(j, "final_lr_fraction", c.final_lr_fraction);
  read_opt(j, "adam_beta1", c.adam_beta1);
  read_opt(j, "adam_beta2", c.adam_beta2);
  read_opt(j, "adam_eps", c.adam_eps);
  read_opt(j, "init_candidates", c.init_candidates);
  read_opt(j, "reg_weight", c.reg_weight);
  read_opt(j, "projection_period", c.projection_period);
  read_opt(j, "reorder_budget", c.reorder_budget);
  read_opt(j, "labels_known", c.labels_known);
  read_opt(j, "length_known", c.length_known);
  read_opt(j, "seed", c.seed);
  read_opt(j, "trace_period", c.trace_period);
  read_opt(j, "early_stop_loss", c.early_stop_loss);
}

void to_json(nlohmann::json& j, const DpConfig& c) {
  // JSON has no infinity; the no-clip sentinel is written as null.
  j = {{"noise_multiplier", c.noise_multiplier},
       {"delta", c.delta},
       {"seed", c.seed}};
  if (std::isinf(c.clip_bound)) {
    j["clip_bound"] = nullptr;
  } else {
    j["clip_bound"] = c.clip_bound;
  }
}

void from_json(const nlohmann::json& j, DpConfig& c) {
  if (j.contains("clip_bound")) {
    c.clip_bound = j.at("clip_bound").is_null() ? DpConfig::kNoClip
                                                : j.at("clip_bound").get<double>();
  }
  read_opt(j, "noise_multiplier", c.noise_multiplier);
  read_opt(j, "delta", c.delta);
  read_opt(j, "seed", c.seed);
}

void to_json(nlohmann::json& j, const CorpusSpec& c) {
  j = {{"seed", c.seed},
       {"num_sentences", c.num_sentences},
       {"vocab_size", c.vocab_size},
       {"min_length", c.min_length},
       {"max_length", c.max_length}};
}

void from_json(const nlohmann::json& j, CorpusSpec& c) {
  read_opt(j, "seed", c.seed);
  read_opt(j, "num_sentences", c.num_sentences);
  read_opt(j, "vocab_size", c.vocab_size);
  read_opt(j, "min_length", c.min_length);
  read_opt(j, "max_length", c.max_length);
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"epochs", c.epochs},
       {"learning_rate", c.learning_rate},
       {"batch_size", c.batch_size},
       {"seed", c.seed}};
  if (c.dp) j["dp"] = *c.dp;
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  read_opt(j, "epochs", c.epochs);
  read_opt(j, "learning_rate", c.learning_rate);
  read_opt(j, "batch_size", c.batch_size);
  read_opt(j, "seed", c.seed);
  if (j.contains("dp") && !j.at("dp").is_null()) c.dp = j.at("dp").get<DpConfig>();
}

}  // namespace gradleak
