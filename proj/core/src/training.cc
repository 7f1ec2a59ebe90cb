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

#include "gradleak/training.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>

#include "gradleak/metrics.h"

namespace gradleak {
namespace {

ParamStore sgd_step(const ParamStore& params, const GradStore& grads,
                    double lr) {
  ParamStore next;
  next.config = params.config;
  for (const auto& [name, p] : params.blocks) {
    const Tensor& g = grads.at(name);
    std::vector<double> v(p.data().begin(), p.data().end());
    auto gd = g.data();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * gd[i];
    next.blocks.emplace(name, Tensor::variable(p.shape(), std::move(v)));
  }
  return next;
}

}  // namespace

std::vector<int> predict(const ParamStore& params,
                         std::span<const Sentence> sentences) {
  NoGradGuard no_grad;
  std::vector<int> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) {
    const Tensor logits = forward(params, TokenBatch::from_rows({s.tokens}));
    auto d = logits.data();
    out.push_back(static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin()));
  }
  return out;
}

UtilityMetrics evaluate(const ParamStore& params,
                        std::span<const Sentence> sentences) {
  const std::vector<int> pred = predict(params, sentences);
  std::vector<int> labels;
  for (const auto& s : sentences) labels.push_back(s.label);
  const Confusion c = Confusion::of(pred, labels);
  return {accuracy(c), f1(c), mcc(c)};
}

TrainResult train(const ParamStore& params, std::span<const Sentence> train_set,
                  std::span<const Sentence> heldout, const TrainConfig& config) {
  if (train_set.empty()) throw InputError("training set is empty");
  if (config.batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (config.dp) config.dp->validate();

  std::mt19937_64 rng(config.seed);
  std::mt19937_64 noise_rng(config.dp ? config.dp->seed : 0);
  TrainResult result;
  result.params = params;
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  auto run_batch = [&](const std::vector<std::size_t>& members) {
    std::vector<std::vector<int>> rows;
    std::vector<int> labels;
    for (std::size_t i : members) {
      rows.push_back(train_set[i].tokens);
      labels.push_back(train_set[i].label);
    }
    const TokenBatch batch = TokenBatch::from_rows(rows);
    GradStore g;
    if (config.dp) {
      std::vector<GradStore> per_example;
      for (std::size_t b = 0; b < batch.batch; ++b) {
        per_example.push_back(victim_gradients(
            result.params, TokenBatch::from_rows({rows[b]}),
            std::span<const int>(labels).subspan(b, 1)));
      }
      g = dp_transform(per_example, *config.dp, noise_rng);
    } else {
      g = victim_gradients(result.params, batch, labels);
    }
    result.params = sgd_step(result.params, g, config.learning_rate);
    ++result.steps;
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    std::map<std::size_t, std::vector<std::size_t>> buckets;
    for (std::size_t i : order) {
      auto& bucket = buckets[train_set[i].tokens.size()];
      bucket.push_back(i);
      if (bucket.size() == config.batch_size) {
        run_batch(bucket);
        bucket.clear();
      }
    }
    for (auto& [len, bucket] : buckets) {
      if (!bucket.empty()) run_batch(bucket);
    }
  }
  if (!heldout.empty()) result.metrics = evaluate(result.params, heldout);
  return result;
}

}  // namespace gradleak
