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

#include "gradleak/attack.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "gradleak/ops.h"

namespace gradleak {
namespace {

double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

// Target blocks normalized once, plus their weights and names.
struct MatchTarget {
  std::vector<std::string> names;
  std::vector<Tensor> units;
  std::vector<double> weights;
};

// cos distance against an already unit-norm constant target.
Tensor unit_cosine_distance(const Tensor& a, const Tensor& unit_b) {
  const Tensor a_sq = sum(square(a));
  if (a_sq.item() == 0.0) {
    return add_scalar(scale(a_sq, 0.0), 1.0);
  }
  return add_scalar(neg(div(dot(a, unit_b), sqrt(a_sq))), 1.0);
}

Tensor unit_of(const Tensor& b, const std::string& name) {
  const double norm = std::sqrt(squared_norm(b.data()));
  if (norm == 0.0) {
    throw DegenerateTargetError("target gradient block '" + name +
                                "' is all zero");
  }
  return scale(b.detach(), 1.0 / norm);
}

MatchTarget prepare_target(const GradientView& target,
                           const std::vector<std::string>& unreachable,
                           std::vector<std::string>& excluded) {
  MatchTarget t;
  for (const auto& block : target.blocks) {
    if (std::find(unreachable.begin(), unreachable.end(), block.name) !=
        unreachable.end()) {
      excluded.push_back(block.name);
      continue;
    }
    if (squared_norm(block.grad.data()) == 0.0) {
      spdlog::warn("excluding all-zero target gradient block {}", block.name);
      excluded.push_back(block.name);
      continue;
    }
    t.names.push_back(block.name);
    t.units.push_back(unit_of(block.grad, block.name));
    t.weights.push_back(block.weight);
  }
  if (t.names.empty()) {
    throw DegenerateTargetError("no usable target gradient blocks to match");
  }
  return t;
}

Tensor weighted_distance(std::span<const Tensor> dummy,
                         const MatchTarget& target) {
  Tensor total;
  for (std::size_t i = 0; i < dummy.size(); ++i) {
    Tensor term = unit_cosine_distance(dummy[i], target.units[i]);
    if (target.weights[i] != 1.0) term = scale(term, target.weights[i]);
    total = total.defined() ? add(total, term) : term;
  }
  return total;
}

class Matcher {
 public:
  Matcher(const ParamStore& params, MatchTarget target, std::vector<int> labels)
      : params_(params), target_(std::move(target)), labels_(std::move(labels)) {}

  // Matching loss at embeddings; with differentiable the result carries the
  // graph back to embeddings.
  Tensor loss(const Tensor& embeddings, bool differentiable) const {
    std::vector<Tensor> dummy = embedding_input_gradients(
        params_, embeddings, labels_, target_.names, differentiable);
    return weighted_distance(dummy, target_);
  }

  double value(const Tensor& embeddings) const {
    return loss(embeddings.detach(), false).item();
  }

 private:
  const ParamStore& params_;
  MatchTarget target_;
  std::vector<int> labels_;
};

Tensor embed_tokens(const Tensor& table,
                    const std::vector<std::vector<int>>& tokens) {
  const std::size_t d = table.shape().cols();
  std::vector<double> out;
  out.reserve(tokens.size() * tokens.front().size() * d);
  for (const auto& seq : tokens) {
    for (int id : seq) {
      auto row = table.data().subspan(static_cast<std::size_t>(id) * d, d);
      out.insert(out.end(), row.begin(), row.end());
    }
  }
  return Tensor::constant(Shape{tokens.size(), tokens.front().size(), d},
                          std::move(out));
}

struct TableStats {
  double std = 0.0;
  double mean_row_norm = 0.0;
};

TableStats table_stats(const Tensor& table) {
  const std::size_t v = table.shape().rows();
  const std::size_t d = table.shape().cols();
  auto data = table.data();
  double mean = 0.0;
  for (double x : data) mean += x;
  mean /= static_cast<double>(data.size());
  double var = 0.0;
  for (double x : data) var += (x - mean) * (x - mean);
  TableStats s;
  s.std = std::sqrt(var / static_cast<double>(data.size()));
  for (std::size_t r = 0; r < v; ++r) {
    s.mean_row_norm += std::sqrt(squared_norm(data.subspan(r * d, d)));
  }
  s.mean_row_norm /= static_cast<double>(v);
  return s;
}

Tensor norm_regularizer(const Tensor& embeddings, double target_norm) {
  const std::size_t d = embeddings.shape().cols();
  const std::size_t rows = embeddings.shape().rows();
  const Tensor flat = reshape(embeddings, Shape{rows, d});
  const Tensor norms = sqrt(sum_cols(square(flat)));
  return scale(sum(square(add_scalar(norms, -target_norm))),
               1.0 / static_cast<double>(rows));
}

}  // namespace

void AttackConfig::validate() const {
  // steps = 0 is allowed: the initial point is projected directly.
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (!(final_lr_fraction > 0.0 && final_lr_fraction <= 1.0)) {
    throw ConfigError("final_lr_fraction must lie in (0, 1]");
  }
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) || !(adam_eps > 0.0)) {
    throw ConfigError("invalid Adam moments");
  }
  if (init_candidates < 1) throw ConfigError("init_candidates must be >= 1");
  if (reg_weight < 0.0) throw ConfigError("reg_weight must be >= 0");
  if (projection_period < 1) throw ConfigError("projection_period must be >= 1");
  if (trace_period < 1) throw ConfigError("trace_period must be >= 1");
  if (!length_known) {
    throw UnsupportedError("sequence length search is not supported");
  }
}

Tensor cosine_distance(const Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape())) {
    throw ShapeError("cosine_distance: shape mismatch " +
                     a.shape().to_string() + " vs " + b.shape().to_string());
  }
  return unit_cosine_distance(a, unit_of(b, "target"));
}

Tensor matching_loss(const GradientView& dummy, const GradientView& target) {
  if (dummy.blocks.size() != target.blocks.size()) {
    throw UsageError("matching_loss: views have different block counts");
  }
  for (std::size_t i = 0; i < dummy.blocks.size(); ++i) {
    if (dummy.blocks[i].name != target.blocks[i].name ||
        !(dummy.blocks[i].grad.shape() == target.blocks[i].grad.shape())) {
      throw UsageError("matching_loss: views are misaligned at block " +
                       dummy.blocks[i].name);
    }
  }
  std::vector<std::string> excluded;
  const MatchTarget t = prepare_target(target, {}, excluded);
  std::vector<Tensor> a;
  for (const auto& block : dummy.blocks) {
    if (std::find(excluded.begin(), excluded.end(), block.name) ==
        excluded.end()) {
      a.push_back(block.grad);
    }
  }
  return weighted_distance(a, t);
}

std::vector<std::vector<int>> project_to_tokens(const Tensor& embeddings,
                                                const Tensor& table) {
  const std::size_t d = table.shape().cols();
  const std::size_t v = table.shape().rows();
  const Shape& s = embeddings.shape();
  if (s.rank() != 3 || s[2] != d) {
    throw ShapeError("project_to_tokens: embeddings " + s.to_string() +
                     " do not match table " + table.shape().to_string());
  }
  std::vector<double> row_norms(v);
  for (std::size_t r = 0; r < v; ++r) {
    row_norms[r] = std::sqrt(squared_norm(table.data().subspan(r * d, d)));
  }
  std::vector<std::vector<int>> out(s[0], std::vector<int>(s[1]));
  for (std::size_t b = 0; b < s[0]; ++b) {
    for (std::size_t t = 0; t < s[1]; ++t) {
      auto x = embeddings.data().subspan((b * s[1] + t) * d, d);
      const double xn = std::sqrt(squared_norm(x));
      double best = -std::numeric_limits<double>::infinity();
      int best_id = 0;
      for (std::size_t r = 0; r < v; ++r) {
        auto row = table.data().subspan(r * d, d);
        double dotv = 0.0;
        for (std::size_t j = 0; j < d; ++j) dotv += x[j] * row[j];
        const double denom = xn * row_norms[r];
        const double cos = denom > 0.0 ? dotv / denom : 0.0;
        if (cos > best) {
          best = cos;
          best_id = static_cast<int>(r);
        }
      }
      out[b][t] = best_id;
    }
  }
  return out;
}

std::vector<int> reorder(std::span<const int> tokens,
                         const SequenceScorer& scorer, std::size_t budget) {
  std::vector<int> current(tokens.begin(), tokens.end());
  const std::size_t n = current.size();
  if (budget == 0 || n < 2) return current;
  double current_score = scorer.score(current);
  std::size_t used = 0;
  bool improved = true;
  while (improved && used < budget) {
    improved = false;
    std::vector<int> best;
    double best_score = current_score;
    auto consider = [&](std::vector<int> candidate) {
      ++used;
      const double s = scorer.score(candidate);
      if (s > best_score) {
        best_score = s;
        best = std::move(candidate);
      }
    };
    for (std::size_t i = 0; i + 1 < n && used < budget; ++i) {
      std::vector<int> c = current;
      std::swap(c[i], c[i + 1]);
      consider(std::move(c));
    }
    for (std::size_t i = 0; i < n && used < budget; ++i) {
      for (std::size_t j = 0; j < n && used < budget; ++j) {
        if (j == i || j + 1 == i || i + 1 == j) continue;
        std::vector<int> c = current;
        const int tok = c[i];
        c.erase(c.begin() + static_cast<std::ptrdiff_t>(i));
        c.insert(c.begin() + static_cast<std::ptrdiff_t>(j), tok);
        consider(std::move(c));
      }
    }
    if (!best.empty()) {
      current = std::move(best);
      current_score = best_score;
      improved = true;
    }
  }
  return current;
}

std::vector<int> infer_labels(const GradientView& target,
                              std::size_t batch_size) {
  if (batch_size != 1) {
    throw UnsupportedError("label inference needs batch size 1");
  }
  if (target.contains("cls.out.bias")) {
    // Bias gradient is softmax - onehot: only the true class is negative.
    auto g = target.at("cls.out.bias").grad.data();
    return {static_cast<int>(std::min_element(g.begin(), g.end()) - g.begin())};
  }
  if (!target.contains("cls.out.weight")) {
    throw UnsupportedError(
        "label inference needs classifier gradients in the selection");
  }
  // Weight gradient columns are pooled * (p_j - y_j): the true column is the
  // one anti-aligned with all others.
  const Tensor& w = target.at("cls.out.weight").grad;
  const std::size_t d = w.shape().rows();
  const std::size_t k = w.shape().cols();
  if (k < 3) {
    throw UnsupportedError(
        "label inference from the output weight alone is ambiguous for K < 3");
  }
  auto data = w.data();
  int best = 0;
  double best_votes = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < k; ++a) {
    double votes = 0.0;
    for (std::size_t b = 0; b < k; ++b) {
      if (a == b) continue;
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += data[r * k + a] * data[r * k + b];
      votes += s < 0.0 ? -1.0 : 1.0;
    }
    if (votes < best_votes) {
      best_votes = votes;
      best = static_cast<int>(a);
    }
  }
  return {best};
}

ReconstructionResult reconstruct(const ParamStore& params,
                                 const GradientView& target,
                                 const Selection& selection,
                                 std::optional<std::vector<int>> labels,
                                 std::size_t length, std::size_t batch,
                                 const AttackConfig& config,
                                 const ReconstructOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  config.validate();
  const ModelConfig& mc = params.config;
  if (batch < 1 || length < 1 || length > mc.max_seq_len) {
    throw InputError("invalid batch size or sequence length for the attack");
  }
  selection.validate(mc);
  std::vector<std::string> expected;
  for (const auto& key : selection.keys) {
    for (auto& name : blocks_for_key(key, mc)) expected.push_back(name);
  }
  if (expected != target.names()) {
    throw UsageError("target view was not resolved from selection " +
                     selection.to_string());
  }

  ReconstructionResult result;
  result.selection = selection.to_string();
  result.seed = config.seed;

  if (!config.labels_known) {
    labels = infer_labels(target, batch);
  } else if (!labels) {
    throw UsageError("labels are required when labels_known is set");
  }
  if (labels->size() != batch) {
    throw InputError("need one label per sequence");
  }
  result.labels = *labels;

  // Continuous dummies bypass the word-embedding lookup, so its gradient
  // cannot be produced. Softmax ignores the per-query constant a key bias
  // adds, so its gradient is zero up to rounding and carries no signal.
  std::vector<std::string> unmatched{"embed.word"};
  for (std::size_t l = 0; l < mc.num_layers; ++l) {
    unmatched.push_back("layer." + std::to_string(l) + ".attn.k.bias");
  }
  const Matcher matcher(
      params, prepare_target(target, unmatched, result.excluded_blocks),
      *labels);

  const Tensor& table = params.at("embed.word");
  const TableStats stats = table_stats(table);
  const Shape shape{batch, length, mc.hidden_dim};
  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> normal(0.0, stats.std);

  Tensor x;
  double x_loss = 0.0;
  if (options.initial_embeddings) {
    if (!(options.initial_embeddings->shape() == shape)) {
      throw ShapeError("initial embeddings must be " + shape.to_string());
    }
    x = options.initial_embeddings->detach();
    x_loss = matcher.value(x);
  } else {
    for (std::size_t c = 0; c < config.init_candidates; ++c) {
      std::vector<double> values(shape.numel());
      for (double& v : values) v = normal(rng);
      Tensor candidate = Tensor::constant(shape, std::move(values));
      const double l = matcher.value(candidate);
      if (!std::isfinite(l)) throw NumericError("non-finite initial loss");
      if (!x.defined() || l < x_loss) {
        x = candidate;
        x_loss = l;
      }
    }
  }

  std::vector<std::vector<int>> best_tokens;
  double best_loss = std::numeric_limits<double>::infinity();

  // Projects the current point, reorders, keeps the best discrete candidate
  // and swaps it in when it does not raise the matching loss.
  auto project = [&]() {
    const double continuous = matcher.value(x);
    std::vector<std::vector<std::vector<int>>> candidates;
    candidates.push_back(project_to_tokens(x, table));
    if (options.scorer && config.reorder_budget > 0) {
      auto reordered = candidates.front();
      for (auto& seq : reordered) {
        seq = reorder(seq, *options.scorer, config.reorder_budget);
      }
      if (reordered != candidates.front()) candidates.push_back(reordered);
    }
    std::size_t pick = 0;
    double pick_loss = std::numeric_limits<double>::infinity();
    std::vector<Tensor> embedded;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      embedded.push_back(embed_tokens(table, candidates[i]));
      const double l = matcher.value(embedded.back());
      if (l < pick_loss) {
        pick_loss = l;
        pick = i;
      }
    }
    if (pick_loss < best_loss) {
      best_loss = pick_loss;
      best_tokens = candidates[pick];
    }
    if (pick_loss <= continuous) x = embedded[pick];
  };

  const std::size_t n = x.numel();
  std::vector<double> m1(n, 0.0), m2(n, 0.0);
  std::size_t step = 0;
  for (; step < config.steps; ++step) {
    const double progress =
        static_cast<double>(step) / static_cast<double>(config.steps);
    const double lr =
        config.learning_rate *
        (config.final_lr_fraction + (1.0 - config.final_lr_fraction) * 0.5 *
                                        (1.0 + std::cos(std::numbers::pi * progress)));
    const Tensor xv = x.as_variable();
    const Tensor match = matcher.loss(xv, true);
    Tensor total = match;
    if (config.reg_weight > 0.0) {
      total = add(total, scale(norm_regularizer(xv, stats.mean_row_norm),
                               config.reg_weight));
    }
    if (!std::isfinite(total.item())) {
      throw NumericError("non-finite matching loss at step " +
                         std::to_string(step));
    }
    if (step % config.trace_period == 0) result.loss_trace.push_back(match.item());
    const Tensor g = grad(total, xv);
    std::vector<double> next(x.data().begin(), x.data().end());
    const double t = static_cast<double>(step + 1);
    const double c1 = 1.0 - std::pow(config.adam_beta1, t);
    const double c2 = 1.0 - std::pow(config.adam_beta2, t);
    auto gd = g.data();
    for (std::size_t i = 0; i < n; ++i) {
      m1[i] = config.adam_beta1 * m1[i] + (1.0 - config.adam_beta1) * gd[i];
      m2[i] = config.adam_beta2 * m2[i] + (1.0 - config.adam_beta2) * gd[i] * gd[i];
      next[i] -= lr * (m1[i] / c1) / (std::sqrt(m2[i] / c2) + config.adam_eps);
    }
    x = Tensor::constant(shape, std::move(next));
    if ((step + 1) % config.projection_period == 0 && step + 1 < config.steps) {
      project();
      if (config.early_stop_loss > 0.0 && best_loss <= config.early_stop_loss) {
        ++step;
        break;
      }
    }
  }
  project();
  result.steps_run = step;
  if (result.loss_trace.empty()) result.loss_trace.push_back(x_loss);
  result.tokens = std::move(best_tokens);
  // Rounding can push a perfect match a few ulps below zero.
  result.final_loss = std::max(0.0, best_loss);
  result.wall_seconds = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - started)
                            .count();
  return result;
}

}  // namespace gradleak
