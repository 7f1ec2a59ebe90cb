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

#ifndef GRADLEAK_ATTACK_H_
#define GRADLEAK_ATTACK_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradleak/model.h"
#include "gradleak/selection.h"
#include "gradleak/tensor.h"

namespace gradleak {

// Orders candidate token sequences; higher is better.
class SequenceScorer {
 public:
  virtual ~SequenceScorer() = default;
  virtual double score(std::span<const int> tokens) const = 0;
};

struct AttackConfig {
  std::size_t steps = 2000;
  double learning_rate = 0.01;
  // Cosine decay ends at learning_rate * final_lr_fraction.
  double final_lr_fraction = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t init_candidates = 4;
  double reg_weight = 0.01;
  std::size_t projection_period = 200;
  std::size_t reorder_budget = 200;
  bool labels_known = true;
  bool length_known = true;
  std::uint64_t seed = 0;
  std::size_t trace_period = 50;
  // Stop once a discrete candidate reaches this matching loss; 0 disables.
  double early_stop_loss = 1e-9;

  void validate() const;
};

struct ReconstructionResult {
  std::vector<std::vector<int>> tokens;
  std::vector<int> labels;
  double final_loss = 0.0;
  std::vector<double> loss_trace;
  double wall_seconds = 0.0;
  std::string selection;
  std::uint64_t seed = 0;
  std::size_t steps_run = 0;
  // Observed blocks left out of the objective (unreachable or all-zero).
  std::vector<std::string> excluded_blocks;
};

struct ReconstructOptions {
  const SequenceScorer* scorer = nullptr;
  // Starting point [B x T x d]; replaces the random candidates.
  std::optional<Tensor> initial_embeddings;
};

// 1 - <a, b> / (|a| |b|) over the flattened blocks. Differentiable in a.
// |b| = 0 is a DegenerateTargetError; |a| = 0 gives exactly 1.
Tensor cosine_distance(const Tensor& a, const Tensor& b);

// Weighted sum of per-block cosine distances; weights come from target.
// All-zero target blocks are skipped with a warning.
Tensor matching_loss(const GradientView& dummy, const GradientView& target);

// Runs gradient matching against target and returns discrete sequences.
// embed.word and the attention key biases are never matched: the first is
// unreachable from continuous inputs and the second is zero up to rounding.
// labels may be omitted only with labels_known = false and classifier
// gradients in the target.
ReconstructionResult reconstruct(const ParamStore& params,
                                 const GradientView& target,
                                 const Selection& selection,
                                 std::optional<std::vector<int>> labels,
                                 std::size_t length, std::size_t batch,
                                 const AttackConfig& config,
                                 const ReconstructOptions& options = {});

// Nearest vocabulary row by cosine similarity; ties go to the lower id.
std::vector<std::vector<int>> project_to_tokens(const Tensor& embeddings,
                                                const Tensor& table);

// Greedy local search over adjacent swaps and single-token relocations,
// evaluating at most budget candidates. Preserves the token multiset.
std::vector<int> reorder(std::span<const int> tokens,
                         const SequenceScorer& scorer, std::size_t budget);

// Labels from classifier gradients under cross-entropy (B = 1 only).
std::vector<int> infer_labels(const GradientView& target,
                              std::size_t batch_size);

}  // namespace gradleak

#endif  // GRADLEAK_ATTACK_H_
