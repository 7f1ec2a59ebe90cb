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

#ifndef GRADLEAK_METRICS_H_
#define GRADLEAK_METRICS_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace gradleak {

struct PrecisionRecallF {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
};

struct RougeScores {
  PrecisionRecallF r1;
  PrecisionRecallF r2;
  PrecisionRecallF rl;
};

// ROUGE-1/2 from clipped n-gram overlap, ROUGE-L from the longest common
// subsequence. An empty reference or hypothesis scores zero everywhere.
RougeScores rouge(std::span<const int> reference, std::span<const int> hypothesis);

// Matches each reference to a distinct hypothesis so that mean ROUGE-1 F is
// maximal (brute force, at most 8 sequences) and averages the scores.
RougeScores align_and_score(const std::vector<std::vector<int>>& references,
                            const std::vector<std::vector<int>>& hypotheses);

struct Confusion {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  // Class 1 is positive.
  static Confusion of(std::span<const int> predictions, std::span<const int> labels);
};

// Matthews correlation; 0 when any marginal is empty.
double mcc(const Confusion& c);
double mcc(std::span<const int> predictions, std::span<const int> labels);
// F1 of the positive class; 0 when undefined.
double f1(const Confusion& c);
double accuracy(const Confusion& c);

// Mean ROUGE-L F of draws uniform token sequences (same length as reference,
// ids in [0, vocab_size)) against the reference.
double random_baseline_rl(std::span<const int> reference, std::size_t vocab_size,
                          std::size_t draws, std::mt19937_64& rng);

}  // namespace gradleak

#endif  // GRADLEAK_METRICS_H_
