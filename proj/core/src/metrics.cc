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

#include "gradleak/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "gradleak/errors.h"

namespace gradleak {
namespace {

PrecisionRecallF prf(double overlap, double hyp_count, double ref_count) {
  PrecisionRecallF s;
  s.precision = hyp_count > 0 ? overlap / hyp_count : 0.0;
  s.recall = ref_count > 0 ? overlap / ref_count : 0.0;
  const double sum = s.precision + s.recall;
  s.f = sum > 0.0 ? 2.0 * s.precision * s.recall / sum : 0.0;
  return s;
}

PrecisionRecallF ngram_overlap(std::span<const int> ref,
                               std::span<const int> hyp, std::size_t n) {
  if (ref.size() < n || hyp.size() < n) {
    return {};
  }
  std::map<std::vector<int>, std::size_t> ref_counts;
  for (std::size_t i = 0; i + n <= ref.size(); ++i) {
    ++ref_counts[std::vector<int>(ref.begin() + i, ref.begin() + i + n)];
  }
  std::map<std::vector<int>, std::size_t> hyp_counts;
  for (std::size_t i = 0; i + n <= hyp.size(); ++i) {
    ++hyp_counts[std::vector<int>(hyp.begin() + i, hyp.begin() + i + n)];
  }
  std::size_t overlap = 0;
  for (const auto& [gram, count] : hyp_counts) {
    auto it = ref_counts.find(gram);
    if (it != ref_counts.end()) overlap += std::min(count, it->second);
  }
  return prf(static_cast<double>(overlap),
             static_cast<double>(hyp.size() - n + 1),
             static_cast<double>(ref.size() - n + 1));
}

std::size_t lcs_length(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void accumulate(RougeScores& total, const RougeScores& s) {
  for (auto [t, x] : {std::pair{&total.r1, &s.r1}, std::pair{&total.r2, &s.r2},
                      std::pair{&total.rl, &s.rl}}) {
    t->precision += x->precision;
    t->recall += x->recall;
    t->f += x->f;
  }
}

}  // namespace

RougeScores rouge(std::span<const int> reference,
                  std::span<const int> hypothesis) {
  RougeScores s;
  if (reference.empty() || hypothesis.empty()) return s;
  s.r1 = ngram_overlap(reference, hypothesis, 1);
  s.r2 = ngram_overlap(reference, hypothesis, 2);
  s.rl = prf(static_cast<double>(lcs_length(reference, hypothesis)),
             static_cast<double>(hypothesis.size()),
             static_cast<double>(reference.size()));
  return s;
}

RougeScores align_and_score(const std::vector<std::vector<int>>& references,
                            const std::vector<std::vector<int>>& hypotheses) {
  if (references.size() != hypotheses.size()) {
    throw InputError("align_and_score: reference and hypothesis counts differ");
  }
  const std::size_t b = references.size();
  if (b > 8) throw UnsupportedError("align_and_score supports at most 8 sequences");
  if (b == 0) return {};
  // Pairwise scores once, then search over assignments.
  std::vector<std::vector<RougeScores>> pair(b, std::vector<RougeScores>(b));
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < b; ++j) pair[i][j] = rouge(references[i], hypotheses[j]);
  }
  std::vector<std::size_t> perm(b);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::vector<std::size_t> best = perm;
  double best_r1 = -1.0;
  do {
    double r1 = 0.0;
    for (std::size_t i = 0; i < b; ++i) r1 += pair[i][perm[i]].r1.f;
    if (r1 > best_r1) {
      best_r1 = r1;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  RougeScores total;
  for (std::size_t i = 0; i < b; ++i) accumulate(total, pair[i][best[i]]);
  const double inv = 1.0 / static_cast<double>(b);
  for (auto* x : {&total.r1, &total.r2, &total.rl}) {
    x->precision *= inv;
    x->recall *= inv;
    x->f *= inv;
  }
  return total;
}

Confusion Confusion::of(std::span<const int> predictions,
                        std::span<const int> labels) {
  if (predictions.size() != labels.size()) {
    throw InputError("predictions and labels differ in length");
  }
  Confusion c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool p = predictions[i] == 1;
    const bool y = labels[i] == 1;
    if (p && y) ++c.tp;
    else if (!p && !y) ++c.tn;
    else if (p) ++c.fp;
    else ++c.fn;
  }
  return c;
}

double mcc(const Confusion& c) {
  const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
  const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
  const double denom = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  if (denom == 0.0) return 0.0;
  return (tp * tn - fp * fn) / std::sqrt(denom);
}

double mcc(std::span<const int> predictions, std::span<const int> labels) {
  return mcc(Confusion::of(predictions, labels));
}

double f1(const Confusion& c) {
  const double denom = 2.0 * static_cast<double>(c.tp) +
                       static_cast<double>(c.fp) + static_cast<double>(c.fn);
  return denom > 0.0 ? 2.0 * static_cast<double>(c.tp) / denom : 0.0;
}

double accuracy(const Confusion& c) {
  const std::size_t n = c.tp + c.tn + c.fp + c.fn;
  return n ? static_cast<double>(c.tp + c.tn) / static_cast<double>(n) : 0.0;
}

double random_baseline_rl(std::span<const int> reference, std::size_t vocab_size,
                          std::size_t draws, std::mt19937_64& rng) {
  if (draws == 0 || vocab_size == 0) return 0.0;
  std::uniform_int_distribution<int> pick(0, static_cast<int>(vocab_size) - 1);
  double total = 0.0;
  std::vector<int> hyp(reference.size());
  for (std::size_t k = 0; k < draws; ++k) {
    for (int& t : hyp) t = pick(rng);
    total += rouge(reference, hyp).rl.f;
  }
  return total / static_cast<double>(draws);
}

}  // namespace gradleak
