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

// Independent reference implementations for metric tests: exponential
// recursive LCS, direct n-gram counting and the textbook MCC formula.

#ifndef GRADLEAK_TESTS_ORACLES_H_
#define GRADLEAK_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <vector>

#include "gradleak/metrics.h"

namespace gradleak::oracle {

inline std::size_t naive_lcs(const std::vector<int>& a, const std::vector<int>& b,
                             std::size_t i = 0, std::size_t j = 0) {
  if (i == a.size() || j == b.size()) return 0;
  if (a[i] == b[j]) return 1 + naive_lcs(a, b, i + 1, j + 1);
  return std::max(naive_lcs(a, b, i + 1, j), naive_lcs(a, b, i, j + 1));
}

inline std::map<std::vector<int>, int> ngrams(const std::vector<int>& s, std::size_t n) {
  std::map<std::vector<int>, int> counts;
  for (std::size_t i = 0; i + n <= s.size(); ++i) {
    ++counts[std::vector<int>(s.begin() + i, s.begin() + i + n)];
  }
  return counts;
}

inline PrecisionRecallF prf(double overlap, double hyp_total, double ref_total) {
  PrecisionRecallF s;
  s.precision = hyp_total > 0 ? overlap / hyp_total : 0.0;
  s.recall = ref_total > 0 ? overlap / ref_total : 0.0;
  s.f = s.precision + s.recall > 0
            ? 2 * s.precision * s.recall / (s.precision + s.recall)
            : 0.0;
  return s;
}

inline PrecisionRecallF rouge_n(const std::vector<int>& ref, const std::vector<int>& hyp,
                                std::size_t n) {
  const auto r = ngrams(ref, n);
  const auto h = ngrams(hyp, n);
  int overlap = 0, rt = 0, ht = 0;
  for (const auto& [g, c] : r) {
    rt += c;
    auto it = h.find(g);
    if (it != h.end()) overlap += std::min(c, it->second);
  }
  for (const auto& [g, c] : h) ht += c;
  return prf(overlap, ht, rt);
}

inline PrecisionRecallF rouge_l(const std::vector<int>& ref, const std::vector<int>& hyp) {
  return prf(static_cast<double>(naive_lcs(ref, hyp)), hyp.size(), ref.size());
}

inline double mcc(const Confusion& c) {
  const double tp = c.tp, tn = c.tn, fp = c.fp, fn = c.fn;
  const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
  return den == 0 ? 0.0 : (tp * tn - fp * fn) / std::sqrt(den);
}

}  // namespace gradleak::oracle

#endif  // GRADLEAK_TESTS_ORACLES_H_
