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
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "gradleak/errors.h"
#include "oracles.h"

namespace gradleak {
namespace {

void expect_same(const PrecisionRecallF& a, const PrecisionRecallF& b) {
  EXPECT_EQ(a.precision, b.precision);
  EXPECT_EQ(a.recall, b.recall);
  EXPECT_EQ(a.f, b.f);
}

TEST(Rouge, MatchesBruteForceOracleOnRandomPairs) {
  std::mt19937_64 rng(0);
  for (int i = 0; i < 200; ++i) {
    std::vector<int> ref(rng() % 13), hyp(rng() % 13);
    for (int& t : ref) t = static_cast<int>(rng() % 10);
    for (int& t : hyp) t = static_cast<int>(rng() % 10);
    const RougeScores got = rouge(ref, hyp);
    if (ref.empty() || hyp.empty()) {
      EXPECT_EQ(got.r1.f, 0.0);
      EXPECT_EQ(got.rl.f, 0.0);
      continue;
    }
    expect_same(got.r1, oracle::rouge_n(ref, hyp, 1));
    expect_same(got.r2, oracle::rouge_n(ref, hyp, 2));
    expect_same(got.rl, oracle::rouge_l(ref, hyp));
  }
}

TEST(Rouge, HandExample) {
  const std::vector<int> ref{0, 1, 2};  // "a b c"
  const std::vector<int> hyp{0, 2};     // "a c"
  const RougeScores s = rouge(ref, hyp);
  EXPECT_DOUBLE_EQ(s.r1.precision, 1.0);
  EXPECT_DOUBLE_EQ(s.r1.recall, 2.0 / 3.0);
  EXPECT_NEAR(s.r1.f, 0.8, 1e-15);
  EXPECT_EQ(s.r2.f, 0.0);
  EXPECT_NEAR(s.rl.f, 0.8, 1e-15);
}

TEST(Rouge, IdentityDisjointAndEmpty) {
  const std::vector<int> a{4, 5, 6, 4};
  const RougeScores same = rouge(a, a);
  EXPECT_EQ(same.r1.f, 1.0);
  EXPECT_EQ(same.r2.f, 1.0);
  EXPECT_EQ(same.rl.f, 1.0);
  const std::vector<int> b{1, 2, 3};
  const RougeScores none = rouge(a, b);
  EXPECT_EQ(none.r1.f, 0.0);
  EXPECT_EQ(none.r2.f, 0.0);
  EXPECT_EQ(none.rl.f, 0.0);
  const RougeScores empty = rouge({}, a);
  EXPECT_EQ(empty.r1.f, 0.0);
  EXPECT_EQ(empty.rl.precision, 0.0);
}

TEST(AlignAndScore, Examples) {
  const std::vector<std::vector<int>> one{{1, 2, 3}};
  const std::vector<std::vector<int>> hyp1{{1, 3}};
  EXPECT_EQ(align_and_score(one, hyp1).r1.f, rouge(one[0], hyp1[0]).r1.f);

  const std::vector<std::vector<int>> refs{{1, 2, 3}, {7, 8, 9}};
  const std::vector<std::vector<int>> swapped{{7, 8, 9}, {1, 2, 3}};
  EXPECT_EQ(align_and_score(refs, swapped).r1.f, 1.0);
  EXPECT_EQ(align_and_score(refs, swapped).rl.f, 1.0);

  const std::vector<std::vector<int>> half{{}, {1, 2, 3}};
  EXPECT_DOUBLE_EQ(align_and_score(refs, half).r1.f, 0.5);
}

TEST(AlignAndScore, Errors) {
  const std::vector<std::vector<int>> nine(9, std::vector<int>{1});
  EXPECT_THROW(align_and_score(nine, nine), UnsupportedError);
  const std::vector<std::vector<int>> two(2, std::vector<int>{1});
  const std::vector<std::vector<int>> three(3, std::vector<int>{1});
  EXPECT_THROW(align_and_score(two, three), InputError);
}

TEST(AlignAndScore, PicksBestAssignment) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t b = 1 + rng() % 4;
    std::vector<std::vector<int>> refs(b), hyps(b);
    for (auto& r : refs) { r.resize(4); for (int& t : r) t = rng() % 6; }
    for (auto& h : hyps) { h.resize(4); for (int& t : h) t = rng() % 6; }
    const double got = align_and_score(refs, hyps).r1.f;
    std::vector<std::size_t> perm(b);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < b; ++i) s += rouge(refs[i], hyps[perm[i]]).r1.f;
      best = std::max(best, s / b);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_NEAR(got, best, 1e-15);
  }
}

TEST(Mcc, MatchesFormulaOnRandomTables) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 100; ++i) {
    Confusion c{rng() % 20, rng() % 20, rng() % 20, rng() % 20};
    if (i == 0) c = {0, 7, 0, 5};   // everything predicted negative
    if (i == 1) c = {6, 0, 4, 0};   // everything predicted positive
    const double want = oracle::mcc(c);
    EXPECT_NEAR(mcc(c), want, 1e-15);
    EXPECT_GE(mcc(c), -1.0);
    EXPECT_LE(mcc(c), 1.0);
  }
}

TEST(Mcc, Examples) {
  const std::vector<int> labels{0, 1, 1, 0, 1};
  EXPECT_DOUBLE_EQ(mcc(labels, labels), 1.0);
  const std::vector<int> all_one(5, 1);
  EXPECT_EQ(mcc(all_one, labels), 0.0);
  EXPECT_EQ(mcc(Confusion{1, 1, 1, 1}), 0.0);
}

TEST(F1AndAccuracy, FromConfusion) {
  const std::vector<int> pred{1, 1, 0, 0, 1};
  const std::vector<int> gold{1, 0, 0, 1, 1};
  const Confusion c = Confusion::of(pred, gold);
  EXPECT_EQ(c.tp, 2u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_EQ(c.tn, 1u);
  EXPECT_DOUBLE_EQ(f1(c), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(accuracy(c), 0.6);
  EXPECT_EQ(f1(Confusion{0, 5, 0, 0}), 0.0);
}

TEST(RandomBaseline, SmallForLargeVocabulary) {
  std::mt19937_64 rng(3);
  const std::vector<int> ref{1, 2, 3, 4};
  const double rl = random_baseline_rl(ref, 256, 100, rng);
  EXPECT_GE(rl, 0.0);
  EXPECT_LT(rl, 0.1);
  EXPECT_DOUBLE_EQ(random_baseline_rl(std::vector<int>{0, 0}, 1, 10, rng), 1.0);
}

}  // namespace
}  // namespace gradleak
