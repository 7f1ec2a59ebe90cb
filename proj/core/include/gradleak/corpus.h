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

#ifndef GRADLEAK_CORPUS_H_
#define GRADLEAK_CORPUS_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gradleak/attack.h"

namespace gradleak {

struct Sentence {
  std::vector<int> tokens;
  int label = 0;
};

struct CorpusSpec {
  std::uint64_t seed = 0;
  std::size_t num_sentences = 1000;
  std::size_t vocab_size = 256;
  std::size_t min_length = 4;
  std::size_t max_length = 4;

  void validate() const;
};

// Add-one smoothed bigram log-likelihood with a begin-of-sequence context.
class BigramScorer : public SequenceScorer {
 public:
  BigramScorer() = default;
  BigramScorer(std::size_t vocab_size, std::span<const Sentence> sentences);
  BigramScorer(std::size_t vocab_size,
               const std::vector<std::vector<int>>& sequences);

  double score(std::span<const int> tokens) const override;
  // previous < 0 is the start-of-sequence context.
  double log_prob(int previous, int next) const;

 private:
  void add(std::span<const int> tokens);

  std::size_t vocab_size_ = 0;
  // (vocab_size + 1) x vocab_size counts; the extra row is the start context.
  std::vector<std::uint32_t> pair_counts_;
  std::vector<std::uint32_t> context_counts_;
};

struct Corpus {
  CorpusSpec spec;
  std::vector<Sentence> sentences;
  std::vector<int> positive_markers;
  std::vector<int> negative_markers;
  BigramScorer scorer;
};

// Sentences from a seeded template grammar over a Zipf-distributed vocabulary.
// Each sentence carries one marker token of its label's marker set.
Corpus generate_corpus(const CorpusSpec& spec);

// One sentence per line: "<label>\t<id> <id> ...".
void write_corpus(std::ostream& out, std::span<const Sentence> sentences);
// Throws InputError on malformed lines.
std::vector<Sentence> read_corpus(std::istream& in);

}  // namespace gradleak

#endif  // GRADLEAK_CORPUS_H_
