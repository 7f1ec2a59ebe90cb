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

#include "gradleak/corpus.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include "gradleak/errors.h"

namespace gradleak {
namespace {

constexpr std::size_t kWordClasses = 3;
constexpr std::size_t kTemplatesPerLength = 6;
constexpr double kZipfExponent = 1.0;

}  // namespace

void CorpusSpec::validate() const {
  if (vocab_size < 16) throw ConfigError("corpus vocabulary must be >= 16");
  if (min_length < 1 || max_length < min_length) {
    throw ConfigError("corpus length range is empty");
  }
}

BigramScorer::BigramScorer(std::size_t vocab_size,
                           std::span<const Sentence> sentences)
    : vocab_size_(vocab_size),
      pair_counts_((vocab_size + 1) * vocab_size, 0),
      context_counts_(vocab_size + 1, 0) {
  for (const auto& s : sentences) add(s.tokens);
}

BigramScorer::BigramScorer(std::size_t vocab_size,
                           const std::vector<std::vector<int>>& sequences)
    : vocab_size_(vocab_size),
      pair_counts_((vocab_size + 1) * vocab_size, 0),
      context_counts_(vocab_size + 1, 0) {
  for (const auto& s : sequences) add(s);
}

void BigramScorer::add(std::span<const int> tokens) {
  std::size_t prev = vocab_size_;
  for (int t : tokens) {
    if (t < 0 || static_cast<std::size_t>(t) >= vocab_size_) {
      throw InputError("bigram scorer: token outside vocabulary");
    }
    ++pair_counts_[prev * vocab_size_ + static_cast<std::size_t>(t)];
    ++context_counts_[prev];
    prev = static_cast<std::size_t>(t);
  }
}

double BigramScorer::log_prob(int previous, int next) const {
  if (next < 0 || static_cast<std::size_t>(next) >= vocab_size_ ||
      (previous >= 0 && static_cast<std::size_t>(previous) >= vocab_size_)) {
    throw InputError("bigram scorer: token outside vocabulary");
  }
  const std::size_t ctx =
      previous < 0 ? vocab_size_ : static_cast<std::size_t>(previous);
  const double num =
      static_cast<double>(pair_counts_[ctx * vocab_size_ + static_cast<std::size_t>(next)]) + 1.0;
  const double den = static_cast<double>(context_counts_[ctx]) +
                     static_cast<double>(vocab_size_);
  return std::log(num / den);
}

double BigramScorer::score(std::span<const int> tokens) const {
  double total = 0.0;
  int prev = -1;
  for (int t : tokens) {
    total += log_prob(prev, t);
    prev = t;
  }
  return total;
}

Corpus generate_corpus(const CorpusSpec& spec) {
  spec.validate();
  Corpus corpus;
  corpus.spec = spec;
  const std::size_t markers_per_class = spec.vocab_size >= 64 ? 4 : 2;
  const std::size_t content = spec.vocab_size - 2 * markers_per_class;
  for (std::size_t i = 0; i < markers_per_class; ++i) {
    corpus.positive_markers.push_back(static_cast<int>(content + i));
    corpus.negative_markers.push_back(
        static_cast<int>(content + markers_per_class + i));
  }

  std::mt19937_64 rng(spec.seed);

  // Word class c holds content ids with id % kWordClasses == c, weighted by a
  // Zipf law on the id.
  std::vector<std::vector<int>> class_words(kWordClasses);
  std::vector<std::discrete_distribution<std::size_t>> class_pick;
  for (std::size_t c = 0; c < kWordClasses; ++c) {
    std::vector<double> w;
    for (std::size_t id = c; id < content; id += kWordClasses) {
      class_words[c].push_back(static_cast<int>(id));
      w.push_back(1.0 / std::pow(static_cast<double>(id + 1), kZipfExponent));
    }
    class_pick.emplace_back(w.begin(), w.end());
  }

  // Fixed templates per length. Class 0 carries the most mass, so templates
  // draw it most often.
  std::discrete_distribution<std::size_t> class_draw({0.5, 0.3, 0.2});
  std::vector<std::vector<std::vector<std::size_t>>> templates;
  for (std::size_t len = spec.min_length; len <= spec.max_length; ++len) {
    std::vector<std::vector<std::size_t>> for_len;
    for (std::size_t k = 0; k < kTemplatesPerLength; ++k) {
      std::vector<std::size_t> pattern(len);
      for (auto& c : pattern) c = class_draw(rng);
      for_len.push_back(std::move(pattern));
    }
    templates.push_back(std::move(for_len));
  }

  std::uniform_int_distribution<std::size_t> length_pick(spec.min_length,
                                                         spec.max_length);
  std::uniform_int_distribution<std::size_t> template_pick(
      0, kTemplatesPerLength - 1);
  std::uniform_int_distribution<std::size_t> marker_pick(0,
                                                         markers_per_class - 1);
  std::bernoulli_distribution coin(0.5);
  corpus.sentences.reserve(spec.num_sentences);
  for (std::size_t n = 0; n < spec.num_sentences; ++n) {
    const std::size_t len = length_pick(rng);
    const auto& pattern = templates[len - spec.min_length][template_pick(rng)];
    Sentence s;
    s.label = coin(rng) ? 1 : 0;
    for (std::size_t c : pattern) {
      s.tokens.push_back(class_words[c][class_pick[c](rng)]);
    }
    std::uniform_int_distribution<std::size_t> slot(0, len - 1);
    const auto& markers =
        s.label == 1 ? corpus.positive_markers : corpus.negative_markers;
    s.tokens[slot(rng)] = markers[marker_pick(rng)];
    corpus.sentences.push_back(std::move(s));
  }
  corpus.scorer = BigramScorer(spec.vocab_size, corpus.sentences);
  return corpus;
}

void write_corpus(std::ostream& out, std::span<const Sentence> sentences) {
  for (const auto& s : sentences) {
    out << s.label << '\t';
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      if (i) out << ' ';
      out << s.tokens[i];
    }
    out << '\n';
  }
}

std::vector<Sentence> read_corpus(std::istream& in) {
  std::vector<Sentence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto bad = [&](const std::string& what) {
      return InputError("corpus line " + std::to_string(lineno) + ": " + what);
    };
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw bad("missing tab separator");
    Sentence s;
    const char* end = line.data() + tab;
    auto [p, ec] = std::from_chars(line.data(), end, s.label);
    if (ec != std::errc() || p != end || (s.label != 0 && s.label != 1)) {
      throw bad("label must be 0 or 1");
    }
    std::istringstream fields(line.substr(tab + 1));
    for (std::string field; fields >> field;) {
      int id = 0;
      const char* fend = field.data() + field.size();
      auto [q, fec] = std::from_chars(field.data(), fend, id);
      if (fec != std::errc() || q != fend || id < 0) {
        throw bad("bad token id '" + field + "'");
      }
      s.tokens.push_back(id);
    }
    if (s.tokens.empty()) throw bad("no tokens");
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace gradleak
