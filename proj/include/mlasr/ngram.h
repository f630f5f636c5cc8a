// Copyright 2026 The mlasr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace mlasr {

inline constexpr const char *kSentenceStart = "<s>";
inline constexpr const char *kSentenceEnd = "</s>";
inline constexpr const char *kUnknownWord = "<unk>";
// ARPA convention for "probability zero" (the <s> unigram).
inline constexpr double kLog10Zero = -99.0;

using WordSequence = std::vector<std::string>;

struct NGramEntry {
  double log10_prob = 0.0;
  double log10_backoff = 0.0;
};

// Backoff n-gram model keyed by full n-gram (context followed by word).
class NGramModel {
 public:
  NGramModel() = default;
  explicit NGramModel(int order) : order_(order) {}

  int order() const { return order_; }
  const std::map<WordSequence, NGramEntry> &entries() const { return entries_; }
  std::map<WordSequence, NGramEntry> &mutable_entries() { return entries_; }
  const NGramEntry *Find(const WordSequence &ngram) const;

  // Predictable words: every unigram except <s>.
  std::vector<std::string> Vocabulary() const;

  // log10 P(word | context) with backoff; out-of-vocabulary words score as
  // <unk>. Only the last order-1 context words are used.
  double Log10Prob(const WordSequence &context, const std::string &word) const;

  // Natural-log probability of <s> words </s>.
  double SentenceLogProb(const WordSequence &words) const;

  // Throws kInvalidArgument on structural problems (positive probabilities,
  // n-grams whose context has no entry, missing <unk>).
  void Validate() const;

 private:
  int order_ = 0;
  std::map<WordSequence, NGramEntry> entries_;
};

struct NGramCounts {
  int order = 0;
  std::map<WordSequence, int64_t> counts;  // all orders 1..order
  int64_t tokens = 0;                      // predicted unigram tokens
};

NGramCounts CountNGrams(const std::vector<WordSequence> &sentences, int order,
                        bool sentence_boundaries = true);

// Witten-Bell backoff estimation. For a context h with c(h) tokens and T(h)
// distinct followers, a seen word gets c(hw) / (c(h) + T(h)); the remaining
// mass goes to the lower order via the backoff weight. Unigrams interpolate
// with a uniform floor over the vocabulary plus <unk>.
NGramModel TrainNGram(const std::vector<WordSequence> &sentences, int order = 4,
                      bool sentence_boundaries = true);

void WriteArpa(const std::string &path, const NGramModel &model);
NGramModel ReadArpa(const std::string &path);

}  // namespace mlasr
