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
#include <string>
#include <utility>
#include <vector>

#include "mlasr/inventory.h"

namespace mlasr {

// Per-language sentence counts and the exponent that flattens them.
struct LanguageStats {
  std::vector<std::string> languages;
  std::vector<int64_t> counts;
  double beta = 0.5;
};

// q_l = p_l^beta / sum_i p_i^beta with p_l = n_l / sum_i n_i.
std::vector<double> SamplingDistribution(const LanguageStats &stats);

struct SampledSentence {
  size_t language;  // index into LanguageStats::languages
  std::string sentence;
};

// Draws exactly `total` sentences with replacement: language by q, sentence
// uniformly within the language. Deterministic given `seed`.
std::vector<SampledSentence> SampleCorpus(
    const std::vector<std::vector<std::string>> &corpora,
    const LanguageStats &stats, int64_t total, uint64_t seed);

inline constexpr std::string_view kUnkToken = "<unk>";
inline constexpr std::string_view kSosToken = "<s>";
inline constexpr std::string_view kWordBoundary = "▁";

// Word-internal byte pair encoding. Every word ends with the boundary marker,
// which is part of the base character set, so merges never cross words and
// decoding is unambiguous.
class BpeModel {
 public:
  BpeModel() = default;
  BpeModel(std::vector<std::string> charset,
           std::vector<std::pair<std::string, std::string>> merges,
           int vocab_size, std::string marker = std::string(kWordBoundary));

  const std::vector<std::pair<std::string, std::string>> &merges() const {
    return merges_;
  }
  // Base characters (including the marker), code point order.
  const std::vector<std::string> &charset() const { return charset_; }
  const std::string &marker() const { return marker_; }
  // Requested vocabulary size (subwords + the two special tokens).
  int vocab_size() const { return vocab_size_; }

  // Specials, base characters and merged tokens; blank at index 0.
  const Alphabet &vocab() const { return vocab_; }
  // Number of vocabulary entries excluding the blank.
  int NumTokens() const { return vocab_.size() - 1; }

  std::vector<std::string> Encode(const std::string &sentence) const;
  std::string Decode(const std::vector<std::string> &tokens) const;

  // Encoding of a single word, used for orthographic lexicons.
  std::vector<std::string> EncodeWord(const std::string &word) const;

 private:
  std::vector<std::string> charset_;
  std::vector<std::pair<std::string, std::string>> merges_;
  std::map<std::pair<std::string, std::string>, int> rank_;
  int vocab_size_ = 0;
  std::string marker_{kWordBoundary};
  Alphabet vocab_;
};

// Starts from the character set and repeatedly merges the most frequent
// adjacent pair (ties: lexicographically smallest (left, right)) until the
// vocabulary reaches `vocab_size` or no pair occurs at least twice.
BpeModel TrainBpe(const std::vector<std::string> &sentences, int vocab_size);

// Header `bpe <vocab_size> <marker> <num_merges> <num_tokens>`, then one
// merge per line `left right`, then the vocabulary listing (blank excluded),
// one token per line.
void WriteBpeModel(const std::string &path, const BpeModel &model);
BpeModel ReadBpeModel(const std::string &path);

}  // namespace mlasr
