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

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mlasr/fst.h"
#include "mlasr/inventory.h"
#include "mlasr/textnorm.h"

namespace mlasr {

struct Pronunciation {
  std::vector<std::string> units;
  double weight = 0.0;  // non-negative cost, lower is better

  bool operator==(const Pronunciation &o) const {
    return units == o.units && weight == o.weight;
  }
};

// Pronunciation lexicon: word -> pronunciations ordered by ascending weight.
// Also used for orthographic (subword) lexicons.
class Prolex {
 public:
  // Adds a pronunciation, keeping the word's list sorted by weight (stable).
  // An identical unit sequence already present keeps the lower weight.
  void Add(const std::string &word, Pronunciation pron);

  bool Contains(const std::string &word) const { return entries_.count(word) > 0; }
  const std::vector<Pronunciation> &Prons(const std::string &word) const;
  const Pronunciation &Best(const std::string &word) const;

  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, std::vector<Pronunciation>> &entries() const {
    return entries_;
  }

  // Throws kInvalidArgument if a unit is missing from `inventory`.
  void CheckUnits(const std::set<std::string> &inventory) const;
  std::set<std::string> UnitSet() const;

 private:
  std::map<std::string, std::vector<Pronunciation>> entries_;
};

// Up to `nbest` lowest-cost distinct output sequences of `g2p` paths that
// accept the code points of `word`, in non-decreasing weight order. Output
// symbols are stripped of `strip_marks`; symbols that become empty are
// dropped. Arc costs must be non-negative. Throws kStructure on a malformed
// machine.
std::vector<Pronunciation> ApplyG2p(
    const Fst &g2p, const std::string &word, int nbest,
    const std::set<char32_t> &strip_marks = NormRules::DefaultStripMarks());

struct ProlexBuildResult {
  Prolex prolex;
  std::vector<std::string> unpronounceable;
};

// Throws kEmpty when no word receives a pronunciation.
ProlexBuildResult BuildProlex(
    const std::vector<std::string> &words, const Fst &g2p, int nbest,
    const std::set<char32_t> &strip_marks = NormRules::DefaultStripMarks());

struct LexiconStats {
  double homophone_rate = 0.0;
  size_t entries = 0;
  double avg_prons_per_word = 0.0;
};

// A word is a homophone when its best pronunciation equals the best
// pronunciation of at least one other word.
LexiconStats ComputeLexiconStats(const Prolex &prolex);

struct PhonemizeResult {
  std::vector<std::vector<std::string>> sequences;  // one per kept sentence
  std::vector<size_t> kept;                         // input indices
  std::vector<size_t> skipped;                      // sentences with OOV words
};

// Concatenates each word's best pronunciation.
PhonemizeResult PhonemizeCorpus(const std::vector<std::string> &sentences,
                                const Prolex &prolex);

// `word<TAB>unit unit ...[<TAB>weight]`, one pronunciation per line; the
// weight column is written only when non-zero.
Prolex ReadLexicon(const std::string &path);
void WriteLexicon(const std::string &path, const Prolex &prolex);

}  // namespace mlasr
