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
#include <string_view>
#include <vector>

#include "mlasr/ctc.h"
#include "mlasr/fst.h"
#include "mlasr/inventory.h"
#include "mlasr/lexicon.h"

namespace mlasr {

// Independent RNG stream for a named component of a seeded run.
uint64_t DeriveSeed(uint64_t root, std::string_view tag);

// Desk-scale stand-in for a multilingual speech corpus. Every universal
// phoneme owns a Gaussian feature prototype shared by all languages; an
// utterance is the concatenation of its phonemes' prototype frames, with
// optional silence between words, plus noise.
struct SyntheticWorldConfig {
  uint64_t seed = 7;
  int universal_inventory_size = 40;
  int num_seen_languages = 6;
  int num_unseen = 2;
  // Phonemes outside the universal set given to each unseen language.
  int unseen_novel_units = 2;
  // Universal phonemes every language has; the rest are drawn at random.
  int shared_core = 6;
  int inventory_min = 16;
  int inventory_max = 22;
  int lexicon_min = 60;
  int lexicon_max = 90;
  int word_length_min = 2;
  int word_length_max = 5;
  int sentence_length_min = 1;
  int sentence_length_max = 4;
  // Per seen language, most to least resourced; the last value repeats.
  std::vector<int> seen_utterances{400, 250, 160, 110, 70, 50};
  int unseen_utterances = 320;
  int frames_min = 2;
  int frames_max = 5;
  // Silence frames between consecutive words.
  int pause_min = 1;
  int pause_max = 2;
  int feature_dim = 80;
  double prototype_std = 1.0;
  double noise_std = 2.0;
  // Std of a per-language offset added to every frame (channel/accent cue).
  double language_offset_std = 0.5;
  // Chance that a language spells a phoneme with its world-wide letter.
  double orthography_consistency = 0.7;
  double homophone_rate = 0.1;
  double g2p_alternative_rate = 0.2;
  double g2p_alternative_weight = 2.5;
  int lexicon_nbest = 2;
  double train_fraction = 0.8;
  double dev_fraction = 0.1;

  // Throws kConfig on empty ranges or impossible sizes.
  void Validate() const;
  std::string ToJson() const;
  static SyntheticWorldConfig FromJson(const std::string &json_text);
};

inline const std::vector<std::string> kSplits{"train", "dev", "test"};

// Writes world.json and lang-<code>/{inventory.txt, g2p.fst.txt,
// lexicon.tsv, text.{train,dev,test}.txt, feats.{train,dev,test}.bin}.
// Seen languages are s1.. (decreasing data), unseen ones u1...
void GenerateWorld(const SyntheticWorldConfig &config, const std::string &dir);

struct WorldUtterance {
  std::string text;
  Matrix features;
};

struct LanguageData {
  std::string code;
  bool seen = true;
  LanguageInventory inventory;
  Fst g2p;
  Prolex lexicon;
  std::map<std::string, std::vector<WorldUtterance>> splits;
};

struct WorldInfo {
  std::string dir;
  SyntheticWorldConfig config;
  std::vector<std::string> seen;
  std::vector<std::string> unseen;
};

// Throws kIo / kFormat with the offending path on missing or bad files.
WorldInfo OpenWorld(const std::string &dir);
LanguageData LoadLanguage(const WorldInfo &world, const std::string &code);

}  // namespace mlasr
