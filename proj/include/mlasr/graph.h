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

#include <memory>
#include <vector>

#include "mlasr/fst.h"
#include "mlasr/inventory.h"
#include "mlasr/lexicon.h"
#include "mlasr/ngram.h"

namespace mlasr {

// <eps> followed by the alphabet in index order: unit index k has label k+1.
std::shared_ptr<SymbolTable> MakeUnitSymbols(const Alphabet &alphabet);

// <eps> followed by `words` in code point order; <s> and </s> are skipped.
std::shared_ptr<SymbolTable> MakeWordSymbols(const std::vector<std::string> &words);

// CTC topology T over `unit_syms` (as made by MakeUnitSymbols). State 0 means
// "last frame was blank or nothing emitted yet"; state k+... means "last
// emitted unit". Blank and repeated units map to epsilon. Every state is
// final.
Fst BuildCtcTopology(const Alphabet &alphabet,
                     std::shared_ptr<SymbolTable> unit_syms = nullptr);

struct LexiconFst {
  Fst fst;
  std::vector<int32_t> disambig_labels;  // input labels of #1, #2, ...
};

// Lexicon transducer L: unit sequences -> words. One branch per
// pronunciation carrying its weight; the word is emitted on the first arc.
// Pronunciations that are duplicates or proper prefixes of other
// pronunciations end with a disambiguation symbol #k. The input table extends
// `unit_syms` with the disambiguation symbols.
LexiconFst BuildLexiconFst(const Prolex &prolex,
                           std::shared_ptr<SymbolTable> unit_syms,
                           std::shared_ptr<SymbolTable> word_syms);

// Backoff acceptor G: a state per context, word arcs weighted -ln P(w|h),
// epsilon backoff arcs weighted -ln backoff(h), final weights -ln P(</s>|h).
// Words of `word_syms` outside the model vocabulary score as <unk>.
Fst NGramToFst(const NGramModel &model, std::shared_ptr<SymbolTable> word_syms);

// Follows `words` through G using backoff arcs only when no direct word arc
// exists (failure semantics); returns the total cost, or +inf if the
// sentence cannot be read.
double ScoreWithBackoffFailure(const Fst &g, const std::vector<std::string> &words);

struct DecodeGraph {
  Fst fst;  // T o L o G with disambiguation symbols removed
  std::shared_ptr<SymbolTable> unit_syms;
  std::shared_ptr<SymbolTable> word_syms;
};

DecodeGraph BuildDecodeGraph(const Alphabet &alphabet, const Prolex &lexicon,
                             const NGramModel &lm);

}  // namespace mlasr
