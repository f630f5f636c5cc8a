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

#include "mlasr/graph.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mlasr/error.h"

namespace mlasr {

std::shared_ptr<SymbolTable> MakeUnitSymbols(const Alphabet &alphabet) {
  auto syms = std::make_shared<SymbolTable>();
  for (const auto &s : alphabet.symbols()) syms->AddSymbol(s);
  return syms;
}

std::shared_ptr<SymbolTable> MakeWordSymbols(const std::vector<std::string> &words) {
  std::set<std::string> sorted(words.begin(), words.end());
  auto syms = std::make_shared<SymbolTable>();
  for (const auto &w : sorted)
    if (w != kSentenceStart && w != kSentenceEnd && w != kEpsilonSymbol)
      syms->AddSymbol(w);
  return syms;
}

Fst BuildCtcTopology(const Alphabet &alphabet,
                     std::shared_ptr<SymbolTable> unit_syms) {
  if (!unit_syms) unit_syms = MakeUnitSymbols(alphabet);
  if (unit_syms->Find(kBlankSymbol) != kBlankIndex + 1)
    Fail(ErrorCode::kInvalidArgument, "unit symbols must place the blank at label 1");
  Fst t(unit_syms, unit_syms);
  const int32_t n = alphabet.size();
  // State 0: after blank / at start. State k (1..n-1): last emitted unit k.
  for (int32_t s = 0; s < n; ++s) {
    t.AddState();
    t.SetFinal(s, 0.0);
  }
  t.SetStart(0);
  const int32_t blank = kBlankIndex + 1;
  for (int32_t s = 0; s < n; ++s) {
    t.AddArc(s, {blank, kEpsilon, 0.0, 0});
    for (int32_t k = 1; k < n; ++k) {
      int32_t label = unit_syms->Find(alphabet.SymbolAt(k));
      if (k == s)
        t.AddArc(s, {label, kEpsilon, 0.0, s});
      else
        t.AddArc(s, {label, label, 0.0, k});
    }
  }
  return t;
}

LexiconFst BuildLexiconFst(const Prolex &prolex,
                           std::shared_ptr<SymbolTable> unit_syms,
                           std::shared_ptr<SymbolTable> word_syms) {
  if (prolex.empty()) Fail(ErrorCode::kEmpty, "empty lexicon");
  // Disambiguation: duplicates and proper prefixes need a marker.
  std::map<std::vector<std::string>, int> pron_count;
  std::set<std::vector<std::string>> prefixes;
  for (const auto &[word, prons] : prolex.entries())
    for (const auto &p : prons) {
      ++pron_count[p.units];
      for (size_t k = 1; k < p.units.size(); ++k)
        prefixes.emplace(p.units.begin(), p.units.begin() + k);
    }

  auto isyms = std::make_shared<SymbolTable>(*unit_syms);
  LexiconFst out{Fst(isyms, word_syms), {}};
  Fst &l = out.fst;
  int32_t loop = l.AddState();
  l.SetStart(loop);
  l.SetFinal(loop, 0.0);

  std::map<std::vector<std::string>, int> next_disambig;
  int max_disambig = 0;
  struct Branch {
    const std::string *word;
    const Pronunciation *pron;
    int disambig;
  };
  std::vector<Branch> branches;
  for (const auto &[word, prons] : prolex.entries())
    for (const auto &p : prons) {
      int d = 0;
      if (pron_count[p.units] > 1 || prefixes.count(p.units))
        d = ++next_disambig[p.units];
      max_disambig = std::max(max_disambig, d);
      branches.push_back({&word, &p, d});
    }
  for (int k = 1; k <= max_disambig; ++k)
    out.disambig_labels.push_back(isyms->AddSymbol("#" + std::to_string(k)));

  for (const auto &b : branches) {
    int32_t word_label = word_syms->Find(*b.word);
    if (word_label <= 0)
      Fail(ErrorCode::kLookup, "word '" + *b.word + "' missing from word symbols");
    int32_t s = loop;
    const auto &units = b.pron->units;
    for (size_t i = 0; i < units.size(); ++i) {
      int32_t label = unit_syms->Find(units[i]);
      if (label <= kBlankIndex + 1)
        Fail(ErrorCode::kLookup, "unit '" + units[i] + "' of word '" + *b.word +
                                     "' not in the alphabet");
      bool last = i + 1 == units.size();
      int32_t dst = (last && b.disambig == 0) ? loop : l.AddState();
      l.AddArc(s, {label, i == 0 ? word_label : kEpsilon,
                   i == 0 ? b.pron->weight : 0.0, dst});
      s = dst;
    }
    if (b.disambig > 0)
      l.AddArc(s, {out.disambig_labels[b.disambig - 1], kEpsilon, 0.0, loop});
  }
  return out;
}

namespace {

constexpr double kLn10 = 2.302585092994045684;

}  // namespace

Fst NGramToFst(const NGramModel &model, std::shared_ptr<SymbolTable> word_syms) {
  Fst g(word_syms, word_syms);
  const int order = model.order();
  std::map<WordSequence, int32_t> state_of;
  auto add_state = [&](const WordSequence &ctx) {
    auto it = state_of.find(ctx);
    if (it != state_of.end()) return it->second;
    int32_t s = g.AddState();
    state_of.emplace(ctx, s);
    return s;
  };
  add_state({});
  for (const auto &[ng, e] : model.entries())
    if (static_cast<int>(ng.size()) < order && ng.back() != kSentenceEnd)
      add_state(ng);

  // Longest suffix of `seq` (at most order-1 words) that is a state.
  auto suffix_state = [&](const WordSequence &seq) {
    size_t max_len = std::min<size_t>(seq.size(), order > 1 ? order - 1 : 0);
    for (size_t len = max_len;; --len) {
      auto it = state_of.find(WordSequence(seq.end() - len, seq.end()));
      if (it != state_of.end()) return it->second;
      if (len == 0) break;
    }
    return state_of.at({});
  };

  auto start = state_of.find({kSentenceStart});
  g.SetStart(start != state_of.end() ? start->second : state_of.at({}));

  for (const auto &[ng, e] : model.entries()) {
    const std::string &w = ng.back();
    if (w == kSentenceStart) continue;
    WordSequence ctx(ng.begin(), ng.end() - 1);
    auto src_it = state_of.find(ctx);
    if (src_it == state_of.end()) continue;
    const double cost = -e.log10_prob * kLn10;
    if (w == kSentenceEnd) {
      g.SetFinal(src_it->second, cost);
      continue;
    }
    int32_t label = word_syms->Find(w);
    if (label <= 0) continue;
    g.AddArc(src_it->second, {label, label, cost, suffix_state(ng)});
  }

  for (const auto &[ctx, s] : state_of) {
    if (ctx.empty()) continue;
    const NGramEntry *e = model.Find(ctx);
    double bo = e ? -e->log10_backoff * kLn10 : 0.0;
    g.AddArc(s, {kEpsilon, kEpsilon, bo,
                 suffix_state(WordSequence(ctx.begin() + 1, ctx.end()))});
  }

  // Words known to the decoder but not to the LM use the <unk> unigram.
  const NGramEntry *unk = model.Find({kUnknownWord});
  if (unk) {
    int32_t uni = state_of.at({});
    for (int32_t label = 1; label < word_syms->size(); ++label) {
      const auto &w = word_syms->Symbol(label);
      if (model.Find({w})) continue;
      g.AddArc(uni, {label, label, -unk->log10_prob * kLn10, uni});
    }
  }
  return g;
}

double ScoreWithBackoffFailure(const Fst &g, const std::vector<std::string> &words) {
  if (g.Empty()) return kInfinity;
  int32_t s = g.Start();
  double cost = 0.0;
  auto step = [&](int32_t label) -> bool {
    for (;;) {
      const Arc *backoff = nullptr;
      for (const auto &arc : g.Arcs(s)) {
        if (label != kEpsilon && arc.ilabel == label) {
          cost += arc.weight;
          s = arc.nextstate;
          return true;
        }
        if (arc.ilabel == kEpsilon) backoff = &arc;
      }
      if (label == kEpsilon && g.IsFinal(s)) {
        cost += g.Final(s);
        return true;
      }
      if (!backoff) return false;
      cost += backoff->weight;
      s = backoff->nextstate;
    }
  };
  for (const auto &w : words) {
    int32_t label = g.input_symbols().Find(w);
    if (label <= 0) label = g.input_symbols().Find(kUnknownWord);
    if (label <= 0 || !step(label)) return kInfinity;
  }
  return step(kEpsilon) ? cost : kInfinity;
}

DecodeGraph BuildDecodeGraph(const Alphabet &alphabet, const Prolex &lexicon,
                             const NGramModel &lm) {
  std::vector<std::string> words = lm.Vocabulary();
  for (const auto &[w, prons] : lexicon.entries()) words.push_back(w);
  DecodeGraph graph;
  graph.unit_syms = MakeUnitSymbols(alphabet);
  graph.word_syms = MakeWordSymbols(words);
  LexiconFst l = BuildLexiconFst(lexicon, graph.unit_syms, graph.word_syms);
  Fst g = NGramToFst(lm, graph.word_syms);
  Fst lg = Compose(l.fst, g);
  RemoveInputLabels(lg, l.disambig_labels);
  Fst t = BuildCtcTopology(alphabet, graph.unit_syms);
  graph.fst = Compose(t, lg);
  return graph;
}

}  // namespace mlasr
