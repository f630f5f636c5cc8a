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

#include "mlasr/lexicon.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "mlasr/error.h"
#include "mlasr/utf8.h"

namespace mlasr {

void Prolex::Add(const std::string &word, Pronunciation pron) {
  if (word.empty() || pron.units.empty())
    Fail(ErrorCode::kInvalidArgument, "empty word or pronunciation");
  if (!std::isfinite(pron.weight) || pron.weight < 0)
    Fail(ErrorCode::kInvalidArgument,
         "pronunciation weight of '" + word + "' must be finite and >= 0");
  auto &prons = entries_[word];
  for (auto it = prons.begin(); it != prons.end(); ++it) {
    if (it->units == pron.units) {
      if (it->weight <= pron.weight) return;
      prons.erase(it);
      break;
    }
  }
  auto pos = std::upper_bound(
      prons.begin(), prons.end(), pron.weight,
      [](double w, const Pronunciation &p) { return w < p.weight; });
  prons.insert(pos, std::move(pron));
}

const std::vector<Pronunciation> &Prolex::Prons(const std::string &word) const {
  auto it = entries_.find(word);
  if (it == entries_.end())
    Fail(ErrorCode::kLookup, "word '" + word + "' not in lexicon");
  return it->second;
}

const Pronunciation &Prolex::Best(const std::string &word) const {
  return Prons(word).front();
}

void Prolex::CheckUnits(const std::set<std::string> &inventory) const {
  for (const auto &[word, prons] : entries_)
    for (const auto &p : prons)
      for (const auto &u : p.units)
        if (!inventory.count(u))
          Fail(ErrorCode::kInvalidArgument,
               "unit '" + u + "' of word '" + word + "' not in inventory");
}

std::set<std::string> Prolex::UnitSet() const {
  std::set<std::string> out;
  for (const auto &[word, prons] : entries_)
    for (const auto &p : prons) out.insert(p.units.begin(), p.units.end());
  return out;
}

std::vector<Pronunciation> ApplyG2p(const Fst &g2p, const std::string &word,
                                    int nbest,
                                    const std::set<char32_t> &strip_marks) {
  g2p.Validate();
  if (word.empty()) Fail(ErrorCode::kInvalidArgument, "empty word");
  if (nbest < 1) Fail(ErrorCode::kInvalidArgument, "nbest must be >= 1");
  std::vector<Pronunciation> results;
  if (g2p.Empty()) return results;
  for (int32_t s = 0; s < g2p.NumStates(); ++s)
    for (const auto &arc : g2p.Arcs(s))
      if (arc.weight < 0)
        Fail(ErrorCode::kInvalidArgument, "G2P arc weights must be non-negative");

  std::vector<int32_t> input;
  for (const auto &g : utf8::SplitCodepoints(word)) {
    int32_t label = g2p.input_symbols().Find(g);
    if (label <= 0) return results;
    input.push_back(label);
  }

  // Output symbol -> stripped form, computed once per label.
  std::unordered_map<int32_t, std::string> stripped;
  auto strip = [&](int32_t label) -> const std::string & {
    auto it = stripped.find(label);
    if (it == stripped.end())
      it = stripped
               .emplace(label, label == kEpsilon
                                   ? std::string()
                                   : StripMarks(g2p.output_symbols().Symbol(label),
                                                strip_marks))
               .first;
    return it->second;
  };

  // Best-first search over (position, state) with output back-pointers.
  struct Node {
    int32_t parent;
    int32_t olabel;
    size_t pos;
    int32_t state;
    double cost;
  };
  std::vector<Node> nodes;
  using Entry = std::pair<double, int32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  const size_t n = input.size();
  const int pop_limit = 4 * nbest + 16;
  std::vector<std::unordered_map<int32_t, int>> pops(n + 1);
  std::set<std::vector<std::string>> seen;

  nodes.push_back({-1, kEpsilon, 0, g2p.Start(), 0.0});
  heap.emplace(0.0, 0);
  int64_t budget = 1'000'000;
  while (!heap.empty() && static_cast<int>(results.size()) < nbest &&
         --budget > 0) {
    auto [cost, id] = heap.top();
    heap.pop();
    Node node = nodes[id];
    if (node.olabel == -2) {
      // Completed path: collect outputs.
      std::vector<std::string> units;
      for (int32_t k = node.parent; k >= 0; k = nodes[k].parent) {
        const auto &sym = strip(nodes[k].olabel);
        if (!sym.empty()) units.push_back(sym);
      }
      std::reverse(units.begin(), units.end());
      if (units.empty() || !seen.insert(units).second) continue;
      results.push_back({std::move(units), cost});
      continue;
    }
    if (++pops[node.pos][node.state] > pop_limit) continue;
    if (node.pos == n && g2p.IsFinal(node.state)) {
      nodes.push_back({id, -2, n, node.state, cost + g2p.Final(node.state)});
      heap.emplace(nodes.back().cost, static_cast<int32_t>(nodes.size() - 1));
    }
    for (const auto &arc : g2p.Arcs(node.state)) {
      size_t next_pos = node.pos;
      if (arc.ilabel != kEpsilon) {
        if (node.pos == n || arc.ilabel != input[node.pos]) continue;
        ++next_pos;
      }
      nodes.push_back({id, arc.olabel, next_pos, arc.nextstate,
                       cost + arc.weight});
      heap.emplace(nodes.back().cost, static_cast<int32_t>(nodes.size() - 1));
    }
  }
  return results;
}

ProlexBuildResult BuildProlex(const std::vector<std::string> &words,
                              const Fst &g2p, int nbest,
                              const std::set<char32_t> &strip_marks) {
  ProlexBuildResult out;
  std::set<std::string> done;
  for (const auto &w : words) {
    if (!done.insert(w).second) continue;
    auto prons = ApplyG2p(g2p, w, nbest, strip_marks);
    if (prons.empty()) {
      out.unpronounceable.push_back(w);
      continue;
    }
    for (auto &p : prons) out.prolex.Add(w, std::move(p));
  }
  if (out.prolex.empty())
    Fail(ErrorCode::kEmpty, "no word received a pronunciation");
  return out;
}

LexiconStats ComputeLexiconStats(const Prolex &prolex) {
  if (prolex.empty()) Fail(ErrorCode::kEmpty, "empty lexicon");
  std::map<std::vector<std::string>, size_t> best_counts;
  size_t prons = 0;
  for (const auto &[word, list] : prolex.entries()) {
    ++best_counts[list.front().units];
    prons += list.size();
  }
  size_t homophones = 0;
  for (const auto &[word, list] : prolex.entries())
    if (best_counts[list.front().units] > 1) ++homophones;
  LexiconStats stats;
  stats.entries = prolex.size();
  stats.homophone_rate = static_cast<double>(homophones) / prolex.size();
  stats.avg_prons_per_word = static_cast<double>(prons) / prolex.size();
  return stats;
}

PhonemizeResult PhonemizeCorpus(const std::vector<std::string> &sentences,
                                const Prolex &prolex) {
  PhonemizeResult out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    std::vector<std::string> seq;
    bool ok = true;
    for (const auto &w : utf8::SplitWhitespace(sentences[i])) {
      if (!prolex.Contains(w)) {
        ok = false;
        break;
      }
      const auto &units = prolex.Best(w).units;
      seq.insert(seq.end(), units.begin(), units.end());
    }
    if (!ok) {
      out.skipped.push_back(i);
      continue;
    }
    out.kept.push_back(i);
    out.sequences.push_back(std::move(seq));
  }
  return out;
}

Prolex ReadLexicon(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  Prolex lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string where = path + ":" + std::to_string(lineno);
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, '\t')) cols.push_back(c);
    if (cols.size() < 2 || cols.size() > 3)
      Fail(ErrorCode::kFormat, where + ": expected word<TAB>units[<TAB>weight]");
    Pronunciation p;
    p.units = utf8::SplitWhitespace(cols[1]);
    if (cols.size() == 3) {
      auto res = std::from_chars(cols[2].data(), cols[2].data() + cols[2].size(),
                                 p.weight);
      if (res.ec != std::errc())
        Fail(ErrorCode::kFormat, where + ": bad weight");
    }
    if (cols[0].empty() || p.units.empty())
      Fail(ErrorCode::kFormat, where + ": empty word or pronunciation");
    lex.Add(cols[0], std::move(p));
  }
  return lex;
}

void WriteLexicon(const std::string &path, const Prolex &prolex) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  for (const auto &[word, prons] : prolex.entries())
    for (const auto &p : prons) {
      out << word << '\t' << utf8::Join(p.units, " ");
      if (p.weight != 0.0) out << '\t' << FormatWeight(p.weight);
      out << '\n';
    }
}

}  // namespace mlasr
