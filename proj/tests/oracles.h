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

// Brute-force reference implementations used by unit and acceptance tests.
// Everything here enumerates; nothing shares code with the library
// algorithms it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mlasr/ctc.h"
#include "mlasr/fst.h"
#include "mlasr/lexicon.h"
#include "mlasr/ngram.h"

namespace mlasr::oracle {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Calls f(path) for every sequence of length T over [0, V).
inline void ForEachPath(int T, int V, const std::function<void(const std::vector<int32_t> &)> &f) {
  std::vector<int32_t> path(T, 0);
  for (;;) {
    f(path);
    int i = T - 1;
    while (i >= 0 && path[i] == V - 1) path[i--] = 0;
    if (i < 0) return;
    ++path[i];
  }
}

inline std::vector<int32_t> Collapse(const std::vector<int32_t> &path) {
  std::vector<int32_t> out;
  for (size_t t = 0; t < path.size(); ++t)
    if (path[t] != 0 && (t == 0 || path[t] != path[t - 1])) out.push_back(path[t]);
  return out;
}

inline double PathLogProb(const PosteriorGrid &g, const std::vector<int32_t> &path) {
  double s = 0.0;
  for (size_t t = 0; t < path.size(); ++t) s += g.log_probs(t, path[t]);
  return s;
}

// -log sum over all frame paths collapsing to `labels`.
inline double CtcLossBrute(const PosteriorGrid &g, const std::vector<int32_t> &labels) {
  double total = 0.0;
  ForEachPath(g.frames(), g.num_units(), [&](const std::vector<int32_t> &p) {
    if (Collapse(p) == labels) total += std::exp(PathLogProb(g, p));
  });
  return -std::log(total);
}

// Collapsed label sequence -> total probability.
inline std::map<std::vector<int32_t>, double> Marginals(const PosteriorGrid &g) {
  std::map<std::vector<int32_t>, double> m;
  ForEachPath(g.frames(), g.num_units(), [&](const std::vector<int32_t> &p) {
    m[Collapse(p)] += std::exp(PathLogProb(g, p));
  });
  return m;
}

inline PosteriorGrid RandomGrid(std::mt19937_64 &rng, int T, int V, double spread = 2.0) {
  std::normal_distribution<double> n(0.0, spread);
  Matrix z(T, V);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < V; ++k) z(t, k) = n(rng);
  return PosteriorGrid::FromLogits(z);
}

// Plain recursive Levenshtein distance.
template <typename Seq>
int EditDistanceRecursive(const Seq &a, size_t i, const Seq &b, size_t j) {
  if (i == a.size()) return static_cast<int>(b.size() - j);
  if (j == b.size()) return static_cast<int>(a.size() - i);
  int best = 1 + std::min(EditDistanceRecursive(a, i + 1, b, j),
                          EditDistanceRecursive(a, i, b, j + 1));
  int diag = (a[i] == b[j] ? 0 : 1) + EditDistanceRecursive(a, i + 1, b, j + 1);
  return std::min(best, diag);
}

struct LabeledPath {
  std::vector<int32_t> in;
  std::vector<int32_t> out;
  double weight;
};

// All successful paths of an acyclic machine, epsilons dropped from the
// label strings.
inline std::vector<LabeledPath> EnumeratePaths(const Fst &f, size_t max_paths = 200000) {
  std::vector<LabeledPath> out;
  if (f.Empty()) return out;
  std::function<void(int32_t, LabeledPath &, int)> walk = [&](int32_t s, LabeledPath &p,
                                                             int depth) {
    if (depth > 64 || out.size() > max_paths) return;
    if (f.IsFinal(s)) out.push_back({p.in, p.out, p.weight + f.Final(s)});
    for (const auto &arc : f.Arcs(s)) {
      LabeledPath q = p;
      if (arc.ilabel) q.in.push_back(arc.ilabel);
      if (arc.olabel) q.out.push_back(arc.olabel);
      q.weight += arc.weight;
      walk(arc.nextstate, q, depth + 1);
    }
  };
  LabeledPath empty{{}, {}, 0.0};
  walk(f.Start(), empty, 0);
  return out;
}

// Random acyclic machine: arcs only go to higher-numbered states.
inline Fst RandomAcyclicFst(std::mt19937_64 &rng, std::shared_ptr<SymbolTable> isyms,
                            std::shared_ptr<SymbolTable> osyms, int num_states,
                            double eps_rate) {
  Fst f(isyms, osyms);
  for (int i = 0; i < num_states; ++i) f.AddState();
  f.SetStart(0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> ni(1, isyms->size() - 1), no(1, osyms->size() - 1);
  for (int s = 0; s + 1 < num_states; ++s) {
    int arcs = 1 + static_cast<int>(u(rng) * 3);
    for (int k = 0; k < arcs; ++k) {
      int dst = s + 1 + static_cast<int>(u(rng) * (num_states - s - 1));
      int32_t il = u(rng) < eps_rate ? 0 : ni(rng);
      int32_t ol = u(rng) < eps_rate ? 0 : no(rng);
      f.AddArc(s, {il, ol, std::round(u(rng) * 100) / 10.0, dst});
    }
  }
  f.SetFinal(num_states - 1, 0.5);
  if (num_states > 2 && u(rng) < 0.5) f.SetFinal(num_states / 2, 0.25);
  return f;
}

// Min-cost language model score of `words` when backoff may be taken at
// any point (the epsilon reading of a backoff acceptor), natural-log costs.
inline double LmMinCost(const NGramModel &lm, const std::vector<std::string> &words) {
  const double ln10 = std::log(10.0);
  const int keep = std::max(lm.order() - 1, 0);
  auto is_context = [&](const WordSequence &h) {
    if (h.empty()) return true;
    if (static_cast<int>(h.size()) > keep || h.back() == kSentenceEnd) return false;
    return lm.Find(h) != nullptr;
  };
  auto reduce = [&](WordSequence h) {
    while (static_cast<int>(h.size()) > keep) h.erase(h.begin());
    while (!is_context(h)) h.erase(h.begin());
    return h;
  };
  auto known = [&](const std::string &w) { return lm.Find({w}) != nullptr; };
  std::function<double(const WordSequence &, size_t)> rec = [&](const WordSequence &h,
                                                               size_t i) -> double {
    const bool end = i == words.size();
    const std::string w = end ? std::string(kSentenceEnd) : words[i];
    double best = kInf;
    double backoff = 0.0;
    for (size_t k = h.size() + 1; k-- > 0;) {
      WordSequence ctx(h.end() - k, h.end());
      if (k < h.size()) {
        WordSequence from(h.end() - (k + 1), h.end());
        const NGramEntry *e = lm.Find(from);
        backoff += e ? -e->log10_backoff * ln10 : 0.0;
      }
      if (!is_context(ctx)) continue;
      WordSequence ng = ctx;
      double cost;
      if (!end && !known(w)) {
        if (k != 0) continue;
        const NGramEntry *unk = lm.Find({kUnknownWord});
        if (!unk) continue;
        cost = -unk->log10_prob * ln10;
        ng.push_back(w);
      } else {
        ng.push_back(w);
        const NGramEntry *e = lm.Find(ng);
        if (!e) continue;
        cost = -e->log10_prob * ln10;
      }
      double total = backoff + cost;
      if (!end) total += rec(reduce(ng), i + 1);
      best = std::min(best, total);
    }
    return best;
  };
  WordSequence start;
  if (lm.Find({kSentenceStart})) start = reduce({kSentenceStart});
  return rec(start, 0);
}

struct DecodeOracleResult {
  double weight = kInf;
  std::vector<std::string> words;
};

// Exhaustive decode: every frame path, every segmentation of its collapse
// into lexicon pronunciations, every backoff choice of the LM.
inline DecodeOracleResult DecodeBrute(const PosteriorGrid &g, const Alphabet &alphabet,
                                      const Prolex &lex, const NGramModel &lm,
                                      double acoustic_scale = 1.0) {
  DecodeOracleResult best;
  std::map<std::vector<int32_t>, double> best_acoustic;
  ForEachPath(g.frames(), g.num_units(), [&](const std::vector<int32_t> &p) {
    double ac = -acoustic_scale * PathLogProb(g, p);
    auto c = Collapse(p);
    auto it = best_acoustic.find(c);
    if (it == best_acoustic.end() || ac < it->second) best_acoustic[c] = ac;
  });
  for (const auto &[units, ac] : best_acoustic) {
    std::vector<std::string> symbols;
    for (int32_t u : units) symbols.push_back(alphabet.SymbolAt(u));
    std::vector<std::string> words;
    std::function<void(size_t, double)> seg = [&](size_t pos, double pron_cost) {
      if (pos == symbols.size()) {
        if (words.empty()) return;
        double total = ac + pron_cost + LmMinCost(lm, words);
        if (total < best.weight) {
          best.weight = total;
          best.words = words;
        }
        return;
      }
      for (const auto &[w, prons] : lex.entries())
        for (const auto &pr : prons) {
          if (pos + pr.units.size() > symbols.size()) continue;
          if (!std::equal(pr.units.begin(), pr.units.end(), symbols.begin() + pos)) continue;
          words.push_back(w);
          seg(pos + pr.units.size(), pron_cost + pr.weight);
          words.pop_back();
        }
    };
    if (symbols.empty()) {
      double total = ac + LmMinCost(lm, {});
      if (total < best.weight) {
        best.weight = total;
        best.words.clear();
      }
    } else {
      seg(0, 0.0);
    }
  }
  return best;
}

}  // namespace mlasr::oracle
