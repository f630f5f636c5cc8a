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

#include "mlasr/decoder.h"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "mlasr/error.h"
#include "mlasr/utf8.h"

namespace mlasr {

namespace {

struct Token {
  double cost = kInfinity;
  int32_t trace = -1;  // index into the word trace, -1 for none
};

struct TraceEntry {
  int32_t prev;
  int32_t word;
};

using TokenMap = std::unordered_map<int32_t, Token>;

class Search {
 public:
  Search(const Fst &graph, std::vector<int32_t> column_of)
      : graph_(graph), column_of_(std::move(column_of)) {}

  int32_t Extend(int32_t trace, int32_t olabel) {
    if (olabel == kEpsilon) return trace;
    traces_.push_back({trace, olabel});
    return static_cast<int32_t>(traces_.size()) - 1;
  }

  bool Relax(TokenMap &tokens, int32_t state, double cost, int32_t trace,
             int32_t olabel) {
    auto it = tokens.find(state);
    if (it != tokens.end() && it->second.cost <= cost) return false;
    tokens[state] = {cost, Extend(trace, olabel)};
    return true;
  }

  // Follows epsilon-input arcs until no token improves.
  void Closure(TokenMap &tokens) {
    std::deque<int32_t> queue;
    std::vector<int32_t> states;
    for (const auto &[s, tok] : tokens) states.push_back(s);
    std::sort(states.begin(), states.end());
    queue.assign(states.begin(), states.end());
    int64_t budget = 64 * (static_cast<int64_t>(graph_.NumStates()) + 16);
    while (!queue.empty()) {
      if (--budget < 0)
        Fail(ErrorCode::kStructure, "epsilon closure does not converge (negative cycle?)");
      int32_t s = queue.front();
      queue.pop_front();
      const Token tok = tokens.at(s);
      for (const auto &arc : graph_.Arcs(s)) {
        if (arc.ilabel != kEpsilon) continue;
        if (Relax(tokens, arc.nextstate, tok.cost + arc.weight, tok.trace, arc.olabel))
          queue.push_back(arc.nextstate);
      }
    }
  }

  std::vector<std::pair<int32_t, Token>> Prune(const TokenMap &tokens,
                                               const DecodeOptions &opt) const {
    std::vector<std::pair<int32_t, Token>> live(tokens.begin(), tokens.end());
    std::sort(live.begin(), live.end(), [](const auto &a, const auto &b) {
      if (a.second.cost != b.second.cost) return a.second.cost < b.second.cost;
      return a.first < b.first;
    });
    if (!live.empty() && opt.score_beam != kInfinity) {
      const double limit = live.front().second.cost + opt.score_beam;
      while (!live.empty() && live.back().second.cost > limit) live.pop_back();
    }
    if (static_cast<int64_t>(live.size()) > opt.beam) live.resize(opt.beam);
    std::sort(live.begin(), live.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    return live;
  }

  TokenMap Step(const std::vector<std::pair<int32_t, Token>> &live,
                const Eigen::Ref<const Eigen::RowVectorXd> &row, double scale) {
    TokenMap next;
    for (const auto &[s, tok] : live)
      for (const auto &arc : graph_.Arcs(s)) {
        if (arc.ilabel == kEpsilon) continue;
        double ac = -row(column_of_[arc.ilabel]) * scale;
        Relax(next, arc.nextstate, tok.cost + ac + arc.weight, tok.trace, arc.olabel);
      }
    Closure(next);
    return next;
  }

  std::vector<std::string> Words(int32_t trace) const {
    std::vector<std::string> out;
    for (; trace >= 0; trace = traces_[trace].prev)
      out.push_back(graph_.output_symbols().Symbol(traces_[trace].word));
    std::reverse(out.begin(), out.end());
    return out;
  }

 private:
  const Fst &graph_;
  std::vector<int32_t> column_of_;
  std::vector<TraceEntry> traces_;
};

}  // namespace

DecodeResult Decode(const PosteriorGrid &grid, const Fst &graph,
                    const Alphabet &alphabet, const DecodeOptions &options) {
  if (options.beam < 1) Fail(ErrorCode::kInvalidArgument, "beam must be >= 1");
  if (!(options.acoustic_scale > 0))
    Fail(ErrorCode::kInvalidArgument, "acoustic scale must be positive");
  if (grid.num_units() != alphabet.size())
    Fail(ErrorCode::kShape, "grid has " + std::to_string(grid.num_units()) +
                                " columns, alphabet has " +
                                std::to_string(alphabet.size()) + " units");
  if (graph.Empty()) Fail(ErrorCode::kDecodeFailure, "decode graph is empty");

  const SymbolTable &isyms = graph.input_symbols();
  std::vector<int32_t> column_of(isyms.size(), -1);
  for (int32_t l = 1; l < isyms.size(); ++l)
    if (alphabet.Contains(isyms.Symbol(l))) column_of[l] = alphabet.IndexOf(isyms.Symbol(l));
  for (int32_t s = 0; s < graph.NumStates(); ++s)
    for (const auto &arc : graph.Arcs(s))
      if (arc.ilabel != kEpsilon && column_of[arc.ilabel] < 0)
        Fail(ErrorCode::kLookup, "graph input symbol '" + isyms.Symbol(arc.ilabel) +
                                     "' is not in the alphabet");

  Search search(graph, std::move(column_of));
  TokenMap start;
  start[graph.Start()] = {0.0, -1};
  search.Closure(start);
  auto live = search.Prune(start, options);
  size_t last_active = live.size();
  int32_t t = 0;
  for (; t < grid.frames(); ++t) {
    TokenMap next = search.Step(live, grid.log_probs.row(t), options.acoustic_scale);
    live = search.Prune(next, options);
    if (live.empty()) break;
    last_active = live.size();
  }

  DecodeResult best;
  best.weight = kInfinity;
  int32_t best_trace = -1;
  int32_t best_state = kNoState;
  for (const auto &[s, tok] : live) {
    double w = tok.cost + graph.Final(s);
    if (w < best.weight || (w == best.weight && s < best_state)) {
      best.weight = w;
      best_trace = tok.trace;
      best_state = s;
    }
  }
  if (best_state == kNoState) {
    std::string partial;
    double partial_cost = kInfinity;
    for (const auto &[s, tok] : live)
      if (tok.cost < partial_cost) {
        partial_cost = tok.cost;
        partial = utf8::Join(search.Words(tok.trace), " ");
      }
    Fail(ErrorCode::kDecodeFailure,
         "no final token after frame " + std::to_string(t) + " of " +
             std::to_string(grid.frames()) + " (" + std::to_string(last_active) +
             " tokens were active; best partial: '" + partial + "')");
  }
  best.words = search.Words(best_trace);
  return best;
}

}  // namespace mlasr
