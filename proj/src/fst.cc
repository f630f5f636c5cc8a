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

#include "mlasr/fst.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "mlasr/error.h"
#include "mlasr/utf8.h"

namespace mlasr {

SymbolTable::SymbolTable() { AddSymbol(kEpsilonSymbol); }

int32_t SymbolTable::AddSymbol(std::string_view symbol) {
  std::string key(symbol);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  int32_t label = size();
  index_.emplace(key, label);
  symbols_.push_back(std::move(key));
  return label;
}

int32_t SymbolTable::Find(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  return it == index_.end() ? -1 : it->second;
}

const std::string &SymbolTable::Symbol(int32_t label) const {
  if (label < 0 || label >= size())
    Fail(ErrorCode::kLookup, "label " + std::to_string(label) +
                                 " not in symbol table");
  return symbols_[label];
}

bool SymbolTable::CompatibleWith(const SymbolTable &other) const {
  size_t n = std::min(symbols_.size(), other.symbols_.size());
  return std::equal(symbols_.begin(), symbols_.begin() + n,
                    other.symbols_.begin());
}

double Plus(Semiring semiring, double a, double b) {
  if (semiring == Semiring::kTropical) return std::min(a, b);
  if (a == kInfinity) return b;
  if (b == kInfinity) return a;
  double lo = std::min(a, b), hi = std::max(a, b);
  return lo - std::log1p(std::exp(lo - hi));
}

Fst::Fst()
    : isyms_(std::make_shared<SymbolTable>()),
      osyms_(std::make_shared<SymbolTable>()) {}

Fst::Fst(std::shared_ptr<SymbolTable> isyms, std::shared_ptr<SymbolTable> osyms,
         Semiring semiring)
    : semiring_(semiring), isyms_(std::move(isyms)), osyms_(std::move(osyms)) {
  if (!isyms_ || !osyms_)
    Fail(ErrorCode::kInvalidArgument, "null symbol table");
}

int32_t Fst::AddState() {
  states_.emplace_back();
  return NumStates() - 1;
}

void Fst::SetStart(int32_t state) {
  if (state < 0 || state >= NumStates())
    Fail(ErrorCode::kStructure, "start state out of range");
  start_ = state;
}

void Fst::SetFinal(int32_t state, double weight) {
  if (state < 0 || state >= NumStates())
    Fail(ErrorCode::kStructure, "final state out of range");
  states_[state].final = weight;
}

void Fst::AddArc(int32_t state, const Arc &arc) {
  if (state < 0 || state >= NumStates())
    Fail(ErrorCode::kStructure, "arc source out of range");
  states_[state].arcs.push_back(arc);
}

int64_t Fst::NumArcs() const {
  int64_t n = 0;
  for (const auto &s : states_) n += static_cast<int64_t>(s.arcs.size());
  return n;
}

const std::vector<Arc> &Fst::Arcs(int32_t state) const {
  return states_.at(state).arcs;
}

std::vector<Arc> &Fst::MutableArcs(int32_t state) {
  return states_.at(state).arcs;
}

double Fst::Final(int32_t state) const { return states_.at(state).final; }

void Fst::Validate() const {
  if (states_.empty()) return;
  if (start_ < 0 || start_ >= NumStates())
    Fail(ErrorCode::kStructure, "missing start state");
  for (int32_t s = 0; s < NumStates(); ++s) {
    for (const auto &arc : states_[s].arcs) {
      if (arc.nextstate < 0 || arc.nextstate >= NumStates())
        Fail(ErrorCode::kStructure, "dangling arc target " +
                                        std::to_string(arc.nextstate) +
                                        " from state " + std::to_string(s));
      if (arc.ilabel < 0 || arc.ilabel >= isyms_->size() || arc.olabel < 0 ||
          arc.olabel >= osyms_->size())
        Fail(ErrorCode::kStructure,
             "arc label outside symbol table at state " + std::to_string(s));
      if (std::isnan(arc.weight))
        Fail(ErrorCode::kStructure, "NaN arc weight at state " + std::to_string(s));
    }
  }
}

Fst Compose(const Fst &a, const Fst &b) {
  if (a.semiring() != b.semiring())
    Fail(ErrorCode::kInvalidArgument, "compose: semiring mismatch");
  if (!a.output_symbols().CompatibleWith(b.input_symbols()))
    Fail(ErrorCode::kInvalidArgument,
         "compose: output symbols of the left machine do not match input "
         "symbols of the right machine");
  Fst out(a.shared_input_symbols(), b.shared_output_symbols(), a.semiring());
  if (a.Empty() || b.Empty()) return out;

  // Arcs of `b` grouped by input label, per state.
  std::vector<std::vector<int32_t>> b_sorted(b.NumStates());
  for (int32_t s = 0; s < b.NumStates(); ++s) {
    const auto &arcs = b.Arcs(s);
    auto &idx = b_sorted[s];
    idx.resize(arcs.size());
    for (size_t i = 0; i < arcs.size(); ++i) idx[i] = static_cast<int32_t>(i);
    std::stable_sort(idx.begin(), idx.end(), [&](int32_t x, int32_t y) {
      return arcs[x].ilabel < arcs[y].ilabel;
    });
  }

  using Tuple = std::tuple<int32_t, int32_t, int8_t>;
  std::map<Tuple, int32_t> ids;
  std::deque<Tuple> queue;
  auto get = [&](int32_t s1, int32_t s2, int8_t f) {
    Tuple key{s1, s2, f};
    auto it = ids.find(key);
    if (it != ids.end()) return it->second;
    int32_t id = out.AddState();
    ids.emplace(key, id);
    queue.push_back(key);
    return id;
  };
  out.SetStart(get(a.Start(), b.Start(), 0));

  while (!queue.empty()) {
    auto [s1, s2, f] = queue.front();
    queue.pop_front();
    int32_t src = ids.at({s1, s2, f});
    double fw = a.Final(s1) + b.Final(s2);
    if (fw != kInfinity) out.SetFinal(src, fw);

    const auto &barcs = b.Arcs(s2);
    const auto &bidx = b_sorted[s2];
    for (const auto &arc_a : a.Arcs(s1)) {
      if (arc_a.olabel == kEpsilon) {
        if (f == 2) continue;
        int32_t dst = get(arc_a.nextstate, s2, 1);
        out.AddArc(src, {arc_a.ilabel, kEpsilon, arc_a.weight, dst});
        continue;
      }
      auto lo = std::lower_bound(
          bidx.begin(), bidx.end(), arc_a.olabel,
          [&](int32_t i, int32_t label) { return barcs[i].ilabel < label; });
      for (auto it = lo; it != bidx.end() && barcs[*it].ilabel == arc_a.olabel;
           ++it) {
        const Arc &arc_b = barcs[*it];
        int32_t dst = get(arc_a.nextstate, arc_b.nextstate, 0);
        out.AddArc(src, {arc_a.ilabel, arc_b.olabel,
                         arc_a.weight + arc_b.weight, dst});
      }
    }
    for (int32_t i : bidx) {
      const Arc &arc_b = barcs[i];
      if (arc_b.ilabel != kEpsilon) break;
      int32_t dst = get(s1, arc_b.nextstate, 2);
      out.AddArc(src, {kEpsilon, arc_b.olabel, arc_b.weight, dst});
    }
  }
  Connect(out);
  return out;
}

void Connect(Fst &fst) {
  if (fst.Empty()) {
    fst = Fst(fst.shared_input_symbols(), fst.shared_output_symbols(),
              fst.semiring());
    return;
  }
  int32_t n = fst.NumStates();
  std::vector<char> access(n, 0), coaccess(n, 0);
  std::vector<int32_t> stack{fst.Start()};
  access[fst.Start()] = 1;
  std::vector<std::vector<int32_t>> reverse(n);
  while (!stack.empty()) {
    int32_t s = stack.back();
    stack.pop_back();
    for (const auto &arc : fst.Arcs(s)) {
      reverse[arc.nextstate].push_back(s);
      if (!access[arc.nextstate]) {
        access[arc.nextstate] = 1;
        stack.push_back(arc.nextstate);
      }
    }
  }
  for (int32_t s = 0; s < n; ++s)
    if (access[s] && fst.IsFinal(s)) {
      coaccess[s] = 1;
      stack.push_back(s);
    }
  while (!stack.empty()) {
    int32_t s = stack.back();
    stack.pop_back();
    for (int32_t p : reverse[s])
      if (!coaccess[p]) {
        coaccess[p] = 1;
        stack.push_back(p);
      }
  }
  Fst out(fst.shared_input_symbols(), fst.shared_output_symbols(),
          fst.semiring());
  if (!coaccess[fst.Start()]) {
    fst = std::move(out);
    return;
  }
  std::vector<int32_t> remap(n, kNoState);
  for (int32_t s = 0; s < n; ++s)
    if (access[s] && coaccess[s]) remap[s] = out.AddState();
  for (int32_t s = 0; s < n; ++s) {
    if (remap[s] == kNoState) continue;
    if (fst.IsFinal(s)) out.SetFinal(remap[s], fst.Final(s));
    for (Arc arc : fst.Arcs(s)) {
      if (remap[arc.nextstate] == kNoState) continue;
      arc.nextstate = remap[arc.nextstate];
      out.AddArc(remap[s], arc);
    }
  }
  out.SetStart(remap[fst.Start()]);
  fst = std::move(out);
}

void RemoveInputLabels(Fst &fst, const std::vector<int32_t> &labels) {
  if (labels.empty()) return;
  std::vector<int32_t> sorted(labels);
  std::sort(sorted.begin(), sorted.end());
  for (int32_t s = 0; s < fst.NumStates(); ++s)
    for (auto &arc : fst.MutableArcs(s))
      if (std::binary_search(sorted.begin(), sorted.end(), arc.ilabel))
        arc.ilabel = kEpsilon;
}

std::vector<double> ShortestDistance(const Fst &fst) {
  std::vector<double> dist(fst.NumStates(), kInfinity);
  if (fst.Empty()) return dist;
  std::vector<double> residual(fst.NumStates(), kInfinity);
  std::vector<char> queued(fst.NumStates(), 0);
  std::deque<int32_t> queue;
  dist[fst.Start()] = 0.0;
  residual[fst.Start()] = 0.0;
  queue.push_back(fst.Start());
  queued[fst.Start()] = 1;
  const Semiring sr = fst.semiring();
  constexpr double kDelta = 1e-12;
  // Guards against negative cycles; generous for acyclic or positive graphs.
  int64_t budget = 64 * (static_cast<int64_t>(fst.NumStates()) + fst.NumArcs()) + 1024;
  while (!queue.empty()) {
    if (--budget < 0)
      Fail(ErrorCode::kNumeric, "shortest distance did not converge");
    int32_t s = queue.front();
    queue.pop_front();
    queued[s] = 0;
    double r = residual[s];
    residual[s] = kInfinity;
    for (const auto &arc : fst.Arcs(s)) {
      double cand = r + arc.weight;
      double old = dist[arc.nextstate];
      double updated = Plus(sr, old, cand);
      bool changed = sr == Semiring::kTropical
                         ? updated < old
                         : (old == kInfinity ? updated != kInfinity
                                             : std::abs(updated - old) > kDelta);
      if (!changed) continue;
      dist[arc.nextstate] = updated;
      residual[arc.nextstate] = Plus(sr, residual[arc.nextstate], cand);
      if (!queued[arc.nextstate]) {
        queued[arc.nextstate] = 1;
        queue.push_back(arc.nextstate);
      }
    }
  }
  return dist;
}

double TotalWeight(const Fst &fst) {
  if (fst.Empty()) return kInfinity;
  auto dist = ShortestDistance(fst);
  double total = kInfinity;
  for (int32_t s = 0; s < fst.NumStates(); ++s)
    if (fst.IsFinal(s) && dist[s] != kInfinity)
      total = Plus(fst.semiring(), total, dist[s] + fst.Final(s));
  return total;
}

Fst LinearAcceptor(const std::vector<int32_t> &labels,
                   std::shared_ptr<SymbolTable> syms, Semiring semiring) {
  Fst fst(syms, syms, semiring);
  int32_t s = fst.AddState();
  fst.SetStart(s);
  for (int32_t label : labels) {
    int32_t n = fst.AddState();
    fst.AddArc(s, {label, label, 0.0, n});
    s = n;
  }
  fst.SetFinal(s, 0.0);
  return fst;
}

std::string FormatWeight(double w) {
  if (w == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), w);
  return std::string(buf, res.ptr);
}

void WriteFstText(const Fst &fst, std::ostream &out) {
  if (fst.Empty()) return;
  // State ids are permuted so that the start state is written as 0.
  int32_t start = fst.Start();
  auto id = [start](int32_t s) {
    if (s == start) return 0;
    if (s == 0) return start;
    return s;
  };
  std::vector<int32_t> order(fst.NumStates());
  for (int32_t s = 0; s < fst.NumStates(); ++s) order[id(s)] = s;
  const auto &isyms = fst.input_symbols();
  const auto &osyms = fst.output_symbols();
  for (int32_t s : order) {
    for (const auto &arc : fst.Arcs(s))
      out << id(s) << '\t' << id(arc.nextstate) << '\t'
          << isyms.Symbol(arc.ilabel) << '\t' << osyms.Symbol(arc.olabel)
          << '\t' << FormatWeight(arc.weight) << '\n';
    if (fst.IsFinal(s)) out << id(s) << '\t' << FormatWeight(fst.Final(s)) << '\n';
  }
}

void WriteFstText(const Fst &fst, const std::string &path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  WriteFstText(fst, out);
}

namespace {

int32_t ParseState(const std::string &s, const std::string &where) {
  int32_t v = -1;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || v < 0)
    Fail(ErrorCode::kFormat, where + ": bad state id '" + s + "'");
  return v;
}

double ParseWeight(const std::string &s, const std::string &where) {
  if (s == "inf" || s == "Infinity") return kInfinity;
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    Fail(ErrorCode::kFormat, where + ": bad weight '" + s + "'");
  return v;
}

std::vector<std::string> SplitFields(const std::string &line) {
  std::vector<std::string> fields;
  if (line.find('\t') != std::string::npos) {
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, '\t')) fields.push_back(f);
    if (!line.empty() && line.back() == '\t') fields.emplace_back();
    return fields;
  }
  return utf8::SplitWhitespace(line);
}

}  // namespace

Fst ReadFstText(std::istream &in, const std::string &source) {
  Fst fst;
  struct PendingArc {
    int32_t src;
    Arc arc;
  };
  std::vector<PendingArc> arcs;
  std::vector<std::pair<int32_t, double>> finals;
  int32_t max_state = -1;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string where = source + ":" + std::to_string(lineno);
    auto f = SplitFields(line);
    if (f.size() == 5 || f.size() == 4) {
      PendingArc p;
      p.src = ParseState(f[0], where);
      p.arc.nextstate = ParseState(f[1], where);
      p.arc.ilabel = fst.mutable_input_symbols().AddSymbol(f[2]);
      p.arc.olabel = fst.mutable_output_symbols().AddSymbol(f[3]);
      p.arc.weight = f.size() == 5 ? ParseWeight(f[4], where) : 0.0;
      max_state = std::max({max_state, p.src, p.arc.nextstate});
      arcs.push_back(p);
    } else if (f.size() == 2 || f.size() == 1) {
      int32_t s = ParseState(f[0], where);
      double w = f.size() == 2 ? ParseWeight(f[1], where) : 0.0;
      max_state = std::max(max_state, s);
      finals.emplace_back(s, w);
    } else {
      Fail(ErrorCode::kFormat, where + ": expected 1, 2, 4 or 5 fields");
    }
  }
  for (int32_t s = 0; s <= max_state; ++s) fst.AddState();
  if (max_state >= 0) fst.SetStart(0);
  for (const auto &p : arcs) fst.AddArc(p.src, p.arc);
  for (const auto &[s, w] : finals) fst.SetFinal(s, w);
  return fst;
}

Fst ReadFstText(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  return ReadFstText(in, path);
}

}  // namespace mlasr
