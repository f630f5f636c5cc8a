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
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mlasr {

inline constexpr std::string_view kEpsilonSymbol = "<eps>";
inline constexpr int32_t kEpsilon = 0;
inline constexpr int32_t kNoState = -1;
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// String <-> label table. Label 0 is always epsilon.
class SymbolTable {
 public:
  SymbolTable();

  // Returns the label of `symbol`, adding it if needed.
  int32_t AddSymbol(std::string_view symbol);
  // Returns -1 when absent.
  int32_t Find(std::string_view symbol) const;
  const std::string &Symbol(int32_t label) const;
  int32_t size() const { return static_cast<int32_t>(symbols_.size()); }

  // True if the shorter table is a prefix of the longer one, i.e. every
  // label defined in both tables names the same symbol.
  bool CompatibleWith(const SymbolTable &other) const;

  bool operator==(const SymbolTable &other) const {
    return symbols_ == other.symbols_;
  }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int32_t> index_;
};

enum class Semiring { kTropical, kLog };

// Semiring addition; multiplication is real addition in both semirings.
double Plus(Semiring semiring, double a, double b);

struct Arc {
  int32_t ilabel = 0;
  int32_t olabel = 0;
  double weight = 0.0;
  int32_t nextstate = 0;
};

// Mutable vector-backed weighted transducer. Weights are costs (negated log
// probabilities); a non-final state has final weight +inf.
class Fst {
 public:
  Fst();
  Fst(std::shared_ptr<SymbolTable> isyms, std::shared_ptr<SymbolTable> osyms,
      Semiring semiring = Semiring::kTropical);

  int32_t AddState();
  void SetStart(int32_t state);
  void SetFinal(int32_t state, double weight);
  void AddArc(int32_t state, const Arc &arc);

  int32_t Start() const { return start_; }
  int32_t NumStates() const { return static_cast<int32_t>(states_.size()); }
  int64_t NumArcs() const;
  const std::vector<Arc> &Arcs(int32_t state) const;
  std::vector<Arc> &MutableArcs(int32_t state);
  double Final(int32_t state) const;
  bool IsFinal(int32_t state) const { return Final(state) != kInfinity; }
  bool Empty() const { return states_.empty() || start_ == kNoState; }

  Semiring semiring() const { return semiring_; }
  void set_semiring(Semiring s) { semiring_ = s; }

  const SymbolTable &input_symbols() const { return *isyms_; }
  const SymbolTable &output_symbols() const { return *osyms_; }
  SymbolTable &mutable_input_symbols() { return *isyms_; }
  SymbolTable &mutable_output_symbols() { return *osyms_; }
  std::shared_ptr<SymbolTable> shared_input_symbols() const { return isyms_; }
  std::shared_ptr<SymbolTable> shared_output_symbols() const { return osyms_; }

  // Throws kStructure on a missing start state, dangling arc targets or
  // labels outside the symbol tables.
  void Validate() const;

 private:
  struct State {
    std::vector<Arc> arcs;
    double final = kInfinity;
  };
  std::vector<State> states_;
  int32_t start_ = kNoState;
  Semiring semiring_ = Semiring::kTropical;
  std::shared_ptr<SymbolTable> isyms_;
  std::shared_ptr<SymbolTable> osyms_;
};

// Composition with an epsilon-sequencing filter: between two matched
// transitions, epsilon moves of `a` come before epsilon moves of `b`, so each
// pair of component paths yields exactly one composed path. The result is
// trimmed. Throws kInvalidArgument on incompatible symbol tables or
// semirings.
Fst Compose(const Fst &a, const Fst &b);

// Removes states that are not both accessible and coaccessible.
void Connect(Fst &fst);

// Replaces every input label in `labels` by epsilon.
void RemoveInputLabels(Fst &fst, const std::vector<int32_t> &labels);

// Single-source shortest distance from the start state (generic queue
// relaxation; handles negative weights in the absence of negative cycles).
std::vector<double> ShortestDistance(const Fst &fst);

// Semiring sum over all successful paths.
double TotalWeight(const Fst &fst);

// Linear acceptor over `labels`, sharing `syms` on both sides.
Fst LinearAcceptor(const std::vector<int32_t> &labels,
                   std::shared_ptr<SymbolTable> syms,
                   Semiring semiring = Semiring::kTropical);

// Text format: `src\tdst\tisym\tosym\tweight` per arc and `state\tweight`
// per final state; state 0 is the start state. Arcs of a state precede its
// final line; states are written in increasing order.
void WriteFstText(const Fst &fst, std::ostream &out);
void WriteFstText(const Fst &fst, const std::string &path);
Fst ReadFstText(std::istream &in, const std::string &source = "<stream>");
Fst ReadFstText(const std::string &path);

// Shortest round-trip decimal representation.
std::string FormatWeight(double w);

}  // namespace mlasr
