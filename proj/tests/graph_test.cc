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

#include <random>

#include "doctest.h"
#include "mlasr/decoder.h"
#include "mlasr/error.h"
#include "mlasr/graph.h"
#include "oracles.h"
#include "toy_world.h"

using namespace mlasr;

namespace {

// Output of T for a frame-level path, or nullopt if T rejects it.
std::vector<int32_t> ApplyTopology(const Fst &t, const std::vector<int32_t> &labels) {
  Fst in = LinearAcceptor(labels, t.shared_input_symbols());
  auto paths = oracle::EnumeratePaths(Compose(in, t));
  REQUIRE(paths.size() == 1);
  return paths[0].out;
}

PosteriorGrid Peaked(const Alphabet &a, const std::vector<std::string> &frames,
                     double p = 0.9) {
  PosteriorGrid g;
  g.log_probs = Matrix::Constant(frames.size(), a.size(),
                                 std::log((1 - p) / (a.size() - 1)));
  for (size_t t = 0; t < frames.size(); ++t) g.log_probs(t, a.IndexOf(frames[t])) = std::log(p);
  return g;
}

NGramModel UniformLm(const std::vector<std::string> &words) {
  NGramModel lm(1);
  double p = 1.0 / (words.size() + 2);
  for (const auto &w : words) lm.mutable_entries()[{w}].log10_prob = std::log10(p);
  lm.mutable_entries()[{kSentenceEnd}].log10_prob = std::log10(p);
  lm.mutable_entries()[{kUnknownWord}].log10_prob = std::log10(p);
  return lm;
}

}  // namespace

TEST_CASE("topology collapses like the greedy rule") {
  Alphabet a(UnitKind::kPhoneme, {"a", "b"});
  Fst t = BuildCtcTopology(a);
  auto lab = [&](const std::string &s) { return t.input_symbols().Find(s); };
  CHECK(ApplyTopology(t, {lab("a"), lab("a"), lab("<b>"), lab("a")}) ==
        std::vector<int32_t>{lab("a"), lab("a")});
  CHECK(ApplyTopology(t, {lab("<b>"), lab("<b>")}).empty());
  CHECK(ApplyTopology(t, {lab("a"), lab("<b>"), lab("b")}) ==
        std::vector<int32_t>{lab("a"), lab("b")});
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<int32_t> path(1 + rng() % 8);
    for (auto &k : path) k = static_cast<int32_t>(rng() % 3);
    std::vector<int32_t> labels;
    for (int32_t k : path) labels.push_back(k + 1);
    std::vector<int32_t> expected;
    for (int32_t k : CollapsePath(path)) expected.push_back(k + 1);
    CHECK(ApplyTopology(t, labels) == expected);
  }
}

TEST_CASE("lexicon single entry") {
  Alphabet a(UnitKind::kPhoneme, {"n", "w", "ʌ"});
  Prolex lex;
  lex.Add("one", {{"w", "ʌ", "n"}, 0.0});
  auto units = MakeUnitSymbols(a);
  auto words = MakeWordSymbols({"one"});
  auto l = BuildLexiconFst(lex, units, words);
  CHECK(l.disambig_labels.empty());
  Fst in = LinearAcceptor({units->Find("w"), units->Find("ʌ"), units->Find("n")},
                          l.fst.shared_input_symbols());
  auto paths = oracle::EnumeratePaths(Compose(in, l.fst));
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].out == std::vector<int32_t>{words->Find("one")});
  CHECK_THROWS_AS(BuildLexiconFst(Prolex(), units, words), Error);
}

TEST_CASE("homophones and prefixes get disambiguation symbols") {
  Alphabet a(UnitKind::kPhoneme, {"g", "l", "o", "x"});
  Prolex lex;
  lex.Add("a", {{"x"}, 0.0});
  lex.Add("b", {{"x"}, 0.0});
  lex.Add("go", {{"g", "o"}, 0.0});
  lex.Add("goal", {{"g", "o", "l"}, 0.0});
  auto l = BuildLexiconFst(lex, MakeUnitSymbols(a), MakeWordSymbols({"a", "b", "go", "goal"}));
  CHECK(l.disambig_labels.size() == 2);
  CHECK(l.fst.input_symbols().Symbol(l.disambig_labels[0]) == "#1");
  auto g = BuildDecodeGraph(a, lex, UniformLm({"a", "b", "go", "goal"}));
  for (auto frames : {std::vector<std::string>{"x"}, {"g", "o"}, {"g", "o", "l"},
                      {"g", "o", "<b>", "g", "o", "l"}}) {
    auto r = Decode(Peaked(a, frames), g.fst, a, {kUnlimitedBeam});
    CHECK(!r.words.empty());
  }
  auto r = Decode(Peaked(a, {"g", "o", "l"}), g.fst, a);
  CHECK(r.words == std::vector<std::string>{"goal"});
}

TEST_CASE("single word decode") {
  Alphabet a(UnitKind::kPhoneme, {"t", "u"});
  Prolex lex;
  lex.Add("two", {{"t", "u"}, 0.0});
  auto g = BuildDecodeGraph(a, lex, UniformLm({"two"}));
  auto r = Decode(Peaked(a, {"t", "t", "u", "<b>"}), g.fst, a);
  CHECK(r.words == std::vector<std::string>{"two"});
}

TEST_CASE("two word lexicon matches exhaustive scoring") {
  Alphabet a(UnitKind::kPhoneme, {"n", "t", "u", "w", "ʌ"});
  Prolex lex;
  lex.Add("one", {{"w", "ʌ", "n"}, 0.0});
  lex.Add("two", {{"t", "u"}, 0.0});
  auto lm = UniformLm({"one", "two"});
  auto g = BuildDecodeGraph(a, lex, lm);
  auto grid = Peaked(a, {"t", "u", "<b>"}, 0.6);
  auto r = Decode(grid, g.fst, a, {kUnlimitedBeam});
  auto brute = oracle::DecodeBrute(grid, a, lex, lm);
  CHECK(r.words == std::vector<std::string>{"two"});
  CHECK(std::abs(r.weight - brute.weight) < 1e-9);
}

TEST_CASE("unlimited beam equals exhaustive search on toy worlds") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    auto w = toy::MakeToyWorld(rng);
    auto g = BuildDecodeGraph(w.alphabet, w.lexicon, w.lm);
    auto grid = oracle::RandomGrid(rng, 2 + trial % 5, w.alphabet.size(), 1.5);
    auto brute = oracle::DecodeBrute(grid, w.alphabet, w.lexicon, w.lm);
    auto r = Decode(grid, g.fst, w.alphabet, {kUnlimitedBeam});
    CHECK(std::abs(r.weight - brute.weight) < 1e-9);
    auto wide = Decode(grid, g.fst, w.alphabet, {1000000});
    CHECK(wide.words == r.words);
    CHECK(wide.weight == r.weight);
  }
}

TEST_CASE("decode failure is reported") {
  Alphabet a(UnitKind::kPhoneme, {"t", "u"});
  Prolex lex;
  lex.Add("two", {{"t", "u"}, 0.0});
  auto g = BuildDecodeGraph(a, lex, UniformLm({"two"}));
  PosteriorGrid one_frame = Peaked(a, {"t"});
  try {
    Decode(one_frame, g.fst, a, {1});
    FAIL("expected a decode failure");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kDecodeFailure);
  }
}
