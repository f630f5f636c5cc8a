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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "mlasr/error.h"
#include "mlasr/graph.h"
#include "mlasr/ngram.h"
#include "oracles.h"

using namespace mlasr;

namespace {

std::vector<WordSequence> RandomCorpus(std::mt19937_64 &rng, int sentences, int vocab) {
  std::vector<WordSequence> out;
  std::uniform_int_distribution<int> len(0, 5), word(0, vocab - 1);
  for (int i = 0; i < sentences; ++i) {
    WordSequence s;
    int n = len(rng);
    for (int k = 0; k < n; ++k) s.push_back("w" + std::to_string(word(rng)));
    out.push_back(s);
  }
  return out;
}

// Sum of P(w | h) over the vocabulary, </s> and <unk>.
double ConditionalMass(const NGramModel &lm, const WordSequence &h) {
  double sum = 0.0;
  for (const auto &[ng, e] : lm.entries())
    if (ng.size() == 1 && ng[0] != kSentenceStart) sum += std::pow(10.0, lm.Log10Prob(h, ng[0]));
  return sum;
}

}  // namespace

TEST_CASE("unigram maximum likelihood share") {
  auto lm = TrainNGram({{"a", "a", "b"}}, 1, false);
  double pa = std::pow(10.0, lm.Log10Prob({}, "a"));
  double pb = std::pow(10.0, lm.Log10Prob({}, "b"));
  CHECK(pa / pb == doctest::Approx(2.0 + 0.0).epsilon(0.5));
  CHECK(pa > pb);
  CHECK(pa < 2.0 / 3.0);
  CHECK(ConditionalMass(lm, {}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("witten-bell bigram by hand") {
  auto lm = TrainNGram({{"a", "b"}}, 2);
  CHECK(std::pow(10.0, lm.Log10Prob({"a"}, "b")) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("conditionals sum to one") {
  std::mt19937_64 rng(4);
  for (int order = 1; order <= 4; ++order) {
    auto lm = TrainNGram(RandomCorpus(rng, 40, 6), order);
    lm.Validate();
    for (const auto &[ng, e] : lm.entries()) {
      if (static_cast<int>(ng.size()) >= order || ng.back() == kSentenceEnd) continue;
      CHECK(ConditionalMass(lm, ng) == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(ConditionalMass(lm, {"never", "seen"}) == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("arpa round trip") {
  std::mt19937_64 rng(8);
  auto lm = TrainNGram(RandomCorpus(rng, 30, 5), 3);
  auto path = std::filesystem::temp_directory_path() / "mlasr_ngram_test.arpa";
  WriteArpa(path.string(), lm);
  auto back = ReadArpa(path.string());
  CHECK(back.order() == 3);
  REQUIRE(back.entries().size() == lm.entries().size());
  for (const auto &[ng, e] : lm.entries()) {
    CHECK(back.Find(ng)->log10_prob == e.log10_prob);
    if (static_cast<int>(ng.size()) < 3) CHECK(back.Find(ng)->log10_backoff == e.log10_backoff);
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(ReadArpa("/nonexistent/x.arpa"), Error);
}

TEST_CASE("empty corpus") {
  CHECK_THROWS_AS(TrainNGram({}, 2), Error);
  CHECK_THROWS_AS(TrainNGram({{}}, 2, false), Error);
}

TEST_CASE("uniform unigram acceptor") {
  NGramModel lm(1);
  lm.mutable_entries()[{"a"}].log10_prob = std::log10(0.4);
  lm.mutable_entries()[{"b"}].log10_prob = std::log10(0.4);
  lm.mutable_entries()[{kSentenceEnd}].log10_prob = std::log10(0.1);
  lm.mutable_entries()[{kUnknownWord}].log10_prob = std::log10(0.1);
  auto g = NGramToFst(lm, MakeWordSymbols({"a", "b"}));
  double expected = 2 * -std::log(0.4) - std::log(0.1);
  CHECK(ScoreWithBackoffFailure(g, {"a", "b"}) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(ScoreWithBackoffFailure(g, {}) == doctest::Approx(-std::log(0.1)).epsilon(1e-12));
}

TEST_CASE("acceptor scores agree with the model") {
  std::mt19937_64 rng(12);
  for (int order = 2; order <= 4; ++order) {
    auto corpus = RandomCorpus(rng, 30, 5);
    auto lm = TrainNGram(corpus, order);
    auto words = lm.Vocabulary();
    auto g = NGramToFst(lm, MakeWordSymbols(words));
    for (int i = 0; i < 40; ++i) {
      auto s = RandomCorpus(rng, 1, 6)[0];
      double model = -lm.SentenceLogProb(s);
      // Failure reading is exact; epsilon reading is the min over backoff choices.
      CHECK(std::abs(ScoreWithBackoffFailure(g, s) - model) < 1e-9);
      double eps_reading = oracle::LmMinCost(lm, s);
      CHECK(eps_reading <= model + 1e-9);
      std::vector<int32_t> labels;
      for (const auto &w : s) {
        int32_t l = g.input_symbols().Find(w);
        labels.push_back(l > 0 ? l : g.input_symbols().Find(kUnknownWord));
      }
      Fst sent = LinearAcceptor(labels, g.shared_input_symbols());
      CHECK(std::abs(TotalWeight(Compose(sent, g)) - eps_reading) < 1e-9);
    }
  }
}
