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

#include "mlasr/bpe.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

#include "mlasr/error.h"
#include "mlasr/utf8.h"

namespace mlasr {

std::vector<double> SamplingDistribution(const LanguageStats &stats) {
  if (stats.counts.empty())
    Fail(ErrorCode::kInvalidArgument, "no languages in sampling stats");
  if (!(stats.beta > 0.0 && stats.beta <= 1.0))
    Fail(ErrorCode::kInvalidArgument, "beta must lie in (0, 1]");
  double total = 0;
  for (int64_t n : stats.counts) {
    if (n <= 0)
      Fail(ErrorCode::kInvalidArgument, "sentence counts must be positive");
    total += static_cast<double>(n);
  }
  std::vector<double> q(stats.counts.size());
  double z = 0;
  for (size_t l = 0; l < q.size(); ++l) {
    double p = static_cast<double>(stats.counts[l]) / total;
    q[l] = stats.beta == 1.0 ? p : std::pow(p, stats.beta);
    z += q[l];
  }
  for (double &v : q) v /= z;
  return q;
}

std::vector<SampledSentence> SampleCorpus(
    const std::vector<std::vector<std::string>> &corpora,
    const LanguageStats &stats, int64_t total, uint64_t seed) {
  if (total <= 0) Fail(ErrorCode::kInvalidArgument, "total must be positive");
  if (corpora.size() != stats.counts.size())
    Fail(ErrorCode::kInvalidArgument, "corpora/stats language count mismatch");
  auto q = SamplingDistribution(stats);
  for (size_t l = 0; l < q.size(); ++l)
    if (q[l] > 0 && corpora[l].empty())
      Fail(ErrorCode::kInvalidArgument,
           "empty corpus for language " + std::to_string(l));
  std::mt19937_64 rng(seed);
  std::discrete_distribution<size_t> pick_lang(q.begin(), q.end());
  std::vector<SampledSentence> out;
  out.reserve(static_cast<size_t>(total));
  for (int64_t i = 0; i < total; ++i) {
    size_t l = pick_lang(rng);
    std::uniform_int_distribution<size_t> pick(0, corpora[l].size() - 1);
    out.push_back({l, corpora[l][pick(rng)]});
  }
  return out;
}

namespace {

std::vector<std::string> WordSymbols(const std::string &word,
                                     const std::string &marker) {
  std::vector<std::string> syms = utf8::SplitCodepoints(word);
  syms.push_back(marker);
  return syms;
}

Alphabet MakeVocab(const std::vector<std::string> &charset,
                   const std::vector<std::pair<std::string, std::string>> &merges) {
  std::vector<std::string> tokens{std::string(kUnkToken), std::string(kSosToken)};
  std::set<std::string> seen(tokens.begin(), tokens.end());
  for (const auto &c : charset)
    if (seen.insert(c).second) tokens.push_back(c);
  for (const auto &[l, r] : merges)
    if (seen.insert(l + r).second) tokens.push_back(l + r);
  return Alphabet(UnitKind::kSubword, tokens);
}

}  // namespace

BpeModel::BpeModel(std::vector<std::string> charset,
                   std::vector<std::pair<std::string, std::string>> merges,
                   int vocab_size, std::string marker)
    : charset_(std::move(charset)),
      merges_(std::move(merges)),
      vocab_size_(vocab_size),
      marker_(std::move(marker)) {
  std::sort(charset_.begin(), charset_.end());
  for (size_t i = 0; i < merges_.size(); ++i)
    rank_.emplace(merges_[i], static_cast<int>(i));
  vocab_ = MakeVocab(charset_, merges_);
}

std::vector<std::string> BpeModel::EncodeWord(const std::string &word) const {
  std::vector<std::string> syms = WordSymbols(word, marker_);
  for (auto &s : syms)
    if (!std::binary_search(charset_.begin(), charset_.end(), s))
      s = std::string(kUnkToken);
  while (syms.size() > 1) {
    int best = -1;
    for (size_t i = 0; i + 1 < syms.size(); ++i) {
      auto it = rank_.find({syms[i], syms[i + 1]});
      if (it != rank_.end() && (best < 0 || it->second < best)) best = it->second;
    }
    if (best < 0) break;
    const auto &[l, r] = merges_[best];
    std::vector<std::string> next;
    next.reserve(syms.size());
    for (size_t i = 0; i < syms.size(); ++i) {
      if (i + 1 < syms.size() && syms[i] == l && syms[i + 1] == r) {
        next.push_back(l + r);
        ++i;
      } else {
        next.push_back(std::move(syms[i]));
      }
    }
    syms = std::move(next);
  }
  return syms;
}

std::vector<std::string> BpeModel::Encode(const std::string &sentence) const {
  std::vector<std::string> out;
  for (const auto &w : utf8::SplitWhitespace(sentence)) {
    auto toks = EncodeWord(w);
    out.insert(out.end(), toks.begin(), toks.end());
  }
  return out;
}

std::string BpeModel::Decode(const std::vector<std::string> &tokens) const {
  std::string joined;
  for (const auto &t : tokens) {
    if (t == kSosToken) continue;
    joined += t;
  }
  std::string out;
  size_t pos = 0;
  while (pos < joined.size()) {
    size_t hit = joined.find(marker_, pos);
    if (hit == std::string::npos) {
      out.append(joined, pos, std::string::npos);
      break;
    }
    out.append(joined, pos, hit - pos);
    out.push_back(' ');
    pos = hit + marker_.size();
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

BpeModel TrainBpe(const std::vector<std::string> &sentences, int vocab_size) {
  const std::string marker(kWordBoundary);
  std::map<std::string, int64_t> word_freq;
  for (const auto &s : sentences)
    for (const auto &w : utf8::SplitWhitespace(s)) ++word_freq[w];
  if (word_freq.empty()) Fail(ErrorCode::kInvalidArgument, "empty BPE corpus");

  std::vector<std::vector<std::string>> words;
  std::vector<int64_t> freqs;
  std::set<std::string> charset{marker};
  for (const auto &[w, f] : word_freq) {
    words.push_back(WordSymbols(w, marker));
    freqs.push_back(f);
    charset.insert(words.back().begin(), words.back().end());
  }
  const int base = static_cast<int>(charset.size()) + 2;
  if (vocab_size < base)
    Fail(ErrorCode::kInvalidArgument,
         "vocab_size " + std::to_string(vocab_size) +
             " below character set size + 2 = " + std::to_string(base));

  using Pair = std::pair<std::string, std::string>;
  std::map<Pair, int64_t> counts;
  std::map<Pair, std::set<size_t>> where;
  // Ordered by (-count, left, right): begin() is the next merge.
  std::set<std::tuple<int64_t, std::string, std::string>> order;

  auto adjust = [&](size_t wi, int sign) {
    const auto &syms = words[wi];
    for (size_t i = 0; i + 1 < syms.size(); ++i) {
      Pair p{syms[i], syms[i + 1]};
      int64_t &c = counts[p];
      if (c > 0) order.erase({-c, p.first, p.second});
      c += sign * freqs[wi];
      if (c > 0) order.insert({-c, p.first, p.second});
      if (sign > 0) where[p].insert(wi);
    }
  };
  for (size_t wi = 0; wi < words.size(); ++wi) adjust(wi, +1);

  std::set<std::string> vocab(charset.begin(), charset.end());
  std::vector<Pair> merges;
  while (static_cast<int>(vocab.size()) + 2 < vocab_size && !order.empty()) {
    auto [neg, left, right] = *order.begin();
    if (-neg < 2) break;
    Pair best{left, right};
    merges.push_back(best);
    vocab.insert(left + right);
    std::set<size_t> affected = where[best];
    for (size_t wi : affected) {
      adjust(wi, -1);
      auto &syms = words[wi];
      std::vector<std::string> next;
      for (size_t i = 0; i < syms.size(); ++i) {
        if (i + 1 < syms.size() && syms[i] == left && syms[i + 1] == right) {
          next.push_back(left + right);
          ++i;
        } else {
          next.push_back(syms[i]);
        }
      }
      syms = std::move(next);
      adjust(wi, +1);
    }
  }
  return BpeModel(std::vector<std::string>(charset.begin(), charset.end()),
                  std::move(merges), vocab_size, marker);
}

void WriteBpeModel(const std::string &path, const BpeModel &model) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out << "bpe " << model.vocab_size() << ' ' << model.marker() << ' '
      << model.merges().size() << ' ' << model.NumTokens() << '\n';
  for (const auto &[l, r] : model.merges()) out << l << ' ' << r << '\n';
  for (int32_t i = 1; i < model.vocab().size(); ++i)
    out << model.vocab().SymbolAt(i) << '\n';
}

BpeModel ReadBpeModel(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) Fail(ErrorCode::kFormat, path + ": empty file");
  auto header = utf8::SplitWhitespace(line);
  if (header.size() != 5 || header[0] != "bpe")
    Fail(ErrorCode::kFormat, path + ": bad header");
  int vocab_size = 0;
  size_t num_merges = 0, num_tokens = 0;
  try {
    vocab_size = std::stoi(header[1]);
    num_merges = std::stoul(header[3]);
    num_tokens = std::stoul(header[4]);
  } catch (const std::exception &) {
    Fail(ErrorCode::kFormat, path + ": bad header numbers");
  }
  const std::string marker = header[2];
  std::vector<std::pair<std::string, std::string>> merges;
  for (size_t i = 0; i < num_merges; ++i) {
    if (!std::getline(in, line)) Fail(ErrorCode::kFormat, path + ": truncated merges");
    auto f = utf8::SplitWhitespace(line);
    if (f.size() != 2) Fail(ErrorCode::kFormat, path + ": bad merge line '" + line + "'");
    merges.emplace_back(f[0], f[1]);
  }
  std::vector<std::string> charset;
  for (size_t i = 0; i < num_tokens; ++i) {
    if (!std::getline(in, line)) Fail(ErrorCode::kFormat, path + ": truncated vocabulary");
    auto f = utf8::SplitWhitespace(line);
    if (f.size() != 1) Fail(ErrorCode::kFormat, path + ": bad vocabulary line");
    if (f[0] == kUnkToken || f[0] == kSosToken) continue;
    if (utf8::Decode(f[0]).size() == 1) charset.push_back(f[0]);
  }
  BpeModel model(std::move(charset), std::move(merges), vocab_size, marker);
  if (model.NumTokens() != static_cast<int>(num_tokens))
    Fail(ErrorCode::kFormat, path + ": vocabulary does not match merges");
  return model;
}

}  // namespace mlasr
