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

#include "mlasr/ngram.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mlasr/error.h"
#include "mlasr/fst.h"
#include "mlasr/utf8.h"

namespace mlasr {

const NGramEntry *NGramModel::Find(const WordSequence &ngram) const {
  auto it = entries_.find(ngram);
  return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> NGramModel::Vocabulary() const {
  std::vector<std::string> out;
  for (const auto &[ng, e] : entries_)
    if (ng.size() == 1 && ng[0] != kSentenceStart) out.push_back(ng[0]);
  return out;
}

double NGramModel::Log10Prob(const WordSequence &context,
                             const std::string &word) const {
  auto known = [this](const std::string &w) {
    return Find({w}) ? w : std::string(kUnknownWord);
  };
  WordSequence ctx;
  size_t keep = order_ > 1 ? static_cast<size_t>(order_ - 1) : 0;
  size_t from = context.size() > keep ? context.size() - keep : 0;
  for (size_t i = from; i < context.size(); ++i) ctx.push_back(known(context[i]));
  const std::string w = known(word);
  double acc = 0.0;
  for (size_t k = ctx.size();; --k) {
    WordSequence ng(ctx.end() - k, ctx.end());
    ng.push_back(w);
    if (const NGramEntry *e = Find(ng)) return acc + e->log10_prob;
    if (k == 0) break;
    ng.pop_back();
    if (const NGramEntry *h = Find(ng)) acc += h->log10_backoff;
  }
  Fail(ErrorCode::kLookup, "word '" + word + "' has no unigram and no <unk>");
}

double NGramModel::SentenceLogProb(const WordSequence &words) const {
  WordSequence ctx{kSentenceStart};
  double log10p = 0.0;
  for (const auto &w : words) {
    log10p += Log10Prob(ctx, w);
    ctx.push_back(w);
  }
  log10p += Log10Prob(ctx, kSentenceEnd);
  return log10p * std::log(10.0);
}

void NGramModel::Validate() const {
  if (!Find({kUnknownWord}))
    Fail(ErrorCode::kInvalidArgument, "n-gram model lacks <unk>");
  for (const auto &[ng, e] : entries_) {
    if (static_cast<int>(ng.size()) > order_ || ng.empty())
      Fail(ErrorCode::kInvalidArgument, "n-gram longer than model order");
    if (e.log10_prob > 1e-12)
      Fail(ErrorCode::kInvalidArgument, "positive log probability");
    if (ng.size() > 1 && !Find(WordSequence(ng.begin(), ng.end() - 1)))
      Fail(ErrorCode::kInvalidArgument, "n-gram context without entry");
  }
}

NGramCounts CountNGrams(const std::vector<WordSequence> &sentences, int order,
                        bool sentence_boundaries) {
  if (order < 1) Fail(ErrorCode::kInvalidArgument, "order must be >= 1");
  NGramCounts out;
  out.order = order;
  for (const auto &s : sentences) {
    WordSequence toks;
    if (sentence_boundaries) toks.push_back(kSentenceStart);
    toks.insert(toks.end(), s.begin(), s.end());
    if (sentence_boundaries) toks.push_back(kSentenceEnd);
    size_t first = sentence_boundaries ? 1 : 0;
    for (size_t i = first; i < toks.size(); ++i) {
      ++out.tokens;
      for (int n = 1; n <= order && static_cast<size_t>(n) <= i + 1; ++n)
        ++out.counts[WordSequence(toks.begin() + (i + 1 - n), toks.begin() + i + 1)];
    }
  }
  return out;
}

NGramModel TrainNGram(const std::vector<WordSequence> &sentences, int order,
                      bool sentence_boundaries) {
  NGramCounts counts = CountNGrams(sentences, order, sentence_boundaries);
  if (counts.tokens == 0) Fail(ErrorCode::kEmpty, "empty LM training corpus");
  NGramModel model(order);
  auto &entries = model.mutable_entries();

  // Unigrams: Witten-Bell interpolated with a uniform floor.
  std::map<std::string, int64_t> uni;
  for (const auto &[ng, c] : counts.counts)
    if (ng.size() == 1) uni[ng[0]] = c;
  const double n_tok = static_cast<double>(counts.tokens);
  const double types = static_cast<double>(uni.size());
  const double vocab = types + (uni.count(kUnknownWord) ? 0 : 1);
  for (const auto &[w, c] : uni)
    entries[{w}].log10_prob = std::log10((c + types / vocab) / (n_tok + types));
  if (!uni.count(kUnknownWord))
    entries[{kUnknownWord}].log10_prob = std::log10((types / vocab) / (n_tok + types));
  if (sentence_boundaries) entries[{kSentenceStart}].log10_prob = kLog10Zero;

  for (int n = 2; n <= order; ++n) {
    // Followers grouped by context.
    std::map<WordSequence, std::vector<std::pair<std::string, int64_t>>> followers;
    for (const auto &[ng, c] : counts.counts)
      if (static_cast<int>(ng.size()) == n)
        followers[WordSequence(ng.begin(), ng.end() - 1)].emplace_back(ng.back(), c);

    for (const auto &[ctx, list] : followers) {
      double c_h = 0;
      for (const auto &f : list) c_h += static_cast<double>(f.second);
      const double t_h = static_cast<double>(list.size());
      WordSequence lower_ctx(ctx.begin() + 1, ctx.end());
      double seen_lower = 0.0;
      for (const auto &f : list)
        seen_lower += std::pow(10.0, model.Log10Prob(lower_ctx, f.first));
      const bool discount = seen_lower < 1.0 - 1e-12;
      for (const auto &[w, c] : list) {
        WordSequence ng = ctx;
        ng.push_back(w);
        double p = discount ? c / (c_h + t_h) : c / c_h;
        entries[ng].log10_prob = std::log10(p);
      }
      double backoff = discount ? (t_h / (c_h + t_h)) / (1.0 - seen_lower) : 1.0;
      entries[ctx].log10_backoff = std::log10(backoff);
    }
  }
  return model;
}

void WriteArpa(const std::string &path, const NGramModel &model) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  std::vector<size_t> per_order(model.order() + 1, 0);
  for (const auto &[ng, e] : model.entries()) ++per_order[ng.size()];
  out << "\n\\data\\\n";
  for (int n = 1; n <= model.order(); ++n)
    out << "ngram " << n << '=' << per_order[n] << '\n';
  for (int n = 1; n <= model.order(); ++n) {
    out << "\n\\" << n << "-grams:\n";
    for (const auto &[ng, e] : model.entries()) {
      if (static_cast<int>(ng.size()) != n) continue;
      out << FormatWeight(e.log10_prob) << '\t' << utf8::Join(ng, " ");
      if (n < model.order()) out << '\t' << FormatWeight(e.log10_backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
}

NGramModel ReadArpa(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::string line;
  int order = 0;
  int section = 0;
  bool in_data = false;
  std::map<WordSequence, NGramEntry> entries;
  int lineno = 0;
  auto parse_double = [&](const std::string &s) {
    try {
      size_t used = 0;
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception &) {
      Fail(ErrorCode::kFormat, path + ":" + std::to_string(lineno) +
                                   ": bad number '" + s + "'");
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line == "\\data\\") {
      in_data = true;
      continue;
    }
    if (line == "\\end\\") break;
    if (line.front() == '\\') {
      int n = 0;
      if (std::sscanf(line.c_str(), "\\%d-grams:", &n) != 1 || n < 1)
        Fail(ErrorCode::kFormat, path + ": bad section header '" + line + "'");
      section = n;
      in_data = false;
      order = std::max(order, n);
      continue;
    }
    if (in_data) {
      if (line.rfind("ngram ", 0) != 0)
        Fail(ErrorCode::kFormat, path + ": bad \\data\\ line '" + line + "'");
      continue;
    }
    if (section == 0) continue;
    auto fields = utf8::SplitWhitespace(line);
    if (static_cast<int>(fields.size()) < section + 1 ||
        static_cast<int>(fields.size()) > section + 2)
      Fail(ErrorCode::kFormat, path + ":" + std::to_string(lineno) +
                                   ": wrong field count");
    NGramEntry e;
    e.log10_prob = parse_double(fields[0]);
    WordSequence ng(fields.begin() + 1, fields.begin() + 1 + section);
    if (static_cast<int>(fields.size()) == section + 2)
      e.log10_backoff = parse_double(fields.back());
    entries[ng] = e;
  }
  if (order == 0) Fail(ErrorCode::kFormat, path + ": no n-gram sections");
  NGramModel model(order);
  model.mutable_entries() = std::move(entries);
  model.Validate();
  return model;
}

}  // namespace mlasr
