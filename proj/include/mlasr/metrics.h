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
#include <string>
#include <utility>
#include <vector>

namespace mlasr {

struct ErrorCounts {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t reference_length = 0;

  int64_t errors() const { return substitutions + deletions + insertions; }
  // Fraction (not percent); throws kInvalidArgument on an empty reference.
  double rate() const;
  ErrorCounts &operator+=(const ErrorCounts &o);
};

// Unit-cost Levenshtein alignment. Among minimal alignments the backtrace
// prefers substitution, then insertion, then deletion.
ErrorCounts EditDistance(const std::vector<std::string> &reference,
                         const std::vector<std::string> &hypothesis);

// 100 * sum(errors) / sum(reference lengths). Throws kInvalidArgument when
// the pooled reference length is zero.
double CorpusRate(const std::vector<std::pair<std::vector<std::string>,
                                              std::vector<std::string>>> &pairs);
double CorpusRate(const std::vector<ErrorCounts> &counts);

// Word accuracy relative degradation in percent. Throws kInvalidArgument
// when before >= 100.
double Ward(double avg_wer_after, double avg_wer_before);

struct RipoInput {
  std::string language;
  // Occurrences in the language's own data and in the pooled data, summed
  // over the language's phonemes.
  double base_occurrences = 0.0;
  double augmented_occurrences = 0.0;
  double wer_phoneme = 0.0;
  double wer_subword = 0.0;
};

struct RipoPoint {
  std::string language;
  double ripo = 0.0;   // percent
  double rrwer = 0.0;  // percent
};

struct RipoAnalysis {
  std::vector<RipoPoint> points;
  std::vector<std::string> skipped;  // zero base counts or zero subword WER
  double slope = 0.0;
  double intercept = 0.0;
};

// Per-language RIPO/RRWER and the least-squares line RRWER = a * RIPO + b
// (slope and intercept are NaN with fewer than two distinct RIPO values).
RipoAnalysis AnalyzeRipo(const std::vector<RipoInput> &inputs);

}  // namespace mlasr
