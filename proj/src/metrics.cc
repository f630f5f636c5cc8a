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

#include "mlasr/metrics.h"

#include <cmath>
#include <limits>

#include "mlasr/error.h"

namespace mlasr {

double ErrorCounts::rate() const {
  if (reference_length <= 0)
    Fail(ErrorCode::kInvalidArgument, "error rate of an empty reference");
  return static_cast<double>(errors()) / static_cast<double>(reference_length);
}

ErrorCounts &ErrorCounts::operator+=(const ErrorCounts &o) {
  substitutions += o.substitutions;
  deletions += o.deletions;
  insertions += o.insertions;
  reference_length += o.reference_length;
  return *this;
}

ErrorCounts EditDistance(const std::vector<std::string> &ref,
                         const std::vector<std::string> &hyp) {
  const size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int64_t>> d(n + 1, std::vector<int64_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      d[i][j] = std::min({d[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                          d[i][j - 1] + 1, d[i - 1][j] + 1});
  ErrorCounts c;
  c.reference_length = static_cast<int64_t>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (d[i][j] == d[i - 1][j - 1] + (same ? 0 : 1)) {
        if (!same) ++c.substitutions;
        --i;
        --j;
        continue;
      }
    }
    if (j > 0 && d[i][j] == d[i][j - 1] + 1) {
      ++c.insertions;
      --j;
    } else {
      ++c.deletions;
      --i;
    }
  }
  return c;
}

double CorpusRate(const std::vector<ErrorCounts> &counts) {
  ErrorCounts total;
  for (const auto &c : counts) total += c;
  if (total.reference_length <= 0)
    Fail(ErrorCode::kInvalidArgument, "corpus has no reference tokens");
  return 100.0 * total.rate();
}

double CorpusRate(const std::vector<std::pair<std::vector<std::string>,
                                              std::vector<std::string>>> &pairs) {
  std::vector<ErrorCounts> counts;
  counts.reserve(pairs.size());
  for (const auto &[ref, hyp] : pairs) counts.push_back(EditDistance(ref, hyp));
  return CorpusRate(counts);
}

double Ward(double avg_wer_after, double avg_wer_before) {
  if (!(avg_wer_before < 100.0))
    Fail(ErrorCode::kInvalidArgument, "WARD is undefined for a baseline WER of 100% or more");
  return 100.0 * (avg_wer_after - avg_wer_before) / (100.0 - avg_wer_before);
}

RipoAnalysis AnalyzeRipo(const std::vector<RipoInput> &inputs) {
  RipoAnalysis out;
  for (const auto &in : inputs) {
    if (!(in.base_occurrences > 0) || !(in.wer_subword > 0)) {
      out.skipped.push_back(in.language);
      continue;
    }
    out.points.push_back(
        {in.language,
         100.0 * (in.augmented_occurrences - in.base_occurrences) / in.base_occurrences,
         100.0 * (in.wer_subword - in.wer_phoneme) / in.wer_subword});
  }
  const double n = static_cast<double>(out.points.size());
  double mx = 0, my = 0;
  for (const auto &p : out.points) {
    mx += p.ripo / n;
    my += p.rrwer / n;
  }
  double sxx = 0, sxy = 0;
  for (const auto &p : out.points) {
    sxx += (p.ripo - mx) * (p.ripo - mx);
    sxy += (p.ripo - mx) * (p.rrwer - my);
  }
  if (out.points.size() < 2 || sxx == 0) {
    out.slope = out.intercept = std::numeric_limits<double>::quiet_NaN();
  } else {
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
  }
  return out;
}

}  // namespace mlasr
