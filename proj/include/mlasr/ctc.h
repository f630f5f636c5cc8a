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
#include <vector>

#include <Eigen/Core>

namespace mlasr {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline constexpr int kDefaultBeamWidth = 16;

// Per-frame log posteriors over the alphabet, blank in column 0.
struct PosteriorGrid {
  Matrix log_probs;

  int32_t frames() const { return static_cast<int32_t>(log_probs.rows()); }
  int32_t num_units() const { return static_cast<int32_t>(log_probs.cols()); }

  // Row-wise log-softmax of `logits`.
  static PosteriorGrid FromLogits(const Matrix &logits);

  // Throws kNumeric unless every row log-sum-exps to 0 within `tol`.
  void Validate(double tol = 1e-6) const;
};

// Blank-free label indices.
using LabelSequence = std::vector<int32_t>;

double LogSumExp(double a, double b);

// Frames needed to emit `labels`: L plus one per adjacent repeat.
int32_t MinimumFrames(const LabelSequence &labels);

// Negative log-likelihood of `labels` summed over all alignments.
// Throws kInfeasible if the grid is too short and kLookup on a label outside
// the grid or equal to the blank.
double CtcLoss(const PosteriorGrid &grid, const LabelSequence &labels);

struct CtcLossGrad {
  double loss = 0.0;
  Matrix grad;  // d loss / d logits, same shape as the grid
};

// Loss and its gradient with respect to the logits the grid was computed
// from: softmax minus the normalized alignment occupancy.
CtcLossGrad CtcLossAndGrad(const PosteriorGrid &grid, const LabelSequence &labels);
Matrix CtcGrad(const PosteriorGrid &grid, const LabelSequence &labels);

// What a per-utterance CTC loss is divided by during training.
enum class LossNormalization { kFrames, kLabels, kNone };

const char *LossNormalizationName(LossNormalization n);
LossNormalization ParseLossNormalization(const std::string &name);

// Divisor for one utterance: T' frames, L labels (at least 1) or 1.
double LossNormalizer(LossNormalization n, int32_t frames, size_t labels);

// Per-frame argmax, repeats collapsed, blanks removed.
LabelSequence GreedyDecode(const PosteriorGrid &grid);

// Collapse rule applied to a frame-level unit path.
LabelSequence CollapsePath(const std::vector<int32_t> &path);

struct BeamHypothesis {
  LabelSequence labels;
  double log_score = 0.0;  // log of the summed alignment probability
};

// Prefix beam search over (blank, non-blank) ending probabilities. Results
// are sorted by descending score, ties by ascending label sequence.
std::vector<BeamHypothesis> PrefixBeamSearch(const PosteriorGrid &grid,
                                             int beam_width = kDefaultBeamWidth);

}  // namespace mlasr
