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

#include "mlasr/ctc.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "mlasr/error.h"
#include "mlasr/inventory.h"

namespace mlasr {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

void CheckLabels(const PosteriorGrid &grid, const LabelSequence &labels) {
  for (int32_t l : labels)
    if (l <= kBlankIndex || l >= grid.num_units())
      Fail(ErrorCode::kLookup, "label " + std::to_string(l) +
                                   " outside the non-blank range of a grid with " +
                                   std::to_string(grid.num_units()) + " units");
  int32_t need = MinimumFrames(labels);
  if (grid.frames() < need || grid.frames() == 0)
    Fail(ErrorCode::kInfeasible,
         "infeasible alignment: " + std::to_string(grid.frames()) +
             " frames for a label sequence needing " + std::to_string(need));
}

struct Lattice {
  std::vector<int32_t> ext;  // blank-interleaved labels, size 2L+1
  Matrix alpha;              // T x S
  double log_likelihood = kLogZero;
};

Lattice Forward(const PosteriorGrid &grid, const LabelSequence &labels) {
  Lattice lat;
  lat.ext.reserve(2 * labels.size() + 1);
  lat.ext.push_back(kBlankIndex);
  for (int32_t l : labels) {
    lat.ext.push_back(l);
    lat.ext.push_back(kBlankIndex);
  }
  const int32_t T = grid.frames();
  const int32_t S = static_cast<int32_t>(lat.ext.size());
  const auto &lp = grid.log_probs;
  lat.alpha = Matrix::Constant(T, S, kLogZero);
  lat.alpha(0, 0) = lp(0, kBlankIndex);
  if (S > 1) lat.alpha(0, 1) = lp(0, lat.ext[1]);
  for (int32_t t = 1; t < T; ++t) {
    for (int32_t s = 0; s < S; ++s) {
      double a = lat.alpha(t - 1, s);
      if (s >= 1) a = LogSumExp(a, lat.alpha(t - 1, s - 1));
      if (s >= 2 && lat.ext[s] != kBlankIndex && lat.ext[s] != lat.ext[s - 2])
        a = LogSumExp(a, lat.alpha(t - 1, s - 2));
      lat.alpha(t, s) = a == kLogZero ? kLogZero : a + lp(t, lat.ext[s]);
    }
  }
  lat.log_likelihood = lat.alpha(T - 1, S - 1);
  if (S > 1) lat.log_likelihood = LogSumExp(lat.log_likelihood, lat.alpha(T - 1, S - 2));
  return lat;
}

}  // namespace

double LogSumExp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
}

PosteriorGrid PosteriorGrid::FromLogits(const Matrix &logits) {
  PosteriorGrid g;
  g.log_probs.resize(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    double m = logits.row(t).maxCoeff();
    double z = (logits.row(t).array() - m).exp().sum();
    g.log_probs.row(t) = logits.row(t).array() - m - std::log(z);
  }
  return g;
}

void PosteriorGrid::Validate(double tol) const {
  for (Eigen::Index t = 0; t < log_probs.rows(); ++t) {
    double acc = kLogZero;
    for (Eigen::Index k = 0; k < log_probs.cols(); ++k) {
      if (std::isnan(log_probs(t, k)))
        Fail(ErrorCode::kNumeric, "NaN in posterior grid");
      acc = LogSumExp(acc, log_probs(t, k));
    }
    if (!(std::abs(acc) <= tol))
      Fail(ErrorCode::kNumeric, "posterior row " + std::to_string(t) +
                                    " does not normalize");
  }
}

int32_t MinimumFrames(const LabelSequence &labels) {
  int32_t n = static_cast<int32_t>(labels.size());
  for (size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++n;
  return n;
}

double CtcLoss(const PosteriorGrid &grid, const LabelSequence &labels) {
  CheckLabels(grid, labels);
  double ll = Forward(grid, labels).log_likelihood;
  if (!std::isfinite(ll))
    Fail(ErrorCode::kNumeric, "CTC likelihood underflowed");
  return -ll;
}

CtcLossGrad CtcLossAndGrad(const PosteriorGrid &grid, const LabelSequence &labels) {
  CheckLabels(grid, labels);
  Lattice lat = Forward(grid, labels);
  if (!std::isfinite(lat.log_likelihood))
    Fail(ErrorCode::kNumeric, "CTC likelihood underflowed");
  const int32_t T = grid.frames();
  const int32_t S = static_cast<int32_t>(lat.ext.size());
  const auto &lp = grid.log_probs;

  // beta(t, s) includes the emission at frame t.
  Matrix beta = Matrix::Constant(T, S, kLogZero);
  beta(T - 1, S - 1) = lp(T - 1, lat.ext[S - 1]);
  if (S > 1) beta(T - 1, S - 2) = lp(T - 1, lat.ext[S - 2]);
  for (int32_t t = T - 2; t >= 0; --t) {
    for (int32_t s = S - 1; s >= 0; --s) {
      double b = beta(t + 1, s);
      if (s + 1 < S) b = LogSumExp(b, beta(t + 1, s + 1));
      if (s + 2 < S && lat.ext[s] != kBlankIndex && lat.ext[s] != lat.ext[s + 2])
        b = LogSumExp(b, beta(t + 1, s + 2));
      beta(t, s) = b == kLogZero ? kLogZero : b + lp(t, lat.ext[s]);
    }
  }

  CtcLossGrad out;
  out.loss = -lat.log_likelihood;
  out.grad = lp.array().exp();
  Matrix occ = Matrix::Constant(T, grid.num_units(), kLogZero);
  for (int32_t t = 0; t < T; ++t)
    for (int32_t s = 0; s < S; ++s) {
      double v = lat.alpha(t, s) + beta(t, s);
      if (v != kLogZero) occ(t, lat.ext[s]) = LogSumExp(occ(t, lat.ext[s]), v);
    }
  for (int32_t t = 0; t < T; ++t)
    for (int32_t k = 0; k < grid.num_units(); ++k)
      if (occ(t, k) != kLogZero)
        out.grad(t, k) -= std::exp(occ(t, k) - lp(t, k) - lat.log_likelihood);
  return out;
}

Matrix CtcGrad(const PosteriorGrid &grid, const LabelSequence &labels) {
  return CtcLossAndGrad(grid, labels).grad;
}

const char *LossNormalizationName(LossNormalization n) {
  switch (n) {
    case LossNormalization::kFrames: return "frames";
    case LossNormalization::kLabels: return "labels";
    case LossNormalization::kNone: return "none";
  }
  return "frames";
}

LossNormalization ParseLossNormalization(const std::string &name) {
  if (name == "frames") return LossNormalization::kFrames;
  if (name == "labels") return LossNormalization::kLabels;
  if (name == "none") return LossNormalization::kNone;
  Fail(ErrorCode::kConfig, "unknown loss normalization '" + name +
                               "' (expected frames, labels or none)");
}

double LossNormalizer(LossNormalization n, int32_t frames, size_t labels) {
  switch (n) {
    case LossNormalization::kFrames: return std::max<int32_t>(frames, 1);
    case LossNormalization::kLabels: return std::max<size_t>(labels, 1);
    case LossNormalization::kNone: return 1.0;
  }
  return 1.0;
}

LabelSequence CollapsePath(const std::vector<int32_t> &path) {
  LabelSequence out;
  int32_t prev = -1;
  for (int32_t k : path) {
    if (k != kBlankIndex && k != prev) out.push_back(k);
    prev = k;
  }
  return out;
}

LabelSequence GreedyDecode(const PosteriorGrid &grid) {
  std::vector<int32_t> path(grid.frames());
  for (int32_t t = 0; t < grid.frames(); ++t) {
    Eigen::Index k;
    grid.log_probs.row(t).maxCoeff(&k);
    path[t] = static_cast<int32_t>(k);
  }
  return CollapsePath(path);
}

std::vector<BeamHypothesis> PrefixBeamSearch(const PosteriorGrid &grid,
                                             int beam_width) {
  if (beam_width < 1) Fail(ErrorCode::kInvalidArgument, "beam width must be >= 1");
  struct Probs {
    double blank = kLogZero;
    double nonblank = kLogZero;
    double total() const { return LogSumExp(blank, nonblank); }
  };
  using Beam = std::map<LabelSequence, Probs>;
  Beam beam;
  beam[{}].blank = 0.0;
  const int32_t V = grid.num_units();

  auto prune = [beam_width](Beam &b) {
    if (static_cast<int>(b.size()) <= beam_width) return;
    std::vector<std::pair<double, const LabelSequence *>> scored;
    scored.reserve(b.size());
    for (const auto &[prefix, p] : b) scored.emplace_back(p.total(), &prefix);
    // std::map iteration is lexicographic, so stable_sort keeps ties ordered.
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto &x, const auto &y) { return x.first > y.first; });
    Beam kept;
    for (int i = 0; i < beam_width; ++i) kept.emplace(*scored[i].second, b.at(*scored[i].second));
    b = std::move(kept);
  };

  for (int32_t t = 0; t < grid.frames(); ++t) {
    Beam next;
    const auto row = grid.log_probs.row(t);
    for (const auto &[prefix, p] : beam) {
      const double total = p.total();
      auto &same = next[prefix];
      same.blank = LogSumExp(same.blank, total + row(kBlankIndex));
      if (!prefix.empty())
        same.nonblank =
            LogSumExp(same.nonblank, p.nonblank + row(prefix.back()));
      for (int32_t k = 1; k < V; ++k) {
        LabelSequence ext = prefix;
        ext.push_back(k);
        auto &q = next[ext];
        double from = (!prefix.empty() && prefix.back() == k) ? p.blank : total;
        if (from != kLogZero) q.nonblank = LogSumExp(q.nonblank, from + row(k));
      }
    }
    prune(next);
    beam = std::move(next);
  }

  std::vector<BeamHypothesis> out;
  for (const auto &[prefix, p] : beam) {
    double s = p.total();
    if (s == kLogZero) continue;
    out.push_back({prefix, s});
  }
  std::stable_sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
    return a.log_score > b.log_score;
  });
  return out;
}

}  // namespace mlasr
