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

#include "mlasr/trainer.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"
#include "mlasr/error.h"
#include "mlasr/fst.h"

namespace mlasr {

void TrainSchedule::Validate() const {
  if (!(peak_lr > 0)) Fail(ErrorCode::kConfig, "peak_lr must be positive");
  if (!(warmup_fraction > 0 && warmup_fraction < 1))
    Fail(ErrorCode::kConfig, "warmup_fraction must lie in (0, 1)");
  if (batch_size < 1 || max_epochs < 1 || early_stop_patience < 1 || avg_top_k < 1)
    Fail(ErrorCode::kConfig, "batch_size, max_epochs, patience and avg_top_k must be >= 1");
  if (total_steps < 0) Fail(ErrorCode::kConfig, "total_steps must be >= 0");
  if (!(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1 && adam_eps > 0))
    Fail(ErrorCode::kConfig, "bad Adam hyperparameters");
  if (grad_clip < 0) Fail(ErrorCode::kConfig, "grad_clip must be >= 0");
}

std::string TrainSchedule::ToJson() const {
  nlohmann::json j{{"peak_lr", peak_lr},
                   {"total_steps", total_steps},
                   {"warmup_fraction", warmup_fraction},
                   {"batch_size", batch_size},
                   {"max_epochs", max_epochs},
                   {"early_stop_patience", early_stop_patience},
                   {"avg_top_k", avg_top_k},
                   {"adam_beta1", adam_beta1},
                   {"adam_beta2", adam_beta2},
                   {"adam_eps", adam_eps},
                   {"grad_clip", grad_clip},
                   {"normalization", LossNormalizationName(normalization)}};
  return j.dump();
}

TrainSchedule TrainSchedule::FromJson(const std::string &json_text) {
  TrainSchedule s;
  try {
    auto j = nlohmann::json::parse(json_text);
    s.peak_lr = j.value("peak_lr", s.peak_lr);
    s.total_steps = j.value("total_steps", s.total_steps);
    s.warmup_fraction = j.value("warmup_fraction", s.warmup_fraction);
    s.batch_size = j.value("batch_size", s.batch_size);
    s.max_epochs = j.value("max_epochs", s.max_epochs);
    s.early_stop_patience = j.value("early_stop_patience", s.early_stop_patience);
    s.avg_top_k = j.value("avg_top_k", s.avg_top_k);
    s.adam_beta1 = j.value("adam_beta1", s.adam_beta1);
    s.adam_beta2 = j.value("adam_beta2", s.adam_beta2);
    s.adam_eps = j.value("adam_eps", s.adam_eps);
    s.grad_clip = j.value("grad_clip", s.grad_clip);
    if (j.contains("normalization"))
      s.normalization = ParseLossNormalization(j["normalization"].get<std::string>());
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("bad schedule: ") + e.what());
  }
  s.Validate();
  return s;
}

int64_t WarmupSteps(const TrainSchedule &s, int64_t total_steps) {
  return std::max<int64_t>(1, std::llround(s.warmup_fraction * static_cast<double>(total_steps)));
}

double NoamLearningRate(double peak_lr, int64_t warmup_steps, int64_t step) {
  if (step < 1) step = 1;
  const double s = static_cast<double>(step), w = static_cast<double>(warmup_steps);
  return peak_lr * std::min(s / w, std::sqrt(w / s));
}

double EvaluateLoss(const ModelCheckpoint &ckpt, const std::vector<Utterance> &data,
                    LossNormalization norm) {
  double total = 0.0;
  size_t n = 0;
  for (const auto &u : data) {
    PosteriorGrid g = Forward(ckpt, u.features);
    if (MinimumFrames(u.labels) > g.frames()) continue;
    total += CtcLoss(g, u.labels) / LossNormalizer(norm, g.frames(), u.labels.size());
    ++n;
  }
  return n ? total / static_cast<double>(n) : kInfinity;
}

ModelCheckpoint AverageCheckpoints(const std::vector<ModelCheckpoint> &ckpts) {
  if (ckpts.empty()) Fail(ErrorCode::kInvalidArgument, "nothing to average");
  ModelCheckpoint out = ckpts.front();
  for (size_t i = 1; i < ckpts.size(); ++i) {
    if (!(ckpts[i].config == out.config) || !(ckpts[i].alphabet == out.alphabet))
      Fail(ErrorCode::kShape, "averaged checkpoints must share config and alphabet");
    for (auto &[name, m] : out.params) m += ckpts[i].params.at(name);
  }
  const double inv = 1.0 / static_cast<double>(ckpts.size());
  for (auto &[name, m] : out.params) m *= inv;
  // Averaging identical values must reproduce them exactly.
  for (auto &[name, m] : out.params) {
    bool same = true;
    for (size_t i = 1; i < ckpts.size() && same; ++i) same = ckpts[i].params.at(name) == ckpts[0].params.at(name);
    if (same) m = ckpts[0].params.at(name);
  }
  return out;
}

TrainResult Train(ModelCheckpoint init, const std::vector<Utterance> &train,
                  const std::vector<Utterance> &val, const TrainSchedule &schedule,
                  uint64_t seed) {
  schedule.Validate();
  init.Validate();
  TrainResult result;
  std::vector<size_t> usable;
  for (size_t i = 0; i < train.size(); ++i) {
    for (int32_t l : train[i].labels)
      if (l <= kBlankIndex || l >= init.alphabet.size())
        Fail(ErrorCode::kLookup, "training label " + std::to_string(l) +
                                     " outside the alphabet");
    int frames = init.config.OutputFrames(static_cast<int>(train[i].features.rows()));
    if (MinimumFrames(train[i].labels) > frames)
      ++result.history.skipped_utterances;
    else
      usable.push_back(i);
  }
  if (usable.empty()) Fail(ErrorCode::kEmpty, "no feasible training utterances");

  const int64_t batches =
      (static_cast<int64_t>(usable.size()) + schedule.batch_size - 1) / schedule.batch_size;
  const int64_t total_steps =
      schedule.total_steps > 0 ? schedule.total_steps : batches * schedule.max_epochs;
  const int64_t warmup = WarmupSteps(schedule, total_steps);

  ModelCheckpoint model = std::move(init);
  model.meta.seed = seed;
  std::mt19937_64 rng(seed);
  TensorMap m1, m2;
  for (const auto &[name, p] : model.params) {
    m1[name] = Matrix::Zero(p.rows(), p.cols());
    m2[name] = Matrix::Zero(p.rows(), p.cols());
  }
  int64_t step = model.meta.step;
  int64_t local_step = 0;

  struct Ranked {
    double val;
    int epoch;
    ModelCheckpoint ckpt;
  };
  std::vector<Ranked> best;
  double best_val = kInfinity;
  int since_best = 0;
  double lr = 0.0;

  for (int epoch = 1; epoch <= schedule.max_epochs && local_step < total_steps; ++epoch) {
    std::shuffle(usable.begin(), usable.end(), rng);
    double epoch_loss = 0.0;
    for (size_t start = 0; start < usable.size() && local_step < total_steps;
         start += schedule.batch_size) {
      size_t end = std::min(usable.size(), start + schedule.batch_size);
      TensorMap grad;
      for (size_t b = start; b < end; ++b) {
        const Utterance &u = train[usable[b]];
        LossGrad lg = ComputeLossGrad(model, u.features, u.labels, schedule.normalization, &rng);
        epoch_loss += lg.loss;
        for (auto &[name, g] : lg.grads) {
          auto it = grad.find(name);
          if (it == grad.end())
            grad.emplace(name, std::move(g));
          else
            it->second += g;
        }
      }
      const double inv = 1.0 / static_cast<double>(end - start);
      double norm2 = 0.0;
      for (auto &[name, g] : grad) {
        g *= inv;
        norm2 += g.squaredNorm();
      }
      double clip = 1.0;
      if (schedule.grad_clip > 0 && std::sqrt(norm2) > schedule.grad_clip)
        clip = schedule.grad_clip / std::sqrt(norm2);
      ++step;
      ++local_step;
      lr = NoamLearningRate(schedule.peak_lr, warmup, local_step);
      const double c1 = 1.0 - std::pow(schedule.adam_beta1, static_cast<double>(local_step));
      const double c2 = 1.0 - std::pow(schedule.adam_beta2, static_cast<double>(local_step));
      for (auto &[name, p] : model.params) {
        Matrix g = grad.at(name) * clip;
        Matrix &a = m1.at(name);
        Matrix &v = m2.at(name);
        a = schedule.adam_beta1 * a + (1.0 - schedule.adam_beta1) * g;
        v = schedule.adam_beta2 * v + (1.0 - schedule.adam_beta2) * g.cwiseProduct(g);
        p.array() -= lr * (a.array() / c1) / ((v.array() / c2).sqrt() + schedule.adam_eps);
      }
    }
    model.meta.step = step;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = epoch_loss / static_cast<double>(usable.size());
    rec.val_loss = val.empty() ? EvaluateLoss(model, train, schedule.normalization)
                               : EvaluateLoss(model, val, schedule.normalization);
    rec.learning_rate = lr;
    rec.step = step;
    result.history.epochs.push_back(rec);
    if (!std::isfinite(rec.train_loss))
      Fail(ErrorCode::kNumeric, "training diverged at epoch " + std::to_string(epoch));

    best.push_back({rec.val_loss, epoch, model});
    std::stable_sort(best.begin(), best.end(),
                     [](const Ranked &a, const Ranked &b) { return a.val < b.val; });
    if (static_cast<int>(best.size()) > schedule.avg_top_k) best.pop_back();

    if (rec.val_loss < best_val) {
      best_val = rec.val_loss;
      since_best = 0;
      result.history.epochs_to_converge = epoch;
    } else if (++since_best >= schedule.early_stop_patience) {
      result.history.early_stopped = true;
      break;
    }
  }

  std::vector<ModelCheckpoint> top;
  for (const auto &r : best) {
    top.push_back(r.ckpt);
    result.history.averaged_epochs.push_back(r.epoch);
  }
  result.checkpoint = AverageCheckpoints(top);
  result.checkpoint.meta.step = step;
  result.checkpoint.meta.seed = seed;
  result.checkpoint.meta.schedule_json = schedule.ToJson();
  return result;
}

const char *TransferModeName(TransferMode m) {
  return m == TransferMode::kCopyShared ? "copy_shared" : "random_all";
}

TransferMode ParseTransferMode(const std::string &name) {
  if (name == "copy_shared") return TransferMode::kCopyShared;
  if (name == "random_all") return TransferMode::kRandomAll;
  Fail(ErrorCode::kConfig, "unknown transfer mode '" + name +
                               "' (expected copy_shared or random_all)");
}

ModelCheckpoint TransferInit(const ModelCheckpoint &pretrained, const Alphabet &target,
                             TransferMode mode, uint64_t seed) {
  const int d = pretrained.config.hidden_dim;
  if (pretrained.W().cols() != d)
    Fail(ErrorCode::kShape, "output matrix width " + std::to_string(pretrained.W().cols()) +
                                " does not match hidden dimension " + std::to_string(d));
  if (mode == TransferMode::kCopyShared && pretrained.alphabet.kind() != target.kind())
    Fail(ErrorCode::kInvalidArgument, "copy_shared needs alphabets of the same kind");
  ModelCheckpoint out = pretrained;
  out.alphabet = target;
  out.meta.step = 0;
  out.meta.seed = seed;
  Matrix w(target.size(), d);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  for (int32_t k = 0; k < target.size(); ++k) {
    const std::string &sym = target.SymbolAt(k);
    if (mode == TransferMode::kCopyShared && pretrained.alphabet.Contains(sym)) {
      w.row(k) = pretrained.W().row(pretrained.alphabet.IndexOf(sym));
    } else {
      for (int c = 0; c < d; ++c) w(k, c) = n(rng);
    }
  }
  out.W() = std::move(w);
  return out;
}

std::vector<EmbeddingRow> ExportEmbeddings(const ModelCheckpoint &ckpt) {
  std::vector<EmbeddingRow> rows;
  const Matrix &w = ckpt.W();
  for (int32_t k = 0; k < ckpt.alphabet.size(); ++k) {
    EmbeddingRow r{ckpt.alphabet.SymbolAt(k), std::vector<double>(w.cols())};
    for (Eigen::Index c = 0; c < w.cols(); ++c) r.values[c] = w(k, c);
    rows.push_back(std::move(r));
  }
  return rows;
}

void WriteEmbeddings(const std::string &path, const std::vector<EmbeddingRow> &rows) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  for (const auto &r : rows) {
    out << r.symbol;
    for (double v : r.values) out << '\t' << FormatWeight(v);
    out << '\n';
  }
}

}  // namespace mlasr
