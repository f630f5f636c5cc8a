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

#include "mlasr/model.h"

namespace mlasr {

struct TrainSchedule {
  double peak_lr = 2e-3;
  int64_t total_steps = 0;  // 0: max_epochs * batches per epoch
  double warmup_fraction = 0.10;
  int batch_size = 8;
  int max_epochs = 60;
  int early_stop_patience = 10;
  int avg_top_k = 3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.98;
  double adam_eps = 1e-9;
  double grad_clip = 5.0;  // global L2 norm; 0 disables
  LossNormalization normalization = LossNormalization::kFrames;

  void Validate() const;
  std::string ToJson() const;
  static TrainSchedule FromJson(const std::string &json_text);
};

// Noam schedule peaking at exactly peak_lr when step == warmup_steps.
int64_t WarmupSteps(const TrainSchedule &s, int64_t total_steps);
double NoamLearningRate(double peak_lr, int64_t warmup_steps, int64_t step);

struct Utterance {
  Matrix features;
  LabelSequence labels;
};

struct EpochRecord {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double learning_rate = 0.0;  // at the last step of the epoch
  int64_t step = 0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  int epochs_to_converge = 0;  // epoch with the best validation loss
  std::vector<int> averaged_epochs;
  size_t skipped_utterances = 0;  // infeasible for CTC at the model frame rate
  bool early_stopped = false;
};

struct TrainResult {
  ModelCheckpoint checkpoint;
  TrainHistory history;
};

// Mean normalized CTC loss; infeasible utterances are ignored.
double EvaluateLoss(const ModelCheckpoint &ckpt, const std::vector<Utterance> &data,
                    LossNormalization norm);

// Adam under the Noam schedule on the normalized CTC loss. After every epoch
// the validation loss (training loss if `val` is empty) ranks the epoch's
// parameters; training stops after `early_stop_patience` epochs without
// improvement and returns the mean of the `avg_top_k` best checkpoints.
// Throws kEmpty if no training utterance is feasible.
TrainResult Train(ModelCheckpoint init, const std::vector<Utterance> &train,
                  const std::vector<Utterance> &val, const TrainSchedule &schedule,
                  uint64_t seed);

// Element-wise mean of checkpoints sharing config and alphabet.
ModelCheckpoint AverageCheckpoints(const std::vector<ModelCheckpoint> &ckpts);

enum class TransferMode { kCopyShared, kRandomAll };
const char *TransferModeName(TransferMode m);
TransferMode ParseTransferMode(const std::string &name);

// Copies the encoder and builds W for `target`: rows of units present in the
// pretrained alphabet are copied (kCopyShared), every other row is drawn
// from N(0, 1/sqrt(D)) in target index order.
ModelCheckpoint TransferInit(const ModelCheckpoint &pretrained, const Alphabet &target,
                             TransferMode mode, uint64_t seed);

struct EmbeddingRow {
  std::string symbol;
  std::vector<double> values;
};

std::vector<EmbeddingRow> ExportEmbeddings(const ModelCheckpoint &ckpt);
// `symbol<TAB>v1<TAB>v2...`, shortest round-trip decimals.
void WriteEmbeddings(const std::string &path, const std::vector<EmbeddingRow> &rows);

}  // namespace mlasr
