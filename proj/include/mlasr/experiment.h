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

#include "mlasr/bpe.h"
#include "mlasr/decoder.h"
#include "mlasr/graph.h"
#include "mlasr/model.h"
#include "mlasr/trainer.h"
#include "mlasr/world.h"

namespace mlasr {

enum class ExperimentMode {
  kMonolingual,
  kMultilingualPhoneme,
  kMultilingualSubword,
  kCrosslingualFt,
};

const char *ExperimentModeName(ExperimentMode m);
ExperimentMode ParseExperimentMode(const std::string &name);

struct DecodeSettings {
  int prefix_beam = kDefaultBeamWidth;
  int max_active = 256;      // WFST tokens kept per frame
  double score_beam = 16.0;  // WFST cost beam
  double acoustic_scale = 1.0;
  int lm_order = 4;
};

// A scale of 0 means the whole training split.
inline constexpr int kAllUtterances = 0;

struct ExperimentConfig {
  std::string id = "exp";
  ExperimentMode mode = ExperimentMode::kMonolingual;
  // Supervision of monolingual and fine-tuning runs.
  UnitKind units = UnitKind::kPhoneme;
  // Training (or fine-tuning target) languages; empty selects every seen
  // language for the multilingual modes.
  std::vector<std::string> languages;
  // Languages scored by a multilingual model; empty means `languages`.
  std::vector<std::string> eval_languages;
  std::vector<int> scales{kAllUtterances};
  std::vector<std::string> eval_splits{"test"};

  // Fine-tuning.
  std::string pretrained;      // checkpoint path
  std::string pretrained_bpe;  // BPE model of a subword checkpoint
  TransferMode transfer = TransferMode::kCopyShared;
  // Output layer covers the pretrained units plus the target units.
  bool union_alphabet = false;
  // Seen languages scored with the pretrained model before and after
  // fine-tuning; yields per-language WER and a WARD row.
  std::vector<std::string> forgetting_languages;

  int bpe_vocab_size = 200;
  double bpe_beta = 0.5;

  EncoderConfig encoder;
  TrainSchedule schedule;
  DecodeSettings decode;
  uint64_t seed = 1;

  void Validate() const;
  std::string ToJson() const;
  static ExperimentConfig FromJson(const std::string &json_text);
};

struct ResultRow {
  std::string experiment;  // <id>/<scale>, scale being a count or "all"
  std::string language;    // "macro" for averages over languages
  std::string split;
  std::string metric;      // per, wer, wer_lexicon_free, wer_before, ward, ...
  double value = 0.0;
};

struct RunHistory {
  std::string run;
  TrainHistory history;
};

struct ExperimentReport {
  std::string id;
  std::vector<ResultRow> rows;
  std::vector<RunHistory> histories;
  std::string json;  // report.json contents

  // Throws kLookup when the row is absent.
  double Value(const std::string &experiment, const std::string &language,
               const std::string &split, const std::string &metric) const;
};

std::string ScaleLabel(int scale);

// Trains and scores every (language, scale) the config asks for. With a
// non-empty `out_dir` writes results.csv, report.json, history.csv and the
// trained checkpoints (plus BPE models for subword runs).
ExperimentReport RunExperiment(const WorldInfo &world, const ExperimentConfig &config,
                               const std::string &out_dir = "");

}  // namespace mlasr
