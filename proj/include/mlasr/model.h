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
#include <map>
#include <random>
#include <string>
#include <vector>

#include "mlasr/ctc.h"
#include "mlasr/inventory.h"

namespace mlasr {

// Strided 1-D convolution to width D, then num_blocks residual blocks of
// {D -> 4D affine, ReLU, dropout, 4D -> D affine, residual add, LayerNorm}.
// The output layer W maps each D-dimensional frame to |alphabet| logits.
struct EncoderConfig {
  int input_dim = 80;
  int hidden_dim = 64;
  int num_blocks = 2;
  int subsample_stride = 2;
  int kernel_size = 9;
  double dropout = 0.1;

  void Validate() const;
  int OutputFrames(int input_frames) const;
  std::string ToJson() const;
  static EncoderConfig FromJson(const std::string &json_text);
  bool operator==(const EncoderConfig &) const = default;
};

struct CheckpointMeta {
  uint64_t seed = 0;
  int64_t step = 0;
  std::string schedule_json = "{}";  // optimizer/schedule state, free form
};

using TensorMap = std::map<std::string, Matrix>;

struct ModelCheckpoint {
  EncoderConfig config;
  Alphabet alphabet;
  TensorMap params;  // biases and gains are 1 x n
  CheckpointMeta meta;

  // Output matrix W, (|alphabet|) x D; row k is the embedding of unit k.
  const Matrix &W() const;
  Matrix &W();

  // Throws kShape on missing/misshapen tensors, kNumeric on non-finite values.
  void Validate() const;
};

inline constexpr const char *kOutputWeight = "output.weight";

// Fresh parameters: N(0, 1/sqrt(fan_in)) weights, zero biases, unit gains.
ModelCheckpoint InitCheckpoint(const EncoderConfig &config, const Alphabet &alphabet,
                               uint64_t seed);

// Encoder output h_{1:T'} (T' x D), inference mode.
Matrix Encode(const ModelCheckpoint &ckpt, const Matrix &features);

// Posteriors softmax(W h_t) per frame. Throws kShape on a
// feature dimension mismatch and kNumeric on non-finite output.
PosteriorGrid Forward(const ModelCheckpoint &ckpt, const Matrix &features);

struct LossGrad {
  double loss = 0.0;  // normalized CTC loss
  TensorMap grads;    // same keys and shapes as the parameters
};

// Normalized CTC loss of one utterance and its parameter gradient. With a
// non-null `rng` and config.dropout > 0 the dropout masks are sampled from it.
LossGrad ComputeLossGrad(const ModelCheckpoint &ckpt, const Matrix &features,
                         const LabelSequence &labels, LossNormalization norm,
                         std::mt19937_64 *rng = nullptr);

// Versioned binary container: "MLCK", u32 version, u32 unit kind, alphabet
// listing, metadata JSON, named float64 tensors. Little endian throughout.
void WriteCheckpoint(const std::string &path, const ModelCheckpoint &ckpt);
ModelCheckpoint ReadCheckpoint(const std::string &path);

// Feature records: "MLFT", u32 T, u32 dim, T*dim little-endian float32.
// A feature file holds one or more consecutive records.
void AppendFeatureRecord(std::ostream &out, const Matrix &features);
std::vector<Matrix> ReadFeatureRecords(const std::string &path);

}  // namespace mlasr
