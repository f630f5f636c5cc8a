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

#include <limits>
#include <string>
#include <vector>

#include "mlasr/ctc.h"
#include "mlasr/fst.h"
#include "mlasr/inventory.h"

namespace mlasr {

inline constexpr int kUnlimitedBeam = std::numeric_limits<int>::max();

struct DecodeOptions {
  int beam = kDefaultBeamWidth;       // max tokens kept per frame
  double score_beam = kInfinity;      // drop tokens this much worse than the best
  double acoustic_scale = 1.0;
};

struct DecodeResult {
  std::vector<std::string> words;
  double weight = 0.0;  // acoustic_scale * acoustic cost + graph cost
};

// Time-synchronous Viterbi token passing over a T o L o G graph. Input label
// l of the graph reads grid column `alphabet.IndexOf(isyms.Symbol(l))`.
// Throws kDecodeFailure when no token reaches a final state.
DecodeResult Decode(const PosteriorGrid &grid, const Fst &graph,
                    const Alphabet &alphabet, const DecodeOptions &options = {});

}  // namespace mlasr
