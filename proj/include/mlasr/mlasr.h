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

#ifndef MLASR_MLASR_H_
#define MLASR_MLASR_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define MLASR_API __declspec(dllexport)
#else
#define MLASR_API __attribute__((visibility("default")))
#endif

typedef enum {
  MLASR_OK = 0,
  MLASR_ERR_INVALID_ARGUMENT = 1,
  MLASR_ERR_LOOKUP = 2,
  MLASR_ERR_SHAPE = 3,
  MLASR_ERR_NUMERIC = 4,
  MLASR_ERR_INFEASIBLE = 5,
  MLASR_ERR_IO = 6,
  MLASR_ERR_FORMAT = 7,
  MLASR_ERR_STRUCTURE = 8,
  MLASR_ERR_DECODE_FAILURE = 9,
  MLASR_ERR_CONFIG = 10,
  MLASR_ERR_EMPTY = 11,
  MLASR_ERR_INTERNAL = 12,
} mlasr_status;

/* Message of the last failed call on this thread; "" after a success. */
MLASR_API const char *mlasr_last_error(void);
MLASR_API const char *mlasr_status_name(mlasr_status status);
MLASR_API const char *mlasr_version(void);

/* Strings returned through char** out-parameters are owned by the caller. */
MLASR_API void mlasr_string_free(char *s);

/* Text processing. `rules_json` may be NULL for the default rules. A
 * rejected sentence yields MLASR_OK with *out == NULL. */
MLASR_API mlasr_status mlasr_normalize(const char *text, const char *rules_json, char **out);

/* Up to `nbest` pronunciations of `word`, one per line: units<TAB>weight. */
MLASR_API mlasr_status mlasr_g2p_apply(const char *g2p_path, const char *word, int nbest,
                                       char **out);

/* Lexicon for the words (one per line) of `words_path`. */
MLASR_API mlasr_status mlasr_lexicon_build(const char *words_path, const char *g2p_path,
                                           int nbest, const char *out_path,
                                           size_t *unpronounceable);

/* Subword tokenizer over one or more sentence files. With several files the
 * training text is `total` sentences resampled with exponent `beta` (total 0
 * keeps the original number). */
MLASR_API mlasr_status mlasr_bpe_train(const char *const *text_paths, size_t num_paths,
                                       int vocab_size, double beta, int64_t total,
                                       uint64_t seed, const char *out_path);
/* Space separated tokens. */
MLASR_API mlasr_status mlasr_bpe_encode(const char *model_path, const char *sentence,
                                        char **out);

MLASR_API mlasr_status mlasr_lm_train(const char *text_path, int order, const char *arpa_path);

/* T o L o G for a unit listing (one unit per line, blank implied). */
MLASR_API mlasr_status mlasr_graph_build(const char *units_path, const char *kind,
                                         const char *lexicon_path, const char *arpa_path,
                                         const char *out_path);

typedef struct mlasr_model mlasr_model;
typedef struct mlasr_graph mlasr_graph;

MLASR_API mlasr_status mlasr_model_load(const char *path, mlasr_model **model);
MLASR_API void mlasr_model_free(mlasr_model *model);
MLASR_API int32_t mlasr_model_num_units(const mlasr_model *model);  /* blank included */
MLASR_API const char *mlasr_model_unit(const mlasr_model *model, int32_t index);
MLASR_API int32_t mlasr_model_input_dim(const mlasr_model *model);
MLASR_API int32_t mlasr_model_output_frames(const mlasr_model *model, int32_t frames);

/* Row-major log posteriors, output_frames x num_units doubles. */
MLASR_API mlasr_status mlasr_model_forward(const mlasr_model *model, const float *features,
                                           int32_t frames, int32_t dim, double *log_probs);

MLASR_API mlasr_status mlasr_graph_load(const char *fst_path, mlasr_graph **graph);
MLASR_API void mlasr_graph_free(mlasr_graph *graph);

typedef struct {
  int32_t beam;           /* tokens per frame (prefix width without a graph) */
  double score_beam;      /* <= 0: unlimited */
  double acoustic_scale;
} mlasr_decode_options;

MLASR_API mlasr_decode_options mlasr_decode_default_options(void);

/* Space separated words. */
MLASR_API mlasr_status mlasr_decode(const mlasr_model *model, const mlasr_graph *graph,
                                    const float *features, int32_t frames, int32_t dim,
                                    const mlasr_decode_options *options, char **words,
                                    double *weight);
/* Space separated units of the best prefix search hypothesis. */
MLASR_API mlasr_status mlasr_decode_lexicon_free(const mlasr_model *model,
                                                 const float *features, int32_t frames,
                                                 int32_t dim, int32_t beam, char **units);

/* Decodes every record of a feature file, one output line per record. A
 * NULL graph selects lexicon-free prefix search (units instead of words).
 * Records where no token survives give an empty line and are counted in
 * *failures (if non-NULL). */
MLASR_API mlasr_status mlasr_decode_file(const mlasr_model *model, const mlasr_graph *graph,
                                         const char *feats_path,
                                         const mlasr_decode_options *options, char **lines,
                                         size_t *failures);

/* Training from a JSON request; see the README for the keys. On success
 * *history_json (if non-NULL) receives the per-epoch history. */
MLASR_API mlasr_status mlasr_train(const char *request_json, char **history_json);
MLASR_API mlasr_status mlasr_finetune(const char *request_json, char **history_json);

typedef struct {
  int64_t substitutions;
  int64_t deletions;
  int64_t insertions;
  int64_t reference_length;
} mlasr_error_counts;

/* Pooled error rate (percent) of line-aligned reference and hypothesis
 * files; tokens are whitespace separated. */
MLASR_API mlasr_status mlasr_eval(const char *ref_path, const char *hyp_path,
                                  mlasr_error_counts *counts, double *rate);

MLASR_API mlasr_status mlasr_world_generate(const char *config_json, const char *dir);
MLASR_API mlasr_status mlasr_experiment_run(const char *world_dir, const char *config_json,
                                            const char *out_dir, char **report_json);
MLASR_API mlasr_status mlasr_embeddings_export(const char *checkpoint_path,
                                               const char *out_path);

#ifdef __cplusplus
}
#endif

#endif  // MLASR_MLASR_H_
