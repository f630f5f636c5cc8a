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

#include "mlasr/mlasr.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlasr/bpe.h"
#include "mlasr/decoder.h"
#include "mlasr/error.h"
#include "mlasr/experiment.h"
#include "mlasr/graph.h"
#include "mlasr/lexicon.h"
#include "mlasr/metrics.h"
#include "mlasr/model.h"
#include "mlasr/ngram.h"
#include "mlasr/textnorm.h"
#include "mlasr/trainer.h"
#include "mlasr/utf8.h"
#include "mlasr/world.h"

struct mlasr_model {
  mlasr::ModelCheckpoint ckpt;
};

struct mlasr_graph {
  mlasr::Fst fst;
};

namespace {

using namespace mlasr;
using nlohmann::json;

thread_local std::string g_last_error;

template <typename F>
mlasr_status Guard(F &&body) {
  try {
    body();
    g_last_error.clear();
    return MLASR_OK;
  } catch (const Error &e) {
    g_last_error = e.what();
    return static_cast<mlasr_status>(e.code());
  } catch (const std::bad_alloc &) {
    g_last_error = "out of memory";
    return MLASR_ERR_INTERNAL;
  } catch (const std::exception &e) {
    g_last_error = e.what();
    return MLASR_ERR_INTERNAL;
  }
}

void Require(const void *p, const char *name) {
  if (!p) Fail(ErrorCode::kInvalidArgument, std::string(name) + " is NULL");
}

char *Dup(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> ReadLines(const std::string &path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot read " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

Matrix FeaturesFrom(const float *features, int32_t frames, int32_t dim) {
  if (frames < 1 || dim < 1) Fail(ErrorCode::kShape, "features need frames >= 1 and dim >= 1");
  Require(features, "features");
  Matrix m(frames, dim);
  for (int32_t t = 0; t < frames; ++t)
    for (int32_t k = 0; k < dim; ++k) m(t, k) = features[static_cast<size_t>(t) * dim + k];
  return m;
}

std::vector<Utterance> LoadUtterances(const std::string &feats_path,
                                      const std::string &labels_path,
                                      const Alphabet &alphabet) {
  auto feats = ReadFeatureRecords(feats_path);
  auto lines = ReadLines(labels_path);
  if (feats.size() != lines.size())
    Fail(ErrorCode::kFormat, labels_path + ": " + std::to_string(lines.size()) +
                                 " label lines for " + std::to_string(feats.size()) +
                                 " feature records");
  std::vector<Utterance> out;
  for (size_t i = 0; i < lines.size(); ++i) {
    LabelSequence labels;
    for (const auto &sym : utf8::SplitWhitespace(lines[i])) {
      if (!alphabet.Contains(sym) || alphabet.IndexOf(sym) == kBlankIndex)
        Fail(ErrorCode::kLookup,
             labels_path + ":" + std::to_string(i + 1) + ": unknown unit '" + sym + "'");
      labels.push_back(alphabet.IndexOf(sym));
    }
    out.push_back({std::move(feats[i]), std::move(labels)});
  }
  return out;
}

std::string HistoryJson(const TrainHistory &h) {
  json epochs = json::array();
  for (const auto &e : h.epochs)
    epochs.push_back({{"epoch", e.epoch},
                      {"train_loss", e.train_loss},
                      {"val_loss", e.val_loss},
                      {"learning_rate", e.learning_rate},
                      {"step", e.step}});
  json j{{"epochs", epochs},
         {"epochs_to_converge", h.epochs_to_converge},
         {"averaged_epochs", h.averaged_epochs},
         {"skipped_utterances", h.skipped_utterances},
         {"early_stopped", h.early_stopped}};
  return j.dump(2);
}

// Shared by train and finetune: `init` builds the starting checkpoint.
template <typename InitFn>
void RunTraining(const char *request_json, char **history_json, InitFn &&init) {
  Require(request_json, "request_json");
  json req;
  try {
    req = json::parse(request_json);
  } catch (const json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("bad training request: ") + e.what());
  }
  auto get = [&](const char *key, bool required) -> std::string {
    if (!req.contains(key)) {
      if (required) Fail(ErrorCode::kConfig, std::string("training request needs '") + key + "'");
      return "";
    }
    if (!req[key].is_string()) Fail(ErrorCode::kConfig, std::string("'") + key + "' must be a string");
    return req[key].get<std::string>();
  };
  TrainSchedule schedule;
  if (req.contains("schedule")) schedule = TrainSchedule::FromJson(req["schedule"].dump());
  uint64_t seed = req.value("seed", uint64_t{1});
  std::string output = get("output", true);
  ModelCheckpoint start = init(req, get, seed);
  auto train = LoadUtterances(get("train_features", true), get("train_labels", true),
                              start.alphabet);
  std::vector<Utterance> dev;
  std::string dev_feats = get("dev_features", false);
  if (!dev_feats.empty()) dev = LoadUtterances(dev_feats, get("dev_labels", true), start.alphabet);
  auto result = Train(std::move(start), train, dev, schedule, seed);
  WriteCheckpoint(output, result.checkpoint);
  if (history_json) *history_json = Dup(HistoryJson(result.history));
}

}  // namespace

extern "C" {

const char *mlasr_last_error(void) { return g_last_error.c_str(); }

const char *mlasr_status_name(mlasr_status status) {
  if (status == MLASR_OK) return "ok";
  if (status < MLASR_ERR_INVALID_ARGUMENT || status > MLASR_ERR_INTERNAL) return "unknown";
  return ErrorCodeName(static_cast<ErrorCode>(status));
}

const char *mlasr_version(void) { return "0.1.0"; }

void mlasr_string_free(char *s) { std::free(s); }

mlasr_status mlasr_normalize(const char *text, const char *rules_json, char **out) {
  return Guard([&] {
    Require(text, "text");
    Require(out, "out");
    NormRules rules = rules_json ? NormRulesFromJson(rules_json) : NormRules{};
    auto r = Normalize(text, rules);
    *out = r.rejected ? nullptr : Dup(r.text);
  });
}

mlasr_status mlasr_g2p_apply(const char *g2p_path, const char *word, int nbest, char **out) {
  return Guard([&] {
    Require(g2p_path, "g2p_path");
    Require(word, "word");
    Require(out, "out");
    auto prons = ApplyG2p(ReadFstText(std::string(g2p_path)), word, nbest);
    std::string s;
    for (const auto &p : prons) s += utf8::Join(p.units, " ") + "\t" + FormatWeight(p.weight) + "\n";
    *out = Dup(s);
  });
}

mlasr_status mlasr_lexicon_build(const char *words_path, const char *g2p_path, int nbest,
                                 const char *out_path, size_t *unpronounceable) {
  return Guard([&] {
    Require(words_path, "words_path");
    Require(g2p_path, "g2p_path");
    Require(out_path, "out_path");
    std::vector<std::string> words;
    for (const auto &line : ReadLines(words_path))
      for (auto &w : utf8::SplitWhitespace(line)) words.push_back(std::move(w));
    auto built = BuildProlex(words, ReadFstText(std::string(g2p_path)), nbest);
    WriteLexicon(out_path, built.prolex);
    if (unpronounceable) *unpronounceable = built.unpronounceable.size();
  });
}

mlasr_status mlasr_bpe_train(const char *const *text_paths, size_t num_paths, int vocab_size,
                             double beta, int64_t total, uint64_t seed, const char *out_path) {
  return Guard([&] {
    Require(text_paths, "text_paths");
    Require(out_path, "out_path");
    if (num_paths == 0) Fail(ErrorCode::kInvalidArgument, "no text files");
    std::vector<std::vector<std::string>> corpora;
    LanguageStats stats;
    stats.beta = beta;
    int64_t n = 0;
    for (size_t i = 0; i < num_paths; ++i) {
      Require(text_paths[i], "text path");
      std::vector<std::string> lines;
      for (auto &l : ReadLines(text_paths[i]))
        if (!utf8::SplitWhitespace(l).empty()) lines.push_back(std::move(l));
      stats.languages.push_back(text_paths[i]);
      stats.counts.push_back(static_cast<int64_t>(lines.size()));
      n += stats.counts.back();
      corpora.push_back(std::move(lines));
    }
    std::vector<std::string> sentences;
    if (num_paths == 1) {
      sentences = corpora.front();
    } else {
      for (auto &s : SampleCorpus(corpora, stats, total > 0 ? total : n, seed))
        sentences.push_back(std::move(s.sentence));
    }
    WriteBpeModel(out_path, TrainBpe(sentences, vocab_size));
  });
}

mlasr_status mlasr_bpe_encode(const char *model_path, const char *sentence, char **out) {
  return Guard([&] {
    Require(model_path, "model_path");
    Require(sentence, "sentence");
    Require(out, "out");
    *out = Dup(utf8::Join(ReadBpeModel(model_path).Encode(sentence), " "));
  });
}

mlasr_status mlasr_lm_train(const char *text_path, int order, const char *arpa_path) {
  return Guard([&] {
    Require(text_path, "text_path");
    Require(arpa_path, "arpa_path");
    std::vector<WordSequence> sentences;
    for (const auto &line : ReadLines(text_path)) {
      auto words = utf8::SplitWhitespace(line);
      if (!words.empty()) sentences.push_back(std::move(words));
    }
    WriteArpa(arpa_path, TrainNGram(sentences, order));
  });
}

mlasr_status mlasr_graph_build(const char *units_path, const char *kind,
                               const char *lexicon_path, const char *arpa_path,
                               const char *out_path) {
  return Guard([&] {
    Require(units_path, "units_path");
    Require(lexicon_path, "lexicon_path");
    Require(arpa_path, "arpa_path");
    Require(out_path, "out_path");
    auto alphabet = ReadAlphabetListing(units_path, ParseUnitKind(kind ? kind : "phoneme"));
    auto graph = BuildDecodeGraph(alphabet, ReadLexicon(lexicon_path), ReadArpa(arpa_path));
    WriteFstText(graph.fst, std::string(out_path));
  });
}

mlasr_status mlasr_model_load(const char *path, mlasr_model **model) {
  return Guard([&] {
    Require(path, "path");
    Require(model, "model");
    *model = new mlasr_model{ReadCheckpoint(path)};
  });
}

void mlasr_model_free(mlasr_model *model) { delete model; }

int32_t mlasr_model_num_units(const mlasr_model *model) {
  return model ? model->ckpt.alphabet.size() : 0;
}

const char *mlasr_model_unit(const mlasr_model *model, int32_t index) {
  if (!model || index < 0 || index >= model->ckpt.alphabet.size()) return nullptr;
  return model->ckpt.alphabet.SymbolAt(index).c_str();
}

int32_t mlasr_model_input_dim(const mlasr_model *model) {
  return model ? model->ckpt.config.input_dim : 0;
}

int32_t mlasr_model_output_frames(const mlasr_model *model, int32_t frames) {
  return model ? model->ckpt.config.OutputFrames(frames) : 0;
}

mlasr_status mlasr_model_forward(const mlasr_model *model, const float *features,
                                 int32_t frames, int32_t dim, double *log_probs) {
  return Guard([&] {
    Require(model, "model");
    Require(log_probs, "log_probs");
    auto grid = Forward(model->ckpt, FeaturesFrom(features, frames, dim));
    std::memcpy(log_probs, grid.log_probs.data(), sizeof(double) * grid.log_probs.size());
  });
}

mlasr_status mlasr_graph_load(const char *fst_path, mlasr_graph **graph) {
  return Guard([&] {
    Require(fst_path, "fst_path");
    Require(graph, "graph");
    *graph = new mlasr_graph{ReadFstText(std::string(fst_path))};
  });
}

void mlasr_graph_free(mlasr_graph *graph) { delete graph; }

mlasr_decode_options mlasr_decode_default_options(void) {
  return {kDefaultBeamWidth, 0.0, 1.0};
}

mlasr_status mlasr_decode(const mlasr_model *model, const mlasr_graph *graph,
                          const float *features, int32_t frames, int32_t dim,
                          const mlasr_decode_options *options, char **words, double *weight) {
  return Guard([&] {
    Require(model, "model");
    Require(graph, "graph");
    Require(words, "words");
    mlasr_decode_options o = options ? *options : mlasr_decode_default_options();
    if (o.beam < 1) Fail(ErrorCode::kInvalidArgument, "beam must be >= 1");
    DecodeOptions opts{o.beam, o.score_beam > 0 ? o.score_beam : kInfinity, o.acoustic_scale};
    auto grid = Forward(model->ckpt, FeaturesFrom(features, frames, dim));
    auto r = Decode(grid, graph->fst, model->ckpt.alphabet, opts);
    *words = Dup(utf8::Join(r.words, " "));
    if (weight) *weight = r.weight;
  });
}

mlasr_status mlasr_decode_lexicon_free(const mlasr_model *model, const float *features,
                                       int32_t frames, int32_t dim, int32_t beam, char **units) {
  return Guard([&] {
    Require(model, "model");
    Require(units, "units");
    if (beam < 1) Fail(ErrorCode::kInvalidArgument, "beam must be >= 1");
    auto grid = Forward(model->ckpt, FeaturesFrom(features, frames, dim));
    auto hyps = PrefixBeamSearch(grid, beam);
    std::vector<std::string> syms;
    if (!hyps.empty())
      for (int32_t l : hyps.front().labels) syms.push_back(model->ckpt.alphabet.SymbolAt(l));
    *units = Dup(utf8::Join(syms, " "));
  });
}

mlasr_status mlasr_decode_file(const mlasr_model *model, const mlasr_graph *graph,
                               const char *feats_path, const mlasr_decode_options *options,
                               char **lines, size_t *failures) {
  return Guard([&] {
    Require(model, "model");
    Require(feats_path, "feats_path");
    Require(lines, "lines");
    size_t failed = 0;
    mlasr_decode_options o = options ? *options : mlasr_decode_default_options();
    if (o.beam < 1) Fail(ErrorCode::kInvalidArgument, "beam must be >= 1");
    DecodeOptions opts{o.beam, o.score_beam > 0 ? o.score_beam : kInfinity, o.acoustic_scale};
    const auto &alphabet = model->ckpt.alphabet;
    std::string out;
    size_t index = 0;
    for (const auto &feats : ReadFeatureRecords(feats_path)) {
      ++index;
      auto grid = Forward(model->ckpt, feats);
      std::vector<std::string> syms;
      if (graph) {
        try {
          syms = Decode(grid, graph->fst, alphabet, opts).words;
        } catch (const Error &e) {
          if (e.code() != ErrorCode::kDecodeFailure) throw;
          ++failed;
        }
      } else {
        auto hyps = PrefixBeamSearch(grid, o.beam);
        if (!hyps.empty())
          for (int32_t l : hyps.front().labels) syms.push_back(alphabet.SymbolAt(l));
      }
      out += utf8::Join(syms, " ") + "\n";
    }
    *lines = Dup(out);
    if (failures) *failures = failed;
  });
}

mlasr_status mlasr_train(const char *request_json, char **history_json) {
  return Guard([&] {
    RunTraining(request_json, history_json, [](const json &req, auto &get, uint64_t seed) {
      auto kind = ParseUnitKind(req.value("kind", std::string("phoneme")));
      auto alphabet = ReadAlphabetListing(get("units", true), kind);
      EncoderConfig enc;
      if (req.contains("encoder")) enc = EncoderConfig::FromJson(req["encoder"].dump());
      return InitCheckpoint(enc, alphabet, seed);
    });
  });
}

mlasr_status mlasr_finetune(const char *request_json, char **history_json) {
  return Guard([&] {
    RunTraining(request_json, history_json, [](const json &req, auto &get, uint64_t seed) {
      auto pretrained = ReadCheckpoint(get("pretrained", true));
      std::string units = get("units", false);
      Alphabet target = pretrained.alphabet;
      if (!units.empty()) {
        auto kind = req.contains("kind") ? ParseUnitKind(req["kind"].get<std::string>())
                                         : pretrained.alphabet.kind();
        target = ReadAlphabetListing(units, kind);
      }
      auto mode = ParseTransferMode(req.value("transfer", std::string("copy_shared")));
      return TransferInit(pretrained, target, mode, seed);
    });
  });
}

mlasr_status mlasr_eval(const char *ref_path, const char *hyp_path, mlasr_error_counts *counts,
                        double *rate) {
  return Guard([&] {
    Require(ref_path, "ref_path");
    Require(hyp_path, "hyp_path");
    auto refs = ReadLines(ref_path);
    auto hyps = ReadLines(hyp_path);
    if (refs.size() != hyps.size())
      Fail(ErrorCode::kShape, "reference has " + std::to_string(refs.size()) +
                                  " lines, hypothesis " + std::to_string(hyps.size()));
    ErrorCounts total;
    for (size_t i = 0; i < refs.size(); ++i)
      total += EditDistance(utf8::SplitWhitespace(refs[i]), utf8::SplitWhitespace(hyps[i]));
    double r = CorpusRate(std::vector<ErrorCounts>{total});
    if (counts)
      *counts = {total.substitutions, total.deletions, total.insertions, total.reference_length};
    if (rate) *rate = r;
  });
}

mlasr_status mlasr_world_generate(const char *config_json, const char *dir) {
  return Guard([&] {
    Require(dir, "dir");
    auto config = config_json ? SyntheticWorldConfig::FromJson(config_json) : SyntheticWorldConfig{};
    GenerateWorld(config, dir);
  });
}

mlasr_status mlasr_experiment_run(const char *world_dir, const char *config_json,
                                  const char *out_dir, char **report_json) {
  return Guard([&] {
    Require(world_dir, "world_dir");
    Require(config_json, "config_json");
    auto report = RunExperiment(OpenWorld(world_dir), ExperimentConfig::FromJson(config_json),
                                out_dir ? out_dir : "");
    if (report_json) *report_json = Dup(report.json);
  });
}

mlasr_status mlasr_embeddings_export(const char *checkpoint_path, const char *out_path) {
  return Guard([&] {
    Require(checkpoint_path, "checkpoint_path");
    Require(out_path, "out_path");
    WriteEmbeddings(out_path, ExportEmbeddings(ReadCheckpoint(checkpoint_path)));
  });
}

}  // extern "C"
