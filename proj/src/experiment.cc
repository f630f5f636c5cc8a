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

#include "mlasr/experiment.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <set>

#include "json.hpp"
#include "mlasr/error.h"
#include "mlasr/lexicon.h"
#include "mlasr/metrics.h"
#include "mlasr/ngram.h"
#include "mlasr/utf8.h"

namespace mlasr {

namespace fs = std::filesystem;
using nlohmann::json;

const char *ExperimentModeName(ExperimentMode m) {
  switch (m) {
    case ExperimentMode::kMonolingual: return "monolingual";
    case ExperimentMode::kMultilingualPhoneme: return "multilingual_phoneme";
    case ExperimentMode::kMultilingualSubword: return "multilingual_subword";
    case ExperimentMode::kCrosslingualFt: return "crosslingual_ft";
  }
  return "?";
}

ExperimentMode ParseExperimentMode(const std::string &name) {
  for (auto m : {ExperimentMode::kMonolingual, ExperimentMode::kMultilingualPhoneme,
                 ExperimentMode::kMultilingualSubword, ExperimentMode::kCrosslingualFt})
    if (name == ExperimentModeName(m)) return m;
  Fail(ErrorCode::kConfig, "unknown experiment mode: " + name);
}

std::string ScaleLabel(int scale) {
  return scale == kAllUtterances ? "all" : std::to_string(scale);
}

void ExperimentConfig::Validate() const {
  if (id.empty() || id.find_first_of("/\t\n,") != std::string::npos)
    Fail(ErrorCode::kConfig, "experiment id must be non-empty without '/', ',' or whitespace");
  bool needs_languages =
      mode == ExperimentMode::kMonolingual || mode == ExperimentMode::kCrosslingualFt;
  if (needs_languages && languages.empty())
    Fail(ErrorCode::kConfig, std::string(ExperimentModeName(mode)) + " needs languages");
  if (mode == ExperimentMode::kCrosslingualFt && pretrained.empty())
    Fail(ErrorCode::kConfig, "crosslingual_ft needs a pretrained checkpoint");
  if (scales.empty()) Fail(ErrorCode::kConfig, "scales is empty");
  for (int s : scales)
    if (s < 0) Fail(ErrorCode::kConfig, "scales must be positive or \"all\"");
  if (std::set<int>(scales.begin(), scales.end()).size() != scales.size())
    Fail(ErrorCode::kConfig, "duplicate scale");
  if (eval_splits.empty()) Fail(ErrorCode::kConfig, "eval_splits is empty");
  for (const auto &s : eval_splits)
    if (std::find(kSplits.begin(), kSplits.end(), s) == kSplits.end())
      Fail(ErrorCode::kConfig, "unknown split: " + s);
  if (bpe_vocab_size < 3) Fail(ErrorCode::kConfig, "bpe_vocab_size must be >= 3");
  if (!(bpe_beta >= 0 && bpe_beta <= 1)) Fail(ErrorCode::kConfig, "bpe_beta must lie in [0, 1]");
  if (decode.prefix_beam < 1 || decode.max_active < 1 || !(decode.score_beam > 0) ||
      !(decode.acoustic_scale > 0) || decode.lm_order < 1)
    Fail(ErrorCode::kConfig, "bad decode settings");
  encoder.Validate();
  schedule.Validate();
}

std::string ExperimentConfig::ToJson() const {
  json scale_list = json::array();
  for (int s : scales) {
    if (s == kAllUtterances) scale_list.push_back("all");
    else scale_list.push_back(s);
  }
  json j{{"id", id},
         {"mode", ExperimentModeName(mode)},
         {"units", UnitKindName(units)},
         {"languages", languages},
         {"eval_languages", eval_languages},
         {"scales", scale_list},
         {"eval_splits", eval_splits},
         {"pretrained", pretrained},
         {"pretrained_bpe", pretrained_bpe},
         {"transfer", TransferModeName(transfer)},
         {"union_alphabet", union_alphabet},
         {"forgetting_languages", forgetting_languages},
         {"bpe_vocab_size", bpe_vocab_size},
         {"bpe_beta", bpe_beta},
         {"encoder", json::parse(encoder.ToJson())},
         {"schedule", json::parse(schedule.ToJson())},
         {"decode",
          {{"prefix_beam", decode.prefix_beam},
           {"max_active", decode.max_active},
           {"score_beam", decode.score_beam},
           {"acoustic_scale", decode.acoustic_scale},
           {"lm_order", decode.lm_order}}},
         {"seed", seed}};
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::FromJson(const std::string &json_text) {
  static const std::set<std::string> kKeys{
      "id",         "mode",           "units",          "languages",
      "eval_languages", "scales",     "eval_splits",    "pretrained",
      "pretrained_bpe", "transfer",   "union_alphabet", "forgetting_languages",
      "bpe_vocab_size", "bpe_beta",   "encoder",        "schedule",
      "decode",     "seed"};
  ExperimentConfig c;
  try {
    auto j = json::parse(json_text);
    if (!j.is_object()) Fail(ErrorCode::kConfig, "experiment config must be a JSON object");
    for (const auto &[key, value] : j.items())
      if (!kKeys.count(key)) Fail(ErrorCode::kConfig, "unknown experiment config key: " + key);
    c.id = j.value("id", c.id);
    if (j.contains("mode")) c.mode = ParseExperimentMode(j["mode"].get<std::string>());
    if (j.contains("units")) c.units = ParseUnitKind(j["units"].get<std::string>());
    c.languages = j.value("languages", c.languages);
    c.eval_languages = j.value("eval_languages", c.eval_languages);
    if (j.contains("scales")) {
      c.scales.clear();
      for (const auto &s : j["scales"]) {
        if (s.is_string() && s.get<std::string>() == "all") c.scales.push_back(kAllUtterances);
        else if (s.is_number_integer() && s.get<int>() > 0) c.scales.push_back(s.get<int>());
        else Fail(ErrorCode::kConfig, "scales must be positive integers or \"all\"");
      }
    }
    c.eval_splits = j.value("eval_splits", c.eval_splits);
    c.pretrained = j.value("pretrained", c.pretrained);
    c.pretrained_bpe = j.value("pretrained_bpe", c.pretrained_bpe);
    if (j.contains("transfer")) c.transfer = ParseTransferMode(j["transfer"].get<std::string>());
    c.union_alphabet = j.value("union_alphabet", c.union_alphabet);
    c.forgetting_languages = j.value("forgetting_languages", c.forgetting_languages);
    c.bpe_vocab_size = j.value("bpe_vocab_size", c.bpe_vocab_size);
    c.bpe_beta = j.value("bpe_beta", c.bpe_beta);
    if (j.contains("encoder")) c.encoder = EncoderConfig::FromJson(j["encoder"].dump());
    if (j.contains("schedule")) c.schedule = TrainSchedule::FromJson(j["schedule"].dump());
    if (j.contains("decode")) {
      const auto &d = j["decode"];
      c.decode.prefix_beam = d.value("prefix_beam", c.decode.prefix_beam);
      c.decode.max_active = d.value("max_active", c.decode.max_active);
      c.decode.score_beam = d.value("score_beam", c.decode.score_beam);
      c.decode.acoustic_scale = d.value("acoustic_scale", c.decode.acoustic_scale);
      c.decode.lm_order = d.value("lm_order", c.decode.lm_order);
    }
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("bad experiment config: ") + e.what());
  }
  c.Validate();
  return c;
}

double ExperimentReport::Value(const std::string &experiment, const std::string &language,
                               const std::string &split, const std::string &metric) const {
  for (const auto &r : rows)
    if (r.experiment == experiment && r.language == language && r.split == split &&
        r.metric == metric)
      return r.value;
  Fail(ErrorCode::kLookup, "no result " + experiment + " " + language + " " + split + " " + metric);
}

namespace {

// Unit vocabulary a model is trained and scored with.
struct Units {
  UnitKind kind = UnitKind::kPhoneme;
  std::shared_ptr<const BpeModel> bpe;  // subword only
};

class Runner {
 public:
  Runner(const WorldInfo &world, const ExperimentConfig &config, const std::string &out_dir)
      : world_(world), config_(config), out_dir_(out_dir) {
    report_.id = config.id;
    if (!out_dir_.empty()) fs::create_directories(out_dir_);
  }

  ExperimentReport Run() {
    switch (config_.mode) {
      case ExperimentMode::kMonolingual: RunMonolingual(); break;
      case ExperimentMode::kMultilingualPhoneme:
      case ExperimentMode::kMultilingualSubword: RunMultilingual(); break;
      case ExperimentMode::kCrosslingualFt: RunFinetune(); break;
    }
    json results = json::array();
    for (const auto &r : report_.rows)
      results.push_back({{"experiment", r.experiment},
                         {"language", r.language},
                         {"split", r.split},
                         {"metric", r.metric},
                         {"value", r.value}});
    json doc{{"id", config_.id},
             {"mode", ExperimentModeName(config_.mode)},
             {"config", json::parse(config_.ToJson())},
             {"runs", runs_},
             {"results", results}};
    report_.json = doc.dump(2) + "\n";
    if (!out_dir_.empty()) WriteOutputs();
    return std::move(report_);
  }

 private:
  const LanguageData &Lang(const std::string &code) {
    auto it = cache_.find(code);
    if (it == cache_.end()) it = cache_.emplace(code, LoadLanguage(world_, code)).first;
    return it->second;
  }

  std::vector<const WorldUtterance *> Subset(const LanguageData &lang, const std::string &split,
                                             int scale) {
    const auto &all = lang.splits.at(split);
    if (scale != kAllUtterances && scale > static_cast<int>(all.size()))
      Fail(ErrorCode::kConfig, "scale " + std::to_string(scale) + " exceeds the " +
                                   std::to_string(all.size()) + " " + split +
                                   " utterances of " + lang.code);
    size_t n = scale == kAllUtterances ? all.size() : static_cast<size_t>(scale);
    std::vector<const WorldUtterance *> out;
    for (size_t i = 0; i < n; ++i) out.push_back(&all[i]);
    return out;
  }

  // Unit sequence of a sentence; empty when some word has no pronunciation.
  static std::vector<std::string> Targets(const LanguageData &lang, const Units &units,
                                          const std::string &text) {
    if (units.kind == UnitKind::kSubword) return units.bpe->Encode(text);
    std::vector<std::string> out;
    for (const auto &w : utf8::SplitWhitespace(text)) {
      if (!lang.lexicon.Contains(w)) return {};
      const auto &p = lang.lexicon.Best(w).units;
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }

  std::vector<Utterance> Corpus(const LanguageData &lang,
                                const std::vector<const WorldUtterance *> &utts,
                                const Units &units, const Alphabet &alphabet) {
    std::vector<Utterance> out;
    for (const auto *u : utts) {
      auto targets = Targets(lang, units, u->text);
      if (targets.empty()) continue;
      LabelSequence labels;
      for (const auto &t : targets) {
        if (!alphabet.Contains(t)) {
          labels.clear();
          break;
        }
        labels.push_back(alphabet.IndexOf(t));
      }
      if (!labels.empty()) out.push_back({u->features, std::move(labels)});
    }
    return out;
  }

  static std::vector<std::string> Texts(const std::vector<const WorldUtterance *> &utts) {
    std::vector<std::string> out;
    for (const auto *u : utts) out.push_back(u->text);
    return out;
  }

  // Decoding lexicon restricted to the model's units.
  static Prolex DecodeLexicon(const LanguageData &lang, const Units &units,
                              const Alphabet &alphabet) {
    Prolex out;
    for (const auto &[word, prons] : lang.lexicon.entries()) {
      if (units.kind == UnitKind::kSubword) {
        Pronunciation p{units.bpe->EncodeWord(word), 0.0};
        if (std::all_of(p.units.begin(), p.units.end(),
                        [&](const auto &t) { return alphabet.Contains(t); }))
          out.Add(word, std::move(p));
        continue;
      }
      for (const auto &p : prons)
        if (std::all_of(p.units.begin(), p.units.end(),
                        [&](const auto &t) { return alphabet.Contains(t); }))
          out.Add(word, p);
    }
    return out;
  }

  const NGramModel &LanguageModel(const LanguageData &lang) {
    auto it = lms_.find(lang.code);
    if (it != lms_.end()) return it->second;
    std::vector<WordSequence> sentences;
    for (const auto &u : lang.splits.at("train"))
      sentences.push_back(utf8::SplitWhitespace(u.text));
    return lms_.emplace(lang.code, TrainNGram(sentences, config_.decode.lm_order)).first->second;
  }

  struct Scores {
    std::map<std::string, double> metrics;
    std::map<std::string, ErrorCounts> counts;  // summed over utterances
  };

  // Metrics of one language and split.
  Scores Score(const ModelCheckpoint &ckpt, const LanguageData &lang,
                                      const Units &units, const std::string &split) {
    const auto &utts = lang.splits.at(split);
    Prolex lexicon = DecodeLexicon(lang, units, ckpt.alphabet);
    std::unique_ptr<DecodeGraph> graph;
    if (!lexicon.empty())
      graph = std::make_unique<DecodeGraph>(
          BuildDecodeGraph(ckpt.alphabet, lexicon, LanguageModel(lang)));
    DecodeOptions opts{config_.decode.max_active, config_.decode.score_beam,
                       config_.decode.acoustic_scale};

    std::vector<ErrorCounts> unit_errors, word_errors, free_errors;
    int failures = 0;
    for (const auto &u : utts) {
      auto words = utf8::SplitWhitespace(u.text);
      PosteriorGrid grid = Forward(ckpt, u.features);
      auto best = PrefixBeamSearch(grid, config_.decode.prefix_beam);
      std::vector<std::string> hyp_units;
      if (!best.empty())
        for (int32_t l : best.front().labels) hyp_units.push_back(ckpt.alphabet.SymbolAt(l));
      if (units.kind == UnitKind::kPhoneme) {
        auto ref = Targets(lang, units, u.text);
        if (!ref.empty()) unit_errors.push_back(EditDistance(ref, hyp_units));
      } else {
        free_errors.push_back(
            EditDistance(words, utf8::SplitWhitespace(units.bpe->Decode(hyp_units))));
      }
      std::vector<std::string> hyp_words;
      if (graph) {
        try {
          hyp_words = Decode(grid, graph->fst, ckpt.alphabet, opts).words;
        } catch (const Error &e) {
          if (e.code() != ErrorCode::kDecodeFailure) throw;
          ++failures;
        }
      } else {
        ++failures;
      }
      word_errors.push_back(EditDistance(words, hyp_words));
    }
    Scores out;
    auto add = [&](const std::string &metric, const std::vector<ErrorCounts> &counts) {
      if (counts.empty()) return;
      out.metrics[metric] = CorpusRate(counts);
      for (const auto &c : counts) out.counts[metric] += c;
    };
    add("per", unit_errors);
    add("wer_lexicon_free", free_errors);
    add("wer", word_errors);
    out.metrics["decode_failures"] = failures;
    return out;
  }

  void AddRows(const std::string &experiment, const std::string &language,
               const std::string &split, const Scores &scores,
               const std::string &prefix = "", const std::string &suffix = "") {
    for (const auto &[metric, value] : scores.metrics)
      report_.rows.push_back({experiment, language, split, prefix + metric + suffix, value});
  }

  void AddMacroRows(const std::string &experiment, const std::string &split,
                    const std::vector<Scores> &per_language, const std::string &suffix = "") {
    std::map<std::string, std::pair<double, int>> sums;
    std::map<std::string, std::vector<ErrorCounts>> pooled;
    for (const auto &scores : per_language) {
      for (const auto &[metric, counts] : scores.counts) pooled[metric].push_back(counts);
      for (const auto &[metric, value] : scores.metrics) {
        if (metric == "decode_failures") continue;
        sums[metric].first += value;
        ++sums[metric].second;
      }
    }
    for (const auto &[metric, sum] : sums)
      report_.rows.push_back({experiment, "macro", split, metric + suffix,
                              sum.first / sum.second});
    for (const auto &[metric, counts] : pooled)
      report_.rows.push_back({experiment, "pooled", split, metric + suffix, CorpusRate(counts)});
  }

  TrainResult TrainModel(const std::string &run, const std::string &language, int scale,
                         ModelCheckpoint init, const std::vector<Utterance> &train,
                         const std::vector<Utterance> &val) {
    auto result = Train(std::move(init), train, val, config_.schedule,
                        DeriveSeed(config_.seed, "train:" + run));
    const auto &h = result.history;
    runs_.push_back({{"run", run},
                     {"language", language},
                     {"scale", ScaleLabel(scale)},
                     {"units", result.checkpoint.alphabet.size() - 1},
                     {"train_utterances", train.size()},
                     {"epochs", h.epochs.size()},
                     {"epochs_to_converge", h.epochs_to_converge},
                     {"averaged_epochs", h.averaged_epochs},
                     {"early_stopped", h.early_stopped},
                     {"skipped_utterances", h.skipped_utterances}});
    report_.histories.push_back({run, h});
    return result;
  }

  EncoderConfig Encoder() const {
    EncoderConfig e = config_.encoder;
    e.input_dim = world_.config.feature_dim;
    return e;
  }

  std::string Checkpoint(const std::string &name) const {
    return (fs::path(out_dir_) / name).string();
  }

  void RunMonolingual() {
    for (const auto &code : config_.languages) {
      const auto &lang = Lang(code);
      for (int scale : config_.scales) {
        std::string experiment = config_.id + "/" + ScaleLabel(scale);
        std::string run = experiment + "/" + code;
        auto train_utts = Subset(lang, "train", scale);
        Units units{config_.units, nullptr};
        Alphabet alphabet;
        if (units.kind == UnitKind::kPhoneme) {
          alphabet = Alphabet::FromSet(UnitKind::kPhoneme, lang.inventory.units);
        } else {
          units.bpe = std::make_shared<BpeModel>(TrainBpe(Texts(train_utts), config_.bpe_vocab_size));
          alphabet = units.bpe->vocab();
        }
        auto train = Corpus(lang, train_utts, units, alphabet);
        auto val = Corpus(lang, Subset(lang, "dev", kAllUtterances), units, alphabet);
        auto init = InitCheckpoint(Encoder(), alphabet, DeriveSeed(config_.seed, "init:" + run));
        auto result = TrainModel(run, code, scale, std::move(init), train, val);
        for (const auto &split : config_.eval_splits)
          AddRows(experiment, code, split, Score(result.checkpoint, lang, units, split));
        if (!out_dir_.empty()) {
          std::string stem = "model." + code + "." + ScaleLabel(scale);
          WriteCheckpoint(Checkpoint(stem + ".ckpt"), result.checkpoint);
          if (units.bpe) WriteBpeModel(Checkpoint(stem + ".bpe"), *units.bpe);
        }
      }
    }
  }

  void RunMultilingual() {
    std::vector<std::string> codes = config_.languages.empty() ? world_.seen : config_.languages;
    std::vector<std::string> eval_codes =
        config_.eval_languages.empty() ? codes : config_.eval_languages;
    bool subword = config_.mode == ExperimentMode::kMultilingualSubword;
    for (int scale : config_.scales) {
      std::string experiment = config_.id + "/" + ScaleLabel(scale);
      Units units{subword ? UnitKind::kSubword : UnitKind::kPhoneme, nullptr};
      Alphabet alphabet;
      if (subword) {
        std::vector<std::vector<std::string>> corpora;
        LanguageStats stats;
        stats.beta = config_.bpe_beta;
        int64_t total = 0;
        for (const auto &code : codes) {
          corpora.push_back(Texts(Subset(Lang(code), "train", scale)));
          stats.languages.push_back(code);
          stats.counts.push_back(static_cast<int64_t>(corpora.back().size()));
          total += stats.counts.back();
        }
        std::vector<std::string> sampled;
        for (auto &s : SampleCorpus(corpora, stats, total, DeriveSeed(config_.seed, "bpe-sample")))
          sampled.push_back(std::move(s.sentence));
        units.bpe = std::make_shared<BpeModel>(TrainBpe(sampled, config_.bpe_vocab_size));
        alphabet = units.bpe->vocab();
      } else {
        std::vector<LanguageInventory> inventories;
        for (const auto &code : codes) inventories.push_back(Lang(code).inventory);
        alphabet = BuildUnionAlphabet(inventories);
      }
      std::vector<Utterance> train, val;
      for (const auto &code : codes) {
        auto t = Corpus(Lang(code), Subset(Lang(code), "train", scale), units, alphabet);
        auto v = Corpus(Lang(code), Subset(Lang(code), "dev", kAllUtterances), units, alphabet);
        train.insert(train.end(), t.begin(), t.end());
        val.insert(val.end(), v.begin(), v.end());
      }
      auto init = InitCheckpoint(Encoder(), alphabet, DeriveSeed(config_.seed, "init:" + experiment));
      auto result = TrainModel(experiment, "multi", scale, std::move(init), train, val);
      for (const auto &split : config_.eval_splits) {
        std::vector<Scores> scores;
        for (const auto &code : eval_codes) {
          scores.push_back(Score(result.checkpoint, Lang(code), units, split));
          AddRows(experiment, code, split, scores.back());
        }
        AddMacroRows(experiment, split, scores);
      }
      if (!out_dir_.empty()) {
        std::string stem = config_.scales.size() == 1 ? "model" : "model." + ScaleLabel(scale);
        WriteCheckpoint(Checkpoint(stem + ".ckpt"), result.checkpoint);
        if (units.bpe) WriteBpeModel(Checkpoint(stem + ".bpe"), *units.bpe);
      }
    }
  }

  void RunFinetune() {
    ModelCheckpoint pretrained = ReadCheckpoint(config_.pretrained);
    Units pt_units{pretrained.alphabet.kind(), nullptr};
    if (pt_units.kind == UnitKind::kSubword && !config_.forgetting_languages.empty()) {
      if (config_.pretrained_bpe.empty())
        Fail(ErrorCode::kConfig, "forgetting runs of a subword model need pretrained_bpe");
      pt_units.bpe = std::make_shared<BpeModel>(ReadBpeModel(config_.pretrained_bpe));
    }
    std::map<std::string, std::vector<Scores>> before;
    for (const auto &split : config_.eval_splits)
      for (const auto &code : config_.forgetting_languages)
        before[split].push_back(Score(pretrained, Lang(code), pt_units, split));

    for (const auto &code : config_.languages) {
      const auto &lang = Lang(code);
      for (int scale : config_.scales) {
        std::string experiment = config_.id + "/" + ScaleLabel(scale);
        std::string run = experiment + "/" + code;
        auto train_utts = Subset(lang, "train", scale);
        Units units{config_.units, nullptr};
        std::vector<std::string> target_units;
        if (units.kind == UnitKind::kPhoneme) {
          target_units.assign(lang.inventory.units.begin(), lang.inventory.units.end());
        } else {
          units.bpe = std::make_shared<BpeModel>(TrainBpe(Texts(train_utts), config_.bpe_vocab_size));
          target_units = units.bpe->vocab().units();
        }
        Alphabet alphabet;
        if (config_.union_alphabet) {
          if (pretrained.alphabet.kind() != units.kind)
            Fail(ErrorCode::kConfig, "union_alphabet needs pretrained units of the same kind");
          auto merged = pretrained.alphabet.units();
          for (const auto &t : target_units)
            if (!pretrained.alphabet.Contains(t)) merged.push_back(t);
          alphabet = Alphabet(units.kind, merged);
        } else if (units.kind == UnitKind::kPhoneme) {
          alphabet = Alphabet::FromSet(UnitKind::kPhoneme, lang.inventory.units);
        } else {
          alphabet = units.bpe->vocab();
        }
        auto train = Corpus(lang, train_utts, units, alphabet);
        auto val = Corpus(lang, Subset(lang, "dev", kAllUtterances), units, alphabet);
        auto init = TransferInit(pretrained, alphabet, config_.transfer,
                                 DeriveSeed(config_.seed, "transfer:" + run));
        auto result = TrainModel(run, code, scale, std::move(init), train, val);
        for (const auto &split : config_.eval_splits)
          AddRows(experiment, code, split, Score(result.checkpoint, lang, units, split));

        for (const auto &split : config_.eval_splits) {
          if (config_.forgetting_languages.empty()) break;
          std::vector<Scores> after;
          for (size_t i = 0; i < config_.forgetting_languages.size(); ++i) {
            const auto &seen = config_.forgetting_languages[i];
            after.push_back(Score(result.checkpoint, Lang(seen), pt_units, split));
            AddRows(experiment, seen, split, before[split][i], "", "_before");
            AddRows(experiment, seen, split, after.back(), "", "_after");
          }
          AddMacroRows(experiment, split, before[split], "_before");
          AddMacroRows(experiment, split, after, "_after");
          double wb = report_.Value(experiment, "macro", split, "wer_before");
          double wa = report_.Value(experiment, "macro", split, "wer_after");
          report_.rows.push_back({experiment, "macro", split, "ward", Ward(wa, wb)});
        }
        if (!out_dir_.empty()) {
          std::string stem = "model." + code + "." + ScaleLabel(scale);
          WriteCheckpoint(Checkpoint(stem + ".ckpt"), result.checkpoint);
          if (units.bpe) WriteBpeModel(Checkpoint(stem + ".bpe"), *units.bpe);
        }
      }
    }
  }

  void WriteOutputs() const {
    fs::path dir(out_dir_);
    std::ofstream csv(dir / "results.csv");
    csv << "experiment,language,split,metric,value\n";
    for (const auto &r : report_.rows)
      csv << r.experiment << ',' << r.language << ',' << r.split << ',' << r.metric << ','
          << FormatWeight(r.value) << '\n';
    std::ofstream hist(dir / "history.csv");
    hist << "run,epoch,train_loss,val_loss,learning_rate,step\n";
    for (const auto &rh : report_.histories)
      for (const auto &e : rh.history.epochs)
        hist << rh.run << ',' << e.epoch << ',' << FormatWeight(e.train_loss) << ','
             << FormatWeight(e.val_loss) << ',' << FormatWeight(e.learning_rate) << ','
             << e.step << '\n';
    std::ofstream rep(dir / "report.json");
    rep << report_.json;
    if (!csv || !hist || !rep) Fail(ErrorCode::kIo, "cannot write reports in " + out_dir_);
  }

  const WorldInfo &world_;
  const ExperimentConfig &config_;
  std::string out_dir_;
  ExperimentReport report_;
  json runs_ = json::array();
  std::map<std::string, LanguageData> cache_;
  std::map<std::string, NGramModel> lms_;
};

}  // namespace

ExperimentReport RunExperiment(const WorldInfo &world, const ExperimentConfig &config,
                               const std::string &out_dir) {
  config.Validate();
  return Runner(world, config, out_dir).Run();
}

}  // namespace mlasr
