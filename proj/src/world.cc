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

#include "mlasr/world.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mlasr/error.h"
#include "mlasr/model.h"
#include "mlasr/utf8.h"

namespace mlasr {

namespace fs = std::filesystem;

namespace {

uint64_t SplitMix(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const std::vector<std::string> &GraphemePool() {
  static const std::vector<std::string> pool = utf8::SplitCodepoints(
      "abcdefghijklmnopqrstuvwxyzàáâäçèéêëìíîïñòóôöùúûüýÿøåæœ");
  return pool;
}

const std::string kSilence = "<sil>";

int Uniform(std::mt19937_64 &rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

template <typename T>
void Shuffle(std::vector<T> &v, std::mt19937_64 &rng) {
  std::shuffle(v.begin(), v.end(), rng);
}

struct WordEntry {
  std::string spelling;
  std::vector<std::string> pron;
};

struct LanguagePlan {
  std::string code;
  bool seen = true;
  int utterances = 0;
  std::vector<std::string> inventory;  // drawn order
};

void WriteText(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path.string());
}

std::string ReadText(const fs::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class LanguageGenerator {
 public:
  LanguageGenerator(const SyntheticWorldConfig &config, const LanguagePlan &plan,
                    const std::map<std::string, Vector> &prototypes,
                    const std::map<std::string, std::string> &canonical)
      : config_(config), plan_(plan), prototypes_(prototypes), canonical_(canonical),
        rng_(DeriveSeed(config.seed, "language:" + plan.code)) {}

  void Write(const fs::path &dir, nlohmann::json &summary) {
    fs::create_directories(dir);
    MakeOrthography();
    MakeWords();
    Fst g2p = MakeG2p();

    LanguageInventory inv{plan_.code, {plan_.inventory.begin(), plan_.inventory.end()}};
    WriteInventory((dir / "inventory.txt").string(), inv);
    WriteFstText(g2p, (dir / "g2p.fst.txt").string());

    std::vector<std::string> spellings;
    for (const auto &w : words_) spellings.push_back(w.spelling);
    std::sort(spellings.begin(), spellings.end());
    auto built = BuildProlex(spellings, g2p, config_.lexicon_nbest);
    if (!built.unpronounceable.empty())
      Fail(ErrorCode::kInternal, "generated word without pronunciation");
    WriteLexicon((dir / "lexicon.tsv").string(), built.prolex);

    auto sentences = MakeSentences();
    int n = static_cast<int>(sentences.size());
    int n_train = static_cast<int>(std::lround(config_.train_fraction * n));
    int n_dev = static_cast<int>(std::lround(config_.dev_fraction * n));
    n_train = std::clamp(n_train, 1, n - 2);
    n_dev = std::clamp(n_dev, 1, n - n_train - 1);
    const int bounds[] = {0, n_train, n_train + n_dev, n};

    std::mt19937_64 feat_rng(DeriveSeed(config_.seed, "features:" + plan_.code));
    std::mt19937_64 offset_rng(DeriveSeed(config_.seed, "offset:" + plan_.code));
    std::normal_distribution<double> offset_dist(0.0, 1.0);
    offset_.assign(config_.feature_dim, 0.0);
    for (auto &v : offset_) v = config_.language_offset_std * offset_dist(offset_rng);
    nlohmann::json counts;
    for (size_t s = 0; s < kSplits.size(); ++s) {
      std::string text;
      std::ofstream feats(dir / ("feats." + kSplits[s] + ".bin"), std::ios::binary);
      if (!feats) Fail(ErrorCode::kIo, "cannot write features in " + dir.string());
      for (int i = bounds[s]; i < bounds[s + 1]; ++i) {
        std::vector<std::string> spelled;
        std::vector<std::vector<std::string>> prons;
        for (int w : sentences[i]) {
          spelled.push_back(words_[w].spelling);
          prons.push_back(words_[w].pron);
        }
        text += utf8::Join(spelled, " ") + "\n";
        AppendFeatureRecord(feats, Render(prons, feat_rng));
      }
      if (!feats) Fail(ErrorCode::kIo, "write failed in " + dir.string());
      WriteText(dir / ("text." + kSplits[s] + ".txt"), text);
      counts[kSplits[s]] = bounds[s + 1] - bounds[s];
    }

    auto stats = ComputeLexiconStats(built.prolex);
    summary = {{"code", plan_.code},
               {"seen", plan_.seen},
               {"inventory_size", plan_.inventory.size()},
               {"words", words_.size()},
               {"homophone_rate", stats.homophone_rate},
               {"utterances", counts}};
  }

 private:
  void MakeOrthography() {
    std::set<std::string> used;
    std::vector<std::string> respelled;
    std::uniform_real_distribution<double> unit(0, 1);
    for (const auto &p : plan_.inventory) {
      if (unit(rng_) < config_.orthography_consistency) {
        grapheme_[p] = canonical_.at(p);
        used.insert(grapheme_[p]);
      } else {
        respelled.push_back(p);
      }
    }
    std::vector<std::string> free;
    for (const auto &g : GraphemePool())
      if (!used.count(g)) free.push_back(g);
    Shuffle(free, rng_);
    for (size_t i = 0; i < respelled.size(); ++i) grapheme_[respelled[i]] = free[i];
    silent_ = free[respelled.size()];
  }

  void MakeWords() {
    int n = Uniform(rng_, config_.lexicon_min, config_.lexicon_max);
    std::set<std::vector<std::string>> used;
    const auto &inv = plan_.inventory;
    int attempts = 0;
    while (static_cast<int>(words_.size()) < n) {
      if (++attempts > 100 * n) Fail(ErrorCode::kConfig, "cannot draw enough distinct words");
      int len = Uniform(rng_, config_.word_length_min, config_.word_length_max);
      std::vector<std::string> pron;
      while (static_cast<int>(pron.size()) < len) {
        const auto &p = inv[Uniform(rng_, 0, static_cast<int>(inv.size()) - 1)];
        if (!pron.empty() && pron.back() == p) continue;
        pron.push_back(p);
      }
      if (!used.insert(pron).second) continue;
      std::string spelling;
      for (const auto &p : pron) spelling += grapheme_.at(p);
      words_.push_back({spelling, pron});
    }
    // Homophone pairs share a pronunciation; the variant carries a silent letter.
    double r = config_.homophone_rate;
    int pairs = static_cast<int>(std::lround(r * n / (2.0 - r)));
    for (int i = 0; i < pairs && i < n; ++i) {
      auto cps = utf8::SplitCodepoints(words_[i].spelling);
      int pos = Uniform(rng_, 1, static_cast<int>(cps.size()));
      cps.insert(cps.begin() + pos, silent_);
      words_.push_back({utf8::Join(cps, ""), words_[i].pron});
    }
    // Sparse successor lists give the text some n-gram structure.
    int total = static_cast<int>(words_.size());
    successors_.resize(total);
    for (auto &s : successors_)
      for (int k = 0; k < 3; ++k) s.push_back(Uniform(rng_, 0, total - 1));
  }

  Fst MakeG2p() {
    auto isyms = std::make_shared<SymbolTable>();
    auto osyms = std::make_shared<SymbolTable>();
    Fst g2p(isyms, osyms);
    int32_t s = g2p.AddState();
    g2p.SetStart(s);
    g2p.SetFinal(s, 0.0);
    const auto &inv = plan_.inventory;
    for (const auto &p : inv) {
      int32_t il = isyms->AddSymbol(grapheme_.at(p));
      g2p.AddArc(s, {il, osyms->AddSymbol(p), 0.0, s});
      if (inv.size() > 1 &&
          std::uniform_real_distribution<double>(0, 1)(rng_) < config_.g2p_alternative_rate) {
        std::string alt;
        do {
          alt = inv[Uniform(rng_, 0, static_cast<int>(inv.size()) - 1)];
        } while (alt == p);
        g2p.AddArc(s, {il, osyms->AddSymbol(alt), config_.g2p_alternative_weight, s});
      }
    }
    g2p.AddArc(s, {isyms->AddSymbol(silent_), kEpsilon, 0.0, s});
    return g2p;
  }

  std::vector<std::vector<int>> MakeSentences() {
    std::vector<std::vector<int>> out(plan_.utterances);
    int total = static_cast<int>(words_.size());
    std::uniform_real_distribution<double> unit(0, 1);
    for (auto &sent : out) {
      int len = Uniform(rng_, config_.sentence_length_min, config_.sentence_length_max);
      sent.push_back(Uniform(rng_, 0, total - 1));
      while (static_cast<int>(sent.size()) < len) {
        const auto &next = successors_[sent.back()];
        sent.push_back(unit(rng_) < 0.7 ? next[Uniform(rng_, 0, 2)]
                                        : Uniform(rng_, 0, total - 1));
      }
    }
    return out;
  }

  Matrix Render(const std::vector<std::vector<std::string>> &prons,
               std::mt19937_64 &rng) const {
    // (prototype, frames) segments; pauses use the silence prototype.
    std::vector<std::pair<const Vector *, int>> segments;
    int frames = 0;
    for (size_t w = 0; w < prons.size(); ++w) {
      if (w > 0) {
        int pause = Uniform(rng, config_.pause_min, config_.pause_max);
        if (pause > 0) segments.emplace_back(&prototypes_.at(kSilence), pause);
      }
      for (const auto &p : prons[w])
        segments.emplace_back(&prototypes_.at(p),
                              Uniform(rng, config_.frames_min, config_.frames_max));
    }
    for (const auto &seg : segments) frames += seg.second;
    Matrix feats(frames, config_.feature_dim);
    std::normal_distribution<double> noise(0.0, 1.0);
    int t = 0;
    for (const auto &[proto, n] : segments)
      for (int d = 0; d < n; ++d, ++t)
        for (int k = 0; k < config_.feature_dim; ++k)
          feats(t, k) = (*proto)[k] + offset_[k] + config_.noise_std * noise(rng);
    return feats;
  }

  const SyntheticWorldConfig &config_;
  const LanguagePlan &plan_;
  const std::map<std::string, Vector> &prototypes_;
  const std::map<std::string, std::string> &canonical_;
  std::mt19937_64 rng_;
  std::vector<double> offset_;
  std::map<std::string, std::string> grapheme_;
  std::string silent_;
  std::vector<WordEntry> words_;
  std::vector<std::vector<int>> successors_;
};

}  // namespace

uint64_t DeriveSeed(uint64_t root, std::string_view tag) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : tag) h = (h ^ c) * 1099511628211ULL;
  return SplitMix(SplitMix(root) ^ h);
}

void SyntheticWorldConfig::Validate() const {
  auto require = [](bool ok, const char *what) {
    if (!ok) Fail(ErrorCode::kConfig, std::string("world config: ") + what);
  };
  const int registry = static_cast<int>(IpaRegistry().size());
  require(num_seen_languages >= 1 && num_unseen >= 0, "need at least one seen language");
  require(universal_inventory_size >= 2 && universal_inventory_size <= registry,
          "universal_inventory_size out of range");
  require(unseen_novel_units >= 0 &&
              universal_inventory_size + num_unseen * unseen_novel_units <= registry,
          "not enough registry symbols for novel units");
  require(inventory_min >= 2 && inventory_min <= inventory_max, "empty inventory range");
  require(inventory_max <= universal_inventory_size,
          "inventory size exceeds the universal inventory");
  require(shared_core >= 0 && shared_core + unseen_novel_units <= inventory_min,
          "shared_core + unseen_novel_units must not exceed inventory_min");
  require(universal_inventory_size + num_unseen * unseen_novel_units + 1 <=
              static_cast<int>(GraphemePool().size()),
          "not enough letters to spell every phoneme");
  require(orthography_consistency >= 0 && orthography_consistency <= 1,
          "orthography_consistency must lie in [0, 1]");
  require(lexicon_min >= 1 && lexicon_min <= lexicon_max, "empty lexicon range");
  require(word_length_min >= 1 && word_length_min <= word_length_max, "empty word length range");
  require(sentence_length_min >= 1 && sentence_length_min <= sentence_length_max,
          "empty sentence length range");
  require(!seen_utterances.empty(), "seen_utterances is empty");
  for (int n : seen_utterances) require(n >= 10, "a language needs at least 10 utterances");
  require(num_unseen == 0 || unseen_utterances >= 10, "a language needs at least 10 utterances");
  require(frames_min >= 1 && frames_min <= frames_max, "empty duration range");
  require(pause_min >= 0 && pause_min <= pause_max, "empty pause range");
  require(feature_dim >= 1, "feature_dim must be >= 1");
  require(prototype_std > 0 && noise_std >= 0 && language_offset_std >= 0,
          "bad prototype, noise or offset std");
  require(homophone_rate >= 0 && homophone_rate < 1, "homophone_rate must lie in [0, 1)");
  require(g2p_alternative_rate >= 0 && g2p_alternative_rate <= 1 && g2p_alternative_weight > 0,
          "bad G2P alternative settings");
  require(lexicon_nbest >= 1, "lexicon_nbest must be >= 1");
  require(train_fraction > 0 && dev_fraction > 0 && train_fraction + dev_fraction < 1,
          "split fractions must leave room for a test split");
}

std::string SyntheticWorldConfig::ToJson() const {
  nlohmann::json j{{"seed", seed},
                   {"universal_inventory_size", universal_inventory_size},
                   {"num_seen_languages", num_seen_languages},
                   {"num_unseen", num_unseen},
                   {"unseen_novel_units", unseen_novel_units},
                   {"shared_core", shared_core},
                   {"inventory_min", inventory_min},
                   {"inventory_max", inventory_max},
                   {"lexicon_min", lexicon_min},
                   {"lexicon_max", lexicon_max},
                   {"word_length_min", word_length_min},
                   {"word_length_max", word_length_max},
                   {"sentence_length_min", sentence_length_min},
                   {"sentence_length_max", sentence_length_max},
                   {"seen_utterances", seen_utterances},
                   {"unseen_utterances", unseen_utterances},
                   {"frames_min", frames_min},
                   {"frames_max", frames_max},
                   {"pause_min", pause_min},
                   {"pause_max", pause_max},
                   {"feature_dim", feature_dim},
                   {"prototype_std", prototype_std},
                   {"noise_std", noise_std},
                   {"language_offset_std", language_offset_std},
                   {"orthography_consistency", orthography_consistency},
                   {"homophone_rate", homophone_rate},
                   {"g2p_alternative_rate", g2p_alternative_rate},
                   {"g2p_alternative_weight", g2p_alternative_weight},
                   {"lexicon_nbest", lexicon_nbest},
                   {"train_fraction", train_fraction},
                   {"dev_fraction", dev_fraction}};
  return j.dump(2);
}

SyntheticWorldConfig SyntheticWorldConfig::FromJson(const std::string &json_text) {
  SyntheticWorldConfig c;
  try {
    auto j = nlohmann::json::parse(json_text);
    if (!j.is_object()) Fail(ErrorCode::kConfig, "world config must be a JSON object");
#define MLASR_FIELD(name) c.name = j.value(#name, c.name)
    MLASR_FIELD(seed);
    MLASR_FIELD(universal_inventory_size);
    MLASR_FIELD(num_seen_languages);
    MLASR_FIELD(num_unseen);
    MLASR_FIELD(unseen_novel_units);
    MLASR_FIELD(shared_core);
    MLASR_FIELD(inventory_min);
    MLASR_FIELD(inventory_max);
    MLASR_FIELD(lexicon_min);
    MLASR_FIELD(lexicon_max);
    MLASR_FIELD(word_length_min);
    MLASR_FIELD(word_length_max);
    MLASR_FIELD(sentence_length_min);
    MLASR_FIELD(sentence_length_max);
    MLASR_FIELD(seen_utterances);
    MLASR_FIELD(unseen_utterances);
    MLASR_FIELD(frames_min);
    MLASR_FIELD(frames_max);
    MLASR_FIELD(pause_min);
    MLASR_FIELD(pause_max);
    MLASR_FIELD(feature_dim);
    MLASR_FIELD(prototype_std);
    MLASR_FIELD(noise_std);
    MLASR_FIELD(language_offset_std);
    MLASR_FIELD(orthography_consistency);
    MLASR_FIELD(homophone_rate);
    MLASR_FIELD(g2p_alternative_rate);
    MLASR_FIELD(g2p_alternative_weight);
    MLASR_FIELD(lexicon_nbest);
    MLASR_FIELD(train_fraction);
    MLASR_FIELD(dev_fraction);
#undef MLASR_FIELD
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("bad world config: ") + e.what());
  }
  c.Validate();
  return c;
}

void GenerateWorld(const SyntheticWorldConfig &config, const std::string &dir) {
  config.Validate();
  std::mt19937_64 rng(DeriveSeed(config.seed, "inventories"));

  std::vector<std::string> registry = IpaRegistry();
  Shuffle(registry, rng);
  const int U = config.universal_inventory_size;
  std::vector<std::string> universal(registry.begin(), registry.begin() + U);
  std::vector<std::string> core(universal.begin(), universal.begin() + config.shared_core);
  std::vector<std::string> rest(universal.begin() + config.shared_core, universal.end());

  std::vector<LanguagePlan> plans;
  auto draw = [&](const std::string &code, bool seen, int utts, int novel_offset) {
    LanguagePlan p{code, seen, utts, core};
    int size = Uniform(rng, config.inventory_min, config.inventory_max);
    int novel = seen ? 0 : config.unseen_novel_units;
    std::vector<std::string> pool = rest;
    Shuffle(pool, rng);
    int take = size - config.shared_core - novel;
    p.inventory.insert(p.inventory.end(), pool.begin(), pool.begin() + take);
    for (int k = 0; k < novel; ++k) p.inventory.push_back(registry[U + novel_offset + k]);
    plans.push_back(std::move(p));
  };
  for (int i = 0; i < config.num_seen_languages; ++i) {
    size_t k = std::min<size_t>(i, config.seen_utterances.size() - 1);
    draw("s" + std::to_string(i + 1), true, config.seen_utterances[k], 0);
  }
  for (int i = 0; i < config.num_unseen; ++i)
    draw("u" + std::to_string(i + 1), false, config.unseen_utterances,
         i * config.unseen_novel_units);

  std::map<std::string, Vector> prototypes;
  std::vector<std::string> sounds{kSilence};
  for (const auto &p : plans) sounds.insert(sounds.end(), p.inventory.begin(), p.inventory.end());
  for (const auto &sym : sounds) {
    if (prototypes.count(sym)) continue;
    std::mt19937_64 prng(DeriveSeed(config.seed, "prototype:" + sym));
    std::normal_distribution<double> nd(0.0, config.prototype_std);
    Vector v(config.feature_dim);
    for (int k = 0; k < config.feature_dim; ++k) v[k] = nd(prng);
    prototypes.emplace(sym, std::move(v));
  }

  std::map<std::string, std::string> canonical;
  std::vector<std::string> letters = GraphemePool();
  Shuffle(letters, rng);
  for (int i = 0; i < U + config.num_unseen * config.unseen_novel_units; ++i)
    canonical[registry[i]] = letters[i];

  fs::path root(dir);
  fs::create_directories(root);
  nlohmann::json languages = nlohmann::json::array();
  for (const auto &plan : plans) {
    nlohmann::json summary;
    LanguageGenerator(config, plan, prototypes, canonical).Write(root / ("lang-" + plan.code), summary);
    languages.push_back(summary);
  }
  nlohmann::json world{{"config", nlohmann::json::parse(config.ToJson())},
                       {"universal_inventory", universal},
                       {"languages", languages}};
  WriteText(root / "world.json", world.dump(2) + "\n");
}

WorldInfo OpenWorld(const std::string &dir) {
  fs::path path = fs::path(dir) / "world.json";
  WorldInfo info;
  info.dir = dir;
  try {
    auto j = nlohmann::json::parse(ReadText(path));
    info.config = SyntheticWorldConfig::FromJson(j.at("config").dump());
    for (const auto &lang : j.at("languages")) {
      auto code = lang.at("code").get<std::string>();
      (lang.at("seen").get<bool>() ? info.seen : info.unseen).push_back(code);
    }
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return info;
}

LanguageData LoadLanguage(const WorldInfo &world, const std::string &code) {
  LanguageData data;
  data.code = code;
  if (std::find(world.seen.begin(), world.seen.end(), code) != world.seen.end()) {
    data.seen = true;
  } else if (std::find(world.unseen.begin(), world.unseen.end(), code) != world.unseen.end()) {
    data.seen = false;
  } else {
    Fail(ErrorCode::kLookup, "language not in world: " + code);
  }
  fs::path dir = fs::path(world.dir) / ("lang-" + code);
  data.inventory = ReadInventory((dir / "inventory.txt").string(), code);
  data.g2p = ReadFstText((dir / "g2p.fst.txt").string());
  data.lexicon = ReadLexicon((dir / "lexicon.tsv").string());
  for (const auto &split : kSplits) {
    auto text_path = dir / ("text." + split + ".txt");
    auto feats = ReadFeatureRecords((dir / ("feats." + split + ".bin")).string());
    std::istringstream lines(ReadText(text_path));
    std::vector<WorldUtterance> utts;
    std::string line;
    size_t i = 0;
    while (std::getline(lines, line)) {
      if (i >= feats.size())
        Fail(ErrorCode::kFormat, text_path.string() + ": more sentences than feature records");
      utts.push_back({line, std::move(feats[i++])});
    }
    if (i != feats.size())
      Fail(ErrorCode::kFormat, text_path.string() + ": fewer sentences than feature records");
    data.splits[split] = std::move(utts);
  }
  return data;
}

}  // namespace mlasr
