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

// Command line front end over the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mlasr/mlasr.h"

namespace {

using nlohmann::json;

constexpr int kUsageError = 2;

struct Failure {
  mlasr_status status;
};

void Check(mlasr_status s) {
  if (s != MLASR_OK) throw Failure{s};
}

// Takes ownership of a string returned by the library.
std::string Take(char *s) {
  std::string out = s ? s : "";
  mlasr_string_free(s);
  return out;
}

std::string Slurp(const std::string &path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CLI::ValidationError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void Emit(const std::string &out_path, const std::string &text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw CLI::ValidationError("cannot write " + out_path);
  out << text;
}

json ConfigObject(const std::string &path) {
  if (path.empty()) return json::object();
  try {
    auto j = json::parse(Slurp(path));
    if (!j.is_object()) throw CLI::ValidationError(path + ": config must be a JSON object");
    return j;
  } catch (const json::exception &e) {
    throw CLI::ValidationError(path + ": " + e.what());
  }
}

struct Globals {
  std::string config;
  uint64_t seed = 1;
  bool seed_set = false;
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Multilingual phoneme ASR toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON configuration file");
  auto *seed_opt = app.add_option("--seed", g.seed, "random seed");
  app.set_version_flag("--version", std::string(mlasr_version()));

  std::function<void()> action;

  // normalize
  auto *norm = app.add_subcommand("normalize", "normalize text, one sentence per line");
  std::string norm_in = "-", norm_out, norm_rules;
  norm->add_option("--in", norm_in, "input text (- for stdin)");
  norm->add_option("--rules", norm_rules, "normalization rules JSON file");
  norm->add_option("--out", norm_out, "output file (default stdout)");
  norm->callback([&] {
    action = [&] {
      std::string rules = norm_rules.empty() ? "" : Slurp(norm_rules);
      std::istringstream lines(Slurp(norm_in));
      std::string line, out;
      size_t rejected = 0;
      while (std::getline(lines, line)) {
        char *text = nullptr;
        Check(mlasr_normalize(line.c_str(), rules.empty() ? nullptr : rules.c_str(), &text));
        if (!text) {
          ++rejected;
          continue;
        }
        out += Take(text) + "\n";
      }
      Emit(norm_out, out);
      if (rejected) std::cerr << "rejected " << rejected << " sentences\n";
    };
  });

  // g2p
  auto *g2p = app.add_subcommand("g2p", "pronounce words with a G2P transducer");
  std::string g2p_fst;
  int g2p_nbest = 1;
  std::vector<std::string> g2p_words;
  g2p->add_option("--fst", g2p_fst, "G2P transducer (text format)")->required();
  g2p->add_option("--nbest", g2p_nbest, "pronunciations per word")->check(CLI::PositiveNumber);
  g2p->add_option("words", g2p_words, "words")->required();
  g2p->callback([&] {
    action = [&] {
      for (const auto &w : g2p_words) {
        char *out = nullptr;
        Check(mlasr_g2p_apply(g2p_fst.c_str(), w.c_str(), g2p_nbest, &out));
        std::istringstream lines(Take(out));
        std::string line;
        bool any = false;
        while (std::getline(lines, line)) {
          std::cout << w << '\t' << line << '\n';
          any = true;
        }
        if (!any) std::cerr << "no pronunciation: " << w << '\n';
      }
    };
  });

  // lexicon
  auto *lex = app.add_subcommand("lexicon", "build a pronunciation lexicon");
  std::string lex_words, lex_fst, lex_out;
  int lex_nbest = 1;
  lex->add_option("--words", lex_words, "word list")->required();
  lex->add_option("--fst", lex_fst, "G2P transducer")->required();
  lex->add_option("--nbest", lex_nbest, "pronunciations per word")->check(CLI::PositiveNumber);
  lex->add_option("--out", lex_out, "lexicon file")->required();
  lex->callback([&] {
    action = [&] {
      size_t missing = 0;
      Check(mlasr_lexicon_build(lex_words.c_str(), lex_fst.c_str(), lex_nbest, lex_out.c_str(),
                                &missing));
      if (missing) std::cerr << missing << " words without pronunciation\n";
    };
  });

  // tokenizer train|encode
  auto *tok = app.add_subcommand("tokenizer", "subword tokenizer");
  tok->require_subcommand(1);
  auto *tok_train = tok->add_subcommand("train", "train a BPE model");
  std::vector<std::string> tok_texts;
  int tok_vocab = 500;
  double tok_beta = 0.5;
  int64_t tok_total = 0;
  std::string tok_out;
  tok_train->add_option("--text", tok_texts, "sentence files, one per language")->required();
  tok_train->add_option("--vocab-size", tok_vocab, "vocabulary size")->check(CLI::PositiveNumber);
  tok_train->add_option("--beta", tok_beta, "language resampling exponent")
      ->check(CLI::Range(0.0, 1.0));
  tok_train->add_option("--total", tok_total, "resampled sentences (0: as many as given)");
  tok_train->add_option("--out", tok_out, "model file")->required();
  tok_train->callback([&] {
    action = [&] {
      std::vector<const char *> paths;
      for (const auto &p : tok_texts) paths.push_back(p.c_str());
      Check(mlasr_bpe_train(paths.data(), paths.size(), tok_vocab, tok_beta, tok_total, g.seed,
                            tok_out.c_str()));
    };
  });
  auto *tok_enc = tok->add_subcommand("encode", "tokenize sentences");
  std::string tok_model, tok_in = "-", tok_enc_out;
  tok_enc->add_option("--model", tok_model, "model file")->required();
  tok_enc->add_option("--in", tok_in, "input text (- for stdin)");
  tok_enc->add_option("--out", tok_enc_out, "output file (default stdout)");
  tok_enc->callback([&] {
    action = [&] {
      std::istringstream lines(Slurp(tok_in));
      std::string line, out;
      while (std::getline(lines, line)) {
        char *tokens = nullptr;
        Check(mlasr_bpe_encode(tok_model.c_str(), line.c_str(), &tokens));
        out += Take(tokens) + "\n";
      }
      Emit(tok_enc_out, out);
    };
  });

  // lm train
  auto *lm = app.add_subcommand("lm", "word n-gram language model");
  lm->require_subcommand(1);
  auto *lm_train = lm->add_subcommand("train", "estimate an ARPA model");
  std::string lm_text, lm_out;
  int lm_order = 4;
  lm_train->add_option("--text", lm_text, "training sentences")->required();
  lm_train->add_option("--order", lm_order, "n-gram order")->check(CLI::PositiveNumber);
  lm_train->add_option("--out", lm_out, "ARPA file")->required();
  lm_train->callback([&] {
    action = [&] { Check(mlasr_lm_train(lm_text.c_str(), lm_order, lm_out.c_str())); };
  });

  // graph build
  auto *graph = app.add_subcommand("graph", "decoding graphs");
  graph->require_subcommand(1);
  auto *graph_build = graph->add_subcommand("build", "compose T, L and G");
  std::string gb_units, gb_kind = "phoneme", gb_lexicon, gb_lm, gb_out;
  graph_build->add_option("--units", gb_units, "unit listing")->required();
  graph_build->add_option("--kind", gb_kind, "phoneme or subword")
      ->check(CLI::IsMember({"phoneme", "subword"}));
  graph_build->add_option("--lexicon", gb_lexicon, "lexicon file")->required();
  graph_build->add_option("--lm", gb_lm, "ARPA file")->required();
  graph_build->add_option("--out", gb_out, "graph file")->required();
  graph_build->callback([&] {
    action = [&] {
      Check(mlasr_graph_build(gb_units.c_str(), gb_kind.c_str(), gb_lexicon.c_str(),
                              gb_lm.c_str(), gb_out.c_str()));
    };
  });

  // train / finetune
  struct TrainArgs {
    std::string units, kind, train_feats, train_labels, dev_feats, dev_labels, out;
    std::string pretrained, transfer;
  };
  TrainArgs ta;
  auto add_train_options = [&](CLI::App *cmd) {
    cmd->add_option("--units", ta.units, "unit listing");
    cmd->add_option("--kind", ta.kind, "phoneme or subword")
        ->check(CLI::IsMember({"phoneme", "subword"}));
    cmd->add_option("--train-feats", ta.train_feats, "training features");
    cmd->add_option("--train-labels", ta.train_labels, "training unit sequences");
    cmd->add_option("--dev-feats", ta.dev_feats, "validation features");
    cmd->add_option("--dev-labels", ta.dev_labels, "validation unit sequences");
    cmd->add_option("--out", ta.out, "output checkpoint");
  };
  auto request = [&](bool finetune) {
    json req = ConfigObject(g.config);
    auto set = [&](const char *key, const std::string &v) {
      if (!v.empty()) req[key] = v;
    };
    set("units", ta.units);
    set("kind", ta.kind);
    set("train_features", ta.train_feats);
    set("train_labels", ta.train_labels);
    set("dev_features", ta.dev_feats);
    set("dev_labels", ta.dev_labels);
    set("output", ta.out);
    if (finetune) {
      set("pretrained", ta.pretrained);
      set("transfer", ta.transfer);
    }
    if (g.seed_set || !req.contains("seed")) req["seed"] = g.seed;
    return req.dump();
  };
  auto *train = app.add_subcommand("train", "train a model from random initialization");
  add_train_options(train);
  train->callback([&] {
    action = [&] {
      char *history = nullptr;
      Check(mlasr_train(request(false).c_str(), &history));
      std::cout << Take(history) << '\n';
    };
  });
  auto *finetune = app.add_subcommand("finetune", "fine-tune a pretrained model");
  add_train_options(finetune);
  finetune->add_option("--pretrained", ta.pretrained, "pretrained checkpoint");
  finetune->add_option("--transfer", ta.transfer, "copy_shared or random_all")
      ->check(CLI::IsMember({"copy_shared", "random_all"}));
  finetune->callback([&] {
    action = [&] {
      char *history = nullptr;
      Check(mlasr_finetune(request(true).c_str(), &history));
      std::cout << Take(history) << '\n';
    };
  });

  // decode
  auto *decode = app.add_subcommand("decode", "decode feature records");
  std::string dec_model, dec_feats, dec_graph, dec_out;
  bool dec_free = false;
  mlasr_decode_options dec_opts = mlasr_decode_default_options();
  decode->add_option("--model", dec_model, "checkpoint")->required();
  decode->add_option("--feats", dec_feats, "feature file")->required();
  auto *graph_opt = decode->add_option("--graph", dec_graph, "decoding graph");
  auto *free_opt = decode->add_flag("--lexicon-free", dec_free, "prefix beam search over units");
  graph_opt->excludes(free_opt);
  decode->add_option("--beam", dec_opts.beam, "tokens per frame")->check(CLI::PositiveNumber);
  decode->add_option("--score-beam", dec_opts.score_beam, "cost beam (<= 0: unlimited)");
  decode->add_option("--acoustic-scale", dec_opts.acoustic_scale, "acoustic cost scale")
      ->check(CLI::PositiveNumber);
  decode->add_option("--out", dec_out, "output file (default stdout)");
  decode->callback([&] {
    if (dec_graph.empty() && !dec_free)
      throw CLI::ValidationError("--graph", "decode needs --graph or --lexicon-free");
    action = [&] {
      mlasr_model *model = nullptr;
      mlasr_graph *fst = nullptr;
      Check(mlasr_model_load(dec_model.c_str(), &model));
      std::unique_ptr<mlasr_model, void (*)(mlasr_model *)> model_guard(model, mlasr_model_free);
      if (!dec_graph.empty()) Check(mlasr_graph_load(dec_graph.c_str(), &fst));
      std::unique_ptr<mlasr_graph, void (*)(mlasr_graph *)> graph_guard(fst, mlasr_graph_free);
      char *lines = nullptr;
      size_t failures = 0;
      Check(mlasr_decode_file(model, fst, dec_feats.c_str(), &dec_opts, &lines, &failures));
      Emit(dec_out, Take(lines));
      if (failures)
        std::fprintf(stderr, "warning: %zu record(s) without a surviving token decoded as empty\n",
                     failures);
    };
  });

  // eval
  auto *eval = app.add_subcommand("eval", "pooled error rate of line-aligned files");
  std::string ev_ref, ev_hyp;
  eval->add_option("--ref", ev_ref, "reference")->required();
  eval->add_option("--hyp", ev_hyp, "hypothesis")->required();
  eval->callback([&] {
    action = [&] {
      mlasr_error_counts c;
      double rate = 0;
      Check(mlasr_eval(ev_ref.c_str(), ev_hyp.c_str(), &c, &rate));
      std::printf("%.2f%% (S=%lld D=%lld I=%lld N=%lld)\n", rate,
                  static_cast<long long>(c.substitutions), static_cast<long long>(c.deletions),
                  static_cast<long long>(c.insertions),
                  static_cast<long long>(c.reference_length));
    };
  });

  // world gen
  auto *world = app.add_subcommand("world", "synthetic multilingual corpus");
  world->require_subcommand(1);
  auto *world_gen = world->add_subcommand("gen", "generate a world");
  std::string world_out;
  world_gen->add_option("--out", world_out, "output directory")->required();
  world_gen->callback([&] {
    action = [&] {
      json cfg = ConfigObject(g.config);
      if (g.seed_set) cfg["seed"] = g.seed;
      Check(mlasr_world_generate(cfg.dump().c_str(), world_out.c_str()));
    };
  });

  // experiment run
  auto *exp = app.add_subcommand("experiment", "training and scoring pipelines");
  exp->require_subcommand(1);
  auto *exp_run = exp->add_subcommand("run", "run an experiment config");
  std::string exp_world, exp_out;
  exp_run->add_option("--world", exp_world, "world directory")->required();
  exp_run->add_option("--out", exp_out, "output directory")->required();
  exp_run->callback([&] {
    if (g.config.empty()) throw CLI::ValidationError("--config", "experiment run needs --config");
    action = [&] {
      json cfg = ConfigObject(g.config);
      if (g.seed_set) cfg["seed"] = g.seed;
      char *report = nullptr;
      Check(mlasr_experiment_run(exp_world.c_str(), cfg.dump().c_str(), exp_out.c_str(), &report));
      std::cout << Take(report);
    };
  });

  // embeddings export
  auto *emb = app.add_subcommand("embeddings", "unit embeddings");
  emb->require_subcommand(1);
  auto *emb_export = emb->add_subcommand("export", "write output-layer rows as TSV");
  std::string emb_model, emb_out;
  emb_export->add_option("--model", emb_model, "checkpoint")->required();
  emb_export->add_option("--out", emb_out, "TSV file")->required();
  emb_export->callback([&] {
    action = [&] { Check(mlasr_embeddings_export(emb_model.c_str(), emb_out.c_str())); };
  });

  try {
    app.parse(argc, argv);
    g.seed_set = seed_opt->count() > 0;
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  try {
    action();
  } catch (const Failure &f) {
    std::cerr << "error: " << mlasr_status_name(f.status) << ": " << mlasr_last_error() << '\n';
    return 1;
  } catch (const CLI::Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  }
  return 0;
}
