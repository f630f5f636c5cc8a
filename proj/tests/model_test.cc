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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "mlasr/error.h"
#include "mlasr/model.h"
#include "mlasr/trainer.h"

using namespace mlasr;

namespace {

EncoderConfig Tiny() {
  EncoderConfig c;
  c.input_dim = 4;
  c.hidden_dim = 6;
  c.num_blocks = 2;
  c.dropout = 0.0;
  return c;
}

Matrix RandomFeatures(std::mt19937_64 &rng, int T, int F) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix x(T, F);
  for (int t = 0; t < T; ++t)
    for (int k = 0; k < F; ++k) x(t, k) = n(rng);
  return x;
}

// Toy corpus: each unit has a prototype vector, utterances concatenate
// noisy prototype frames.
std::vector<Utterance> ToyCorpus(std::mt19937_64 &rng, int n, int units, int dim) {
  std::normal_distribution<double> noise(0.0, 0.3);
  Matrix proto = RandomFeatures(rng, units, dim) * 2.0;
  std::vector<Utterance> out;
  for (int i = 0; i < n; ++i) {
    Utterance u;
    int len = 2 + static_cast<int>(rng() % 3);
    std::vector<int> frames_of;
    for (int k = 0; k < len; ++k) u.labels.push_back(1 + static_cast<int32_t>(rng() % units));
    u.features.resize(len * 4, dim);
    for (int k = 0; k < len; ++k)
      for (int f = 0; f < 4; ++f)
        for (int d = 0; d < dim; ++d)
          u.features(k * 4 + f, d) = proto(u.labels[k] - 1, d) + noise(rng);
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace

TEST_CASE("zero output matrix gives uniform rows") {
  Alphabet a(UnitKind::kPhoneme, {"a", "b", "c"});
  auto ck = InitCheckpoint(Tiny(), a, 1);
  ck.W().setZero();
  std::mt19937_64 rng(1);
  auto g = Forward(ck, RandomFeatures(rng, 7, 4));
  CHECK(g.frames() == 4);
  for (int t = 0; t < g.frames(); ++t)
    for (int k = 0; k < 4; ++k) CHECK(std::exp(g.log_probs(t, k)) == doctest::Approx(0.25));
}

TEST_CASE("closed form softmax with D = 1") {
  Alphabet a(UnitKind::kPhoneme, {"a"});
  EncoderConfig c = Tiny();
  c.input_dim = 1;
  c.hidden_dim = 1;
  c.num_blocks = 0;
  c.subsample_stride = 1;
  c.kernel_size = 1;
  auto ck = InitCheckpoint(c, a, 1);
  ck.params["conv.weight"](0, 0) = 1.0;
  ck.params["conv.bias"](0, 0) = 0.0;
  ck.W() << std::log(2.0), 0.0;
  Matrix x(1, 1);
  x << 1.0;
  auto g = Forward(ck, x);
  CHECK(std::exp(g.log_probs(0, 0)) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(std::exp(g.log_probs(0, 1)) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("rows sum to one and shape errors") {
  Alphabet a(UnitKind::kPhoneme, {"a", "b"});
  auto ck = InitCheckpoint(Tiny(), a, 3);
  std::mt19937_64 rng(2);
  for (int T : {1, 2, 5, 9}) {
    auto g = Forward(ck, RandomFeatures(rng, T, 4));
    CHECK(g.frames() == (T + 1) / 2);
    for (int t = 0; t < g.frames(); ++t)
      CHECK(std::abs(g.log_probs.row(t).array().exp().sum() - 1.0) < 1e-6);
  }
  CHECK_THROWS_AS(Forward(ck, RandomFeatures(rng, 4, 5)), Error);
}

TEST_CASE("parameter gradients match finite differences") {
  Alphabet a(UnitKind::kPhoneme, {"a", "b", "c"});
  auto ck = InitCheckpoint(Tiny(), a, 5);
  std::mt19937_64 rng(4);
  // Non-trivial LayerNorm parameters.
  for (auto &[name, p] : ck.params)
    if (name.find(".ln.") != std::string::npos)
      p.array() += RandomFeatures(rng, p.rows(), p.cols()).array() * 0.3;
  Matrix x = RandomFeatures(rng, 9, 4);
  LabelSequence y{1, 3, 3};
  auto lg = ComputeLossGrad(ck, x, y, LossNormalization::kFrames);
  double worst = 0.0;
  for (auto &[name, p] : ck.params) {
    for (Eigen::Index i = 0; i < p.size(); i += 1 + p.size() / 7) {
      const double h = 1e-6;
      double saved = p.data()[i];
      p.data()[i] = saved + h;
      double up = ComputeLossGrad(ck, x, y, LossNormalization::kFrames).loss;
      p.data()[i] = saved - h;
      double down = ComputeLossGrad(ck, x, y, LossNormalization::kFrames).loss;
      p.data()[i] = saved;
      double fd = (up - down) / (2 * h);
      double an = lg.grads.at(name).data()[i];
      double err = std::abs(fd - an) / std::max(1e-3, std::abs(fd) + std::abs(an));
      worst = std::max(worst, err);
      CHECK_MESSAGE(err < 1e-4, name << "[" << i << "] fd=" << fd << " analytic=" << an);
    }
  }
  MESSAGE("worst relative error " << worst);
}

TEST_CASE("checkpoint round trip") {
  Alphabet a(UnitKind::kSubword, {"<unk>", "<s>", "ab", "ʃ"});
  auto ck = InitCheckpoint(Tiny(), a, 7);
  ck.meta.step = 12;
  auto path = std::filesystem::temp_directory_path() / "mlasr_model_test.ckpt";
  WriteCheckpoint(path.string(), ck);
  auto back = ReadCheckpoint(path.string());
  CHECK(back.alphabet == a);
  CHECK(back.config == ck.config);
  CHECK(back.meta.step == 12);
  for (const auto &[name, p] : ck.params) CHECK(back.params.at(name) == p);
  {
    std::ofstream bad(path, std::ios::binary);
    bad << "NOPE";
  }
  CHECK_THROWS_AS(ReadCheckpoint(path.string()), Error);
  std::filesystem::remove(path);
}

TEST_CASE("feature records") {
  std::mt19937_64 rng(8);
  Matrix a = RandomFeatures(rng, 3, 4), b = RandomFeatures(rng, 5, 4);
  auto path = std::filesystem::temp_directory_path() / "mlasr_feats_test.bin";
  {
    std::ofstream out(path, std::ios::binary);
    AppendFeatureRecord(out, a);
    AppendFeatureRecord(out, b);
  }
  auto recs = ReadFeatureRecords(path.string());
  REQUIRE(recs.size() == 2);
  CHECK((recs[0] - a.cast<float>().cast<double>()).norm() == 0.0);
  CHECK(recs[1].rows() == 5);
  std::filesystem::remove(path);
}

TEST_CASE("noam schedule shape") {
  const int64_t w = 30;
  double peak = 0;
  int64_t arg = 0;
  for (int64_t s = 1; s <= 300; ++s) {
    double lr = NoamLearningRate(1e-3, w, s);
    if (s < w) CHECK(NoamLearningRate(1e-3, w, s + 1) > lr);
    if (s > w) CHECK(NoamLearningRate(1e-3, w, s + 1) < lr);
    if (lr > peak) {
      peak = lr;
      arg = s;
    }
  }
  CHECK(arg == w);
  CHECK(peak == 1e-3);
  TrainSchedule s;
  CHECK(WarmupSteps(s, 1000) == 100);
}

TEST_CASE("tiny corpus overfits and is deterministic") {
  std::mt19937_64 rng(10);
  auto corpus = ToyCorpus(rng, 20, 3, 4);
  Alphabet a(UnitKind::kPhoneme, {"a", "b", "c"});
  auto init = InitCheckpoint(Tiny(), a, 11);
  TrainSchedule s;
  s.max_epochs = 200;
  s.early_stop_patience = 200;
  s.batch_size = 5;
  s.peak_lr = 5e-3;
  double initial = EvaluateLoss(init, corpus, s.normalization);
  auto r = Train(init, corpus, {}, s, 12);
  double final_loss = EvaluateLoss(r.checkpoint, corpus, s.normalization);
  CHECK(final_loss < 0.1 * initial);
  CHECK(r.history.averaged_epochs.size() == 3);
  s.max_epochs = 5;
  auto h1 = Train(init, corpus, {}, s, 3).history;
  auto h2 = Train(init, corpus, {}, s, 3).history;
  REQUIRE(h1.epochs.size() == h2.epochs.size());
  for (size_t i = 0; i < h1.epochs.size(); ++i) {
    CHECK(h1.epochs[i].train_loss == h2.epochs[i].train_loss);
    CHECK(h1.epochs[i].val_loss == h2.epochs[i].val_loss);
  }
}

TEST_CASE("infeasible utterances are skipped") {
  Alphabet a(UnitKind::kPhoneme, {"a", "b"});
  auto init = InitCheckpoint(Tiny(), a, 1);
  std::mt19937_64 rng(1);
  std::vector<Utterance> data{{RandomFeatures(rng, 2, 4), {1, 2, 1}},
                              {RandomFeatures(rng, 8, 4), {1, 2}}};
  TrainSchedule s;
  s.max_epochs = 2;
  auto r = Train(init, data, {}, s, 1);
  CHECK(r.history.skipped_utterances == 1);
  CHECK_THROWS_AS(Train(init, {data[0]}, {}, s, 1), Error);
}

TEST_CASE("averaging identical checkpoints is the identity") {
  Alphabet a(UnitKind::kPhoneme, {"a"});
  auto ck = InitCheckpoint(Tiny(), a, 2);
  ck.params["conv.bias"](0, 0) = 0.1;
  auto avg = AverageCheckpoints({ck, ck, ck});
  for (const auto &[name, p] : ck.params) CHECK(avg.params.at(name) == p);
}

TEST_CASE("transfer init") {
  Alphabet src(UnitKind::kPhoneme, {"a", "b", "c"});
  auto ck = InitCheckpoint(Tiny(), src, 4);
  auto same = TransferInit(ck, src, TransferMode::kCopyShared, 9);
  CHECK(same.W() == ck.W());
  Alphabet disjoint(UnitKind::kPhoneme, {"x", "y"});
  auto d = TransferInit(ck, disjoint, TransferMode::kCopyShared, 9);
  CHECK(d.W().row(0) == ck.W().row(0));
  CHECK(d.W().row(1) != ck.W().row(1));
  auto d2 = TransferInit(ck, disjoint, TransferMode::kCopyShared, 9);
  CHECK(d2.W() == d.W());
  Alphabet mixed(UnitKind::kPhoneme, {"b", "q", "a"});
  auto m = TransferInit(ck, mixed, TransferMode::kCopyShared, 1);
  CHECK(m.W().row(1) == ck.W().row(2));
  CHECK(m.W().row(3) == ck.W().row(1));
  CHECK(m.params.at("conv.weight") == ck.params.at("conv.weight"));
  auto r = TransferInit(ck, src, TransferMode::kRandomAll, 1);
  CHECK(r.W().row(0) != ck.W().row(0));
  CHECK_THROWS_AS(TransferInit(ck, Alphabet(UnitKind::kSubword, {"a"}), TransferMode::kCopyShared, 1),
                  Error);
  auto rows = ExportEmbeddings(ck);
  CHECK(rows.size() == 4);
  CHECK(rows[2].symbol == "b");
  for (int c = 0; c < 6; ++c) CHECK(rows[2].values[c] == ck.W()(2, c));
}
