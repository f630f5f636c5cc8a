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

#include "mlasr/model.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "json.hpp"
#include "mlasr/error.h"

namespace mlasr {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr uint32_t kCheckpointVersion = 1;

std::string Block(int i, const char *suffix) {
  return "block" + std::to_string(i) + "." + suffix;
}

bool IsVectorParam(const std::string &name) {
  auto ends = [&](const char *s) {
    size_t n = std::strlen(s);
    return name.size() >= n && name.compare(name.size() - n, n, s) == 0;
  };
  return ends(".bias") || ends(".gain");
}

// Expected parameter shapes for a config and alphabet.
std::map<std::string, std::pair<int, int>> Shapes(const EncoderConfig &c, int units) {
  const int d = c.hidden_dim;
  std::map<std::string, std::pair<int, int>> s;
  s["conv.weight"] = {d, c.kernel_size * c.input_dim};
  s["conv.bias"] = {1, d};
  for (int i = 0; i < c.num_blocks; ++i) {
    s[Block(i, "ff1.weight")] = {4 * d, d};
    s[Block(i, "ff1.bias")] = {1, 4 * d};
    s[Block(i, "ff2.weight")] = {d, 4 * d};
    s[Block(i, "ff2.bias")] = {1, d};
    s[Block(i, "ln.gain")] = {1, d};
    s[Block(i, "ln.bias")] = {1, d};
  }
  s[kOutputWeight] = {units, d};
  return s;
}

// Windows of `kernel` frames centred on every stride-th frame, zero padded:
// row j holds frames j*stride - kernel/2 ... j*stride + kernel/2.
Matrix Unfold(const EncoderConfig &c, const Matrix &x) {
  const int t_out = c.OutputFrames(static_cast<int>(x.rows()));
  const int f = c.input_dim;
  Matrix u = Matrix::Zero(t_out, c.kernel_size * f);
  for (int j = 0; j < t_out; ++j)
    for (int k = 0; k < c.kernel_size; ++k) {
      int src = j * c.subsample_stride + k - c.kernel_size / 2;
      if (src < 0 || src >= x.rows()) continue;
      u.block(j, k * f, 1, f) = x.row(src);
    }
  return u;
}

struct BlockCache {
  Matrix input;     // H entering the block
  Matrix pre;       // first affine output
  Matrix hidden;    // after ReLU and dropout
  Matrix mask;      // dropout scale per element (empty when unused)
  Matrix xhat;      // normalized residual sum
  Vector inv_std;   // per frame
};

struct ForwardCache {
  Matrix unfolded;
  std::vector<BlockCache> blocks;
  Matrix top;  // final encoder output
};

Matrix AddBias(Matrix m, const Matrix &bias) {
  m.rowwise() += bias.row(0);
  return m;
}

Matrix RunEncoder(const ModelCheckpoint &ckpt, const Matrix &x, ForwardCache *cache,
                  std::mt19937_64 *rng) {
  const auto &c = ckpt.config;
  const auto &p = ckpt.params;
  if (x.cols() != c.input_dim)
    Fail(ErrorCode::kShape, "feature dimension " + std::to_string(x.cols()) +
                                " does not match the model input dimension " +
                                std::to_string(c.input_dim));
  if (x.rows() < 1) Fail(ErrorCode::kShape, "empty feature matrix");
  Matrix u = Unfold(c, x);
  Matrix h = AddBias(u * p.at("conv.weight").transpose(), p.at("conv.bias"));
  if (cache) cache->unfolded = std::move(u);
  const bool drop = rng && c.dropout > 0;
  std::bernoulli_distribution keep(1.0 - c.dropout);
  for (int i = 0; i < c.num_blocks; ++i) {
    BlockCache bc;
    Matrix pre = AddBias(h * p.at(Block(i, "ff1.weight")).transpose(),
                         p.at(Block(i, "ff1.bias")));
    Matrix hidden = pre.cwiseMax(0.0);
    if (drop) {
      bc.mask.resize(hidden.rows(), hidden.cols());
      const double scale = 1.0 / (1.0 - c.dropout);
      for (Eigen::Index r = 0; r < hidden.rows(); ++r)
        for (Eigen::Index k = 0; k < hidden.cols(); ++k)
          bc.mask(r, k) = keep(*rng) ? scale : 0.0;
      hidden = hidden.cwiseProduct(bc.mask);
    }
    Matrix s = h + AddBias(hidden * p.at(Block(i, "ff2.weight")).transpose(),
                           p.at(Block(i, "ff2.bias")));
    Vector mean = s.rowwise().mean();
    Matrix centered = s.colwise() - mean;
    Vector var = centered.array().square().rowwise().mean();
    Vector inv_std = (var.array() + kLayerNormEps).rsqrt();
    Matrix xhat = centered.array().colwise() * inv_std.array();
    Matrix out = (xhat.array().rowwise() * p.at(Block(i, "ln.gain")).row(0).array()).matrix();
    out.rowwise() += p.at(Block(i, "ln.bias")).row(0);
    if (cache) {
      bc.input = std::move(h);
      bc.pre = std::move(pre);
      bc.hidden = std::move(hidden);
      bc.xhat = std::move(xhat);
      bc.inv_std = std::move(inv_std);
      cache->blocks.push_back(std::move(bc));
    }
    h = std::move(out);
  }
  if (cache) cache->top = h;
  return h;
}

void CheckFinite(const Matrix &m, const char *what) {
  if (!m.allFinite()) Fail(ErrorCode::kNumeric, std::string("non-finite ") + what);
}

// Little-endian binary helpers.
template <typename T>
void Put(std::ostream &out, T v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <typename T>
T Get(std::istream &in, const std::string &path) {
  T v;
  if (!in.read(reinterpret_cast<char *>(&v), sizeof v))
    Fail(ErrorCode::kFormat, path + ": truncated file");
  return v;
}

void PutString(std::ostream &out, const std::string &s) {
  Put<uint32_t>(out, static_cast<uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string GetString(std::istream &in, const std::string &path) {
  uint32_t n = Get<uint32_t>(in, path);
  if (n > (1u << 28)) Fail(ErrorCode::kFormat, path + ": implausible string length");
  std::string s(n, '\0');
  if (n && !in.read(s.data(), n)) Fail(ErrorCode::kFormat, path + ": truncated file");
  return s;
}

}  // namespace

std::string EncoderConfig::ToJson() const {
  nlohmann::json j{{"input_dim", input_dim},     {"hidden_dim", hidden_dim},
                   {"num_blocks", num_blocks},   {"subsample_stride", subsample_stride},
                   {"kernel_size", kernel_size}, {"dropout", dropout}};
  return j.dump();
}

EncoderConfig EncoderConfig::FromJson(const std::string &json_text) {
  EncoderConfig c;
  try {
    auto j = nlohmann::json::parse(json_text);
    c.input_dim = j.value("input_dim", c.input_dim);
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.num_blocks = j.value("num_blocks", c.num_blocks);
    c.subsample_stride = j.value("subsample_stride", c.subsample_stride);
    c.kernel_size = j.value("kernel_size", c.kernel_size);
    c.dropout = j.value("dropout", c.dropout);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kConfig, std::string("bad encoder config: ") + e.what());
  }
  c.Validate();
  return c;
}

void EncoderConfig::Validate() const {
  if (input_dim < 1 || hidden_dim < 1 || num_blocks < 0 || subsample_stride < 1 ||
      kernel_size < 1)
    Fail(ErrorCode::kConfig, "encoder dimensions must be positive");
  if (!(dropout >= 0 && dropout < 1))
    Fail(ErrorCode::kConfig, "dropout must lie in [0, 1)");
}

int EncoderConfig::OutputFrames(int input_frames) const {
  return (input_frames + subsample_stride - 1) / subsample_stride;
}

const Matrix &ModelCheckpoint::W() const { return params.at(kOutputWeight); }
Matrix &ModelCheckpoint::W() { return params.at(kOutputWeight); }

void ModelCheckpoint::Validate() const {
  config.Validate();
  auto shapes = Shapes(config, alphabet.size());
  if (shapes.size() != params.size())
    Fail(ErrorCode::kShape, "checkpoint has " + std::to_string(params.size()) +
                                " tensors, expected " + std::to_string(shapes.size()));
  for (const auto &[name, shape] : shapes) {
    auto it = params.find(name);
    if (it == params.end()) Fail(ErrorCode::kShape, "missing tensor " + name);
    if (it->second.rows() != shape.first || it->second.cols() != shape.second)
      Fail(ErrorCode::kShape, "tensor " + name + " is " +
                                  std::to_string(it->second.rows()) + "x" +
                                  std::to_string(it->second.cols()) + ", expected " +
                                  std::to_string(shape.first) + "x" +
                                  std::to_string(shape.second));
    if (!it->second.allFinite()) Fail(ErrorCode::kNumeric, "non-finite values in " + name);
  }
}

ModelCheckpoint InitCheckpoint(const EncoderConfig &config, const Alphabet &alphabet,
                               uint64_t seed) {
  config.Validate();
  ModelCheckpoint ck;
  ck.config = config;
  ck.alphabet = alphabet;
  ck.meta.seed = seed;
  std::mt19937_64 rng(seed);
  // Map order gives a fixed draw order.
  for (const auto &[name, shape] : Shapes(config, alphabet.size())) {
    Matrix m(shape.first, shape.second);
    if (name.size() > 5 && name.compare(name.size() - 5, 5, ".gain") == 0) {
      m.setOnes();
    } else if (IsVectorParam(name)) {
      m.setZero();
    } else {
      std::normal_distribution<double> n(0.0, 1.0 / std::sqrt(static_cast<double>(shape.second)));
      for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index k = 0; k < m.cols(); ++k) m(r, k) = n(rng);
    }
    ck.params.emplace(name, std::move(m));
  }
  return ck;
}

Matrix Encode(const ModelCheckpoint &ckpt, const Matrix &features) {
  return RunEncoder(ckpt, features, nullptr, nullptr);
}

PosteriorGrid Forward(const ModelCheckpoint &ckpt, const Matrix &features) {
  Matrix h = RunEncoder(ckpt, features, nullptr, nullptr);
  Matrix logits = h * ckpt.W().transpose();
  CheckFinite(logits, "logits");
  PosteriorGrid g = PosteriorGrid::FromLogits(logits);
  CheckFinite(g.log_probs, "posteriors");
  return g;
}

LossGrad ComputeLossGrad(const ModelCheckpoint &ckpt, const Matrix &features,
                         const LabelSequence &labels, LossNormalization norm,
                         std::mt19937_64 *rng) {
  const auto &c = ckpt.config;
  const auto &p = ckpt.params;
  ForwardCache cache;
  RunEncoder(ckpt, features, &cache, rng);
  Matrix logits = cache.top * ckpt.W().transpose();
  CheckFinite(logits, "logits");
  PosteriorGrid grid = PosteriorGrid::FromLogits(logits);
  CtcLossGrad ctc = CtcLossAndGrad(grid, labels);
  const double scale = 1.0 / LossNormalizer(norm, grid.frames(), labels.size());

  LossGrad out;
  out.loss = ctc.loss * scale;
  Matrix dz = ctc.grad * scale;
  out.grads[kOutputWeight] = dz.transpose() * cache.top;
  Matrix dh = dz * ckpt.W();

  for (int i = c.num_blocks - 1; i >= 0; --i) {
    const BlockCache &bc = cache.blocks[i];
    const Matrix &gain = p.at(Block(i, "ln.gain"));
    out.grads[Block(i, "ln.gain")] = dh.cwiseProduct(bc.xhat).colwise().sum();
    out.grads[Block(i, "ln.bias")] = dh.colwise().sum();
    Matrix dxhat = dh.array().rowwise() * gain.row(0).array();
    Vector mean_dxhat = dxhat.rowwise().mean();
    Vector mean_dxhat_xhat = dxhat.cwiseProduct(bc.xhat).rowwise().mean();
    Matrix ds = dxhat;
    ds.colwise() -= mean_dxhat;
    ds -= (bc.xhat.array().colwise() * mean_dxhat_xhat.array()).matrix();
    ds = ds.array().colwise() * bc.inv_std.array();

    out.grads[Block(i, "ff2.weight")] = ds.transpose() * bc.hidden;
    out.grads[Block(i, "ff2.bias")] = ds.colwise().sum();
    Matrix dhidden = ds * p.at(Block(i, "ff2.weight"));
    if (bc.mask.size()) dhidden = dhidden.cwiseProduct(bc.mask);
    Matrix dpre = (bc.pre.array() > 0.0).select(dhidden, 0.0);
    out.grads[Block(i, "ff1.weight")] = dpre.transpose() * bc.input;
    out.grads[Block(i, "ff1.bias")] = dpre.colwise().sum();
    dh = ds + dpre * p.at(Block(i, "ff1.weight"));
  }
  out.grads["conv.weight"] = dh.transpose() * cache.unfolded;
  out.grads["conv.bias"] = dh.colwise().sum();
  return out;
}

void WriteCheckpoint(const std::string &path, const ModelCheckpoint &ckpt) {
  ckpt.Validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out.write("MLCK", 4);
  Put<uint32_t>(out, kCheckpointVersion);
  Put<uint32_t>(out, ckpt.alphabet.kind() == UnitKind::kPhoneme ? 0 : 1);
  auto units = ckpt.alphabet.units();
  Put<uint32_t>(out, static_cast<uint32_t>(units.size()));
  for (const auto &u : units) PutString(out, u);
  nlohmann::json meta{{"seed", ckpt.meta.seed},
                      {"step", ckpt.meta.step},
                      {"encoder", nlohmann::json::parse(ckpt.config.ToJson())},
                      {"schedule", nlohmann::json::parse(ckpt.meta.schedule_json)}};
  PutString(out, meta.dump());
  Put<uint32_t>(out, static_cast<uint32_t>(ckpt.params.size()));
  for (const auto &[name, m] : ckpt.params) {
    PutString(out, name);
    if (IsVectorParam(name)) {
      Put<uint32_t>(out, 1);
      Put<uint64_t>(out, static_cast<uint64_t>(m.cols()));
    } else {
      Put<uint32_t>(out, 2);
      Put<uint64_t>(out, static_cast<uint64_t>(m.rows()));
      Put<uint64_t>(out, static_cast<uint64_t>(m.cols()));
    }
    out.write(reinterpret_cast<const char *>(m.data()),
              static_cast<std::streamsize>(m.size() * sizeof(double)));
  }
  if (!out) Fail(ErrorCode::kIo, "write failed: " + path);
}

ModelCheckpoint ReadCheckpoint(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, "MLCK", 4) != 0)
    Fail(ErrorCode::kFormat, path + ": not a checkpoint");
  uint32_t version = Get<uint32_t>(in, path);
  if (version != kCheckpointVersion)
    Fail(ErrorCode::kFormat, path + ": unsupported checkpoint version " + std::to_string(version));
  uint32_t kind = Get<uint32_t>(in, path);
  if (kind > 1) Fail(ErrorCode::kFormat, path + ": bad unit kind");
  uint32_t n_units = Get<uint32_t>(in, path);
  std::vector<std::string> units;
  for (uint32_t i = 0; i < n_units; ++i) units.push_back(GetString(in, path));
  ModelCheckpoint ck;
  ck.alphabet = Alphabet(kind == 0 ? UnitKind::kPhoneme : UnitKind::kSubword, units);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(GetString(in, path));
    ck.meta.seed = meta.value("seed", uint64_t{0});
    ck.meta.step = meta.value("step", int64_t{0});
    ck.meta.schedule_json = meta.value("schedule", nlohmann::json::object()).dump();
    ck.config = EncoderConfig::FromJson(meta.at("encoder").dump());
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorCode::kFormat, path + ": bad metadata: " + e.what());
  }
  uint32_t n_tensors = Get<uint32_t>(in, path);
  for (uint32_t i = 0; i < n_tensors; ++i) {
    std::string name = GetString(in, path);
    uint32_t rank = Get<uint32_t>(in, path);
    if (rank < 1 || rank > 2) Fail(ErrorCode::kFormat, path + ": bad rank for " + name);
    uint64_t rows = 1, cols;
    if (rank == 2) rows = Get<uint64_t>(in, path);
    cols = Get<uint64_t>(in, path);
    if (rows * cols > (1ull << 30)) Fail(ErrorCode::kFormat, path + ": tensor too large");
    Matrix m(rows, cols);
    if (!in.read(reinterpret_cast<char *>(m.data()),
                 static_cast<std::streamsize>(m.size() * sizeof(double))))
      Fail(ErrorCode::kFormat, path + ": truncated tensor " + name);
    ck.params.emplace(std::move(name), std::move(m));
  }
  ck.Validate();
  return ck;
}

void AppendFeatureRecord(std::ostream &out, const Matrix &features) {
  out.write("MLFT", 4);
  Put<uint32_t>(out, static_cast<uint32_t>(features.rows()));
  Put<uint32_t>(out, static_cast<uint32_t>(features.cols()));
  for (Eigen::Index t = 0; t < features.rows(); ++t)
    for (Eigen::Index k = 0; k < features.cols(); ++k)
      Put<float>(out, static_cast<float>(features(t, k)));
}

std::vector<Matrix> ReadFeatureRecords(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::vector<Matrix> out;
  char magic[4];
  while (in.read(magic, 4)) {
    if (std::memcmp(magic, "MLFT", 4) != 0)
      Fail(ErrorCode::kFormat, path + ": bad feature record " + std::to_string(out.size()));
    uint32_t t = Get<uint32_t>(in, path), dim = Get<uint32_t>(in, path);
    if (t == 0 || dim == 0 || static_cast<uint64_t>(t) * dim > (1ull << 28))
      Fail(ErrorCode::kFormat, path + ": bad feature shape");
    std::vector<float> buf(static_cast<size_t>(t) * dim);
    if (!in.read(reinterpret_cast<char *>(buf.data()),
                 static_cast<std::streamsize>(buf.size() * sizeof(float))))
      Fail(ErrorCode::kFormat, path + ": truncated feature record");
    Matrix m(t, dim);
    for (uint32_t r = 0; r < t; ++r)
      for (uint32_t k = 0; k < dim; ++k) m(r, k) = buf[static_cast<size_t>(r) * dim + k];
    if (!m.allFinite()) Fail(ErrorCode::kNumeric, path + ": non-finite features");
    out.push_back(std::move(m));
  }
  if (in.gcount() != 0) Fail(ErrorCode::kFormat, path + ": trailing bytes");
  return out;
}

}  // namespace mlasr
