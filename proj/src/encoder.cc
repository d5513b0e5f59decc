// Copyright 2026 The lingmt Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ==============================================================================

#include "lingmt/encoder.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "lingmt/tokenizer.h"

namespace lingmt {

namespace {

std::string layer_name(int l, const char* part) {
  return "layer" + std::to_string(l) + "." + part;
}

struct Shape {
  std::string name;
  int rows;
  int cols;
  enum Init { kWeight, kZero, kOne } init;
};

std::vector<Shape> encoder_shapes(const EncoderConfig& c) {
  std::vector<Shape> s = {
      {"emb.token", c.vocab_size, c.width, Shape::kWeight},
      {"emb.segment", c.segments, c.width, Shape::kWeight},
      {"emb.position", c.max_length, c.width, Shape::kWeight},
  };
  for (int l = 0; l < c.layers; ++l) {
    for (const char* p : {"attn.q", "attn.k", "attn.v", "attn.o"}) {
      s.push_back({layer_name(l, p) + ".w", c.width, c.width, Shape::kWeight});
      s.push_back({layer_name(l, p) + ".b", 1, c.width, Shape::kZero});
    }
    s.push_back({layer_name(l, "attn_norm.gain"), 1, c.width, Shape::kOne});
    s.push_back({layer_name(l, "attn_norm.bias"), 1, c.width, Shape::kZero});
    s.push_back({layer_name(l, "ffn.in.w"), c.width, c.ffn, Shape::kWeight});
    s.push_back({layer_name(l, "ffn.in.b"), 1, c.ffn, Shape::kZero});
    s.push_back({layer_name(l, "ffn.out.w"), c.ffn, c.width, Shape::kWeight});
    s.push_back({layer_name(l, "ffn.out.b"), 1, c.width, Shape::kZero});
    s.push_back({layer_name(l, "ffn_norm.gain"), 1, c.width, Shape::kOne});
    s.push_back({layer_name(l, "ffn_norm.bias"), 1, c.width, Shape::kZero});
  }
  return s;
}

}  // namespace

void EncoderConfig::validate() const {
  if (layers < 0) throw ConfigError("layers must be non-negative");
  if (width <= 0 || heads <= 0 || ffn <= 0 || max_length <= 0 || segments <= 0)
    throw ConfigError("encoder sizes must be positive");
  if (width % heads != 0)
    throw ConfigError("width " + std::to_string(width) +
                      " is not divisible by heads " + std::to_string(heads));
  if (vocab_size <= Vocab::kNumReserved)
    throw ConfigError("vocab_size must exceed the reserved tokens");
  if (!(init_stddev > 0.0)) throw ConfigError("init_stddev must be positive");
}

nlohmann::json EncoderConfig::to_json() const {
  return {{"layers", layers},         {"width", width},
          {"heads", heads},           {"ffn", ffn},
          {"vocab_size", vocab_size}, {"max_length", max_length},
          {"segments", segments},     {"init_stddev", init_stddev}};
}

EncoderConfig EncoderConfig::from_json(const nlohmann::json& j) {
  EncoderConfig c;
  c.layers = j.at("layers").get<int>();
  c.width = j.at("width").get<int>();
  c.heads = j.at("heads").get<int>();
  c.ffn = j.at("ffn").get<int>();
  c.vocab_size = j.at("vocab_size").get<int>();
  c.max_length = j.at("max_length").get<int>();
  c.segments = j.at("segments").get<int>();
  c.init_stddev = j.at("init_stddev").get<double>();
  return c;
}

void init_encoder(const EncoderConfig& config, ModelParams& params, Rng& rng) {
  config.validate();
  for (const Shape& s : encoder_shapes(config)) {
    Matrix& t = params.add(s.name, s.rows, s.cols);
    switch (s.init) {
      case Shape::kWeight:
        for (Eigen::Index c = 0; c < t.cols(); ++c)
          for (Eigen::Index r = 0; r < t.rows(); ++r)
            t(r, c) = rng.truncated_normal(config.init_stddev);
        break;
      case Shape::kOne:
        t.setOnes();
        break;
      case Shape::kZero:
        break;
    }
  }
  params.round_to_storage();
}

void check_encoder_params(const EncoderConfig& config, const ModelParams& params) {
  for (const Shape& s : encoder_shapes(config)) {
    if (!params.contains(s.name))
      throw ShapeError("missing encoder parameter '" + s.name + "'");
    const Matrix& t = params.at(s.name);
    if (t.rows() != s.rows || t.cols() != s.cols)
      throw ShapeError("parameter '" + s.name + "' is " +
                       std::to_string(t.rows()) + "x" + std::to_string(t.cols()) +
                       ", expected " + std::to_string(s.rows) + "x" +
                       std::to_string(s.cols));
  }
}

Var embed(Tape& tape, const EncoderConfig& config, const std::vector<int>& ids,
          const std::vector<int>& segments) {
  if (ids.size() != segments.size())
    throw ShapeError("ids and segment ids differ in length");
  if (static_cast<int>(ids.size()) > config.max_length)
    throw ShapeError("sequence of " + std::to_string(ids.size()) +
                     " pieces exceeds the position table of " +
                     std::to_string(config.max_length));
  std::vector<int> positions(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) positions[i] = static_cast<int>(i);
  Var tok = ops::gather_rows(tape.param("emb.token"), ids);
  Var seg = ops::gather_rows(tape.param("emb.segment"), segments);
  Var pos = ops::gather_rows(tape.param("emb.position"), positions);
  return ops::add(ops::add(tok, seg), pos);
}

Var encode_sequence(Tape& tape, const EncoderConfig& config,
                    const std::vector<int>& ids, const std::vector<int>& segments) {
  if (tape.params() == nullptr) throw ShapeError("tape has no parameter store");
  Var x = embed(tape, config, ids, segments);
  std::vector<bool> valid(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) valid[i] = ids[i] != Vocab::kPad;
  auto p = [&](int l, const char* part) { return tape.param(layer_name(l, part)); };
  for (int l = 0; l < config.layers; ++l) {
    Var q = ops::linear(x, p(l, "attn.q.w"), p(l, "attn.q.b"));
    Var k = ops::linear(x, p(l, "attn.k.w"), p(l, "attn.k.b"));
    Var v = ops::linear(x, p(l, "attn.v.w"), p(l, "attn.v.b"));
    Var a = ops::attention(q, k, v, config.heads, valid);
    Var o = ops::linear(a, p(l, "attn.o.w"), p(l, "attn.o.b"));
    Var h = ops::layer_norm(ops::add(x, o), p(l, "attn_norm.gain"),
                            p(l, "attn_norm.bias"));
    Var f = ops::gelu(ops::linear(h, p(l, "ffn.in.w"), p(l, "ffn.in.b")));
    f = ops::linear(f, p(l, "ffn.out.w"), p(l, "ffn.out.b"));
    x = ops::layer_norm(ops::add(h, f), p(l, "ffn_norm.gain"),
                        p(l, "ffn_norm.bias"));
  }
  return x;
}

std::vector<Var> forward(Tape& tape, const EncoderConfig& config,
                         std::vector<std::vector<int>> ids,
                         std::vector<std::vector<int>> segments) {
  if (ids.size() != segments.size())
    throw ShapeError("batch ids and segments differ in size");
  size_t longest = 0;
  for (const auto& s : ids) longest = std::max(longest, s.size());
  std::vector<Var> out;
  for (size_t b = 0; b < ids.size(); ++b) {
    if (ids[b].size() != segments[b].size())
      throw ShapeError("ids and segment ids differ in length");
    ids[b].resize(longest, Vocab::kPad);
    segments[b].resize(longest, 0);
    out.push_back(encode_sequence(tape, config, ids[b], segments[b]));
  }
  return out;
}

GradientSet backward(Tape& tape, const ModelParams& params,
                     const std::vector<Var>& outputs,
                     const std::vector<Matrix>& upstream) {
  if (tape.params() != &params)
    throw ShapeError("tape was recorded against a different parameter store");
  if (outputs.size() != upstream.size())
    throw ShapeError("one upstream gradient per output is required");
  std::vector<std::pair<Var, Matrix>> seeds;
  for (size_t i = 0; i < outputs.size(); ++i)
    seeds.emplace_back(outputs[i], upstream[i]);
  tape.backward(seeds);
  return tape.parameter_gradients();
}

namespace {

void check_gradients(const ModelParams& params, const GradientSet& grads) {
  for (const auto& [name, g] : grads) {
    const Matrix& p = params.at(name);
    if (g.rows() != p.rows() || g.cols() != p.cols())
      throw ShapeError("gradient for '" + name + "' has the wrong shape");
    if (!g.allFinite())
      throw NumericError("non-finite gradient for parameter '" + name + "'");
  }
}

}  // namespace

void adam_step(ModelParams& params, const GradientSet& grads, AdamState& state,
               const AdamConfig& config) {
  check_gradients(params, grads);
  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (const auto& [name, g] : grads) {
    Matrix& p = params.at(name);
    auto [mi, fresh_m] = state.m.try_emplace(name, Matrix::Zero(p.rows(), p.cols()));
    auto [vi, fresh_v] = state.v.try_emplace(name, Matrix::Zero(p.rows(), p.cols()));
    Matrix& m = mi->second;
    Matrix& v = vi->second;
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g.cwiseProduct(g);
    p.array() -= config.learning_rate * (m.array() / c1) /
                 ((v.array() / c2).sqrt() + config.epsilon);
  }
}

void sgd_step(ModelParams& params, const GradientSet& grads,
              double learning_rate) {
  check_gradients(params, grads);
  for (const auto& [name, g] : grads) params.at(name) -= learning_rate * g;
}

namespace {

constexpr std::string_view kMagic = "LMTCKPT1\n";

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

uint64_t get_u64(std::string_view in) {
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i)
    v = (v << 8) | static_cast<unsigned char>(in[static_cast<size_t>(i)]);
  return v;
}

void put_f32(std::string& out, float f) {
  uint32_t bits;
  std::memcpy(&bits, &f, 4);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

float get_f32(const char* in) {
  uint32_t bits = 0;
  for (int i = 3; i >= 0; --i) bits = (bits << 8) | static_cast<unsigned char>(in[i]);
  float f;
  std::memcpy(&f, &bits, 4);
  return f;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  nlohmann::json index = nlohmann::json::array();
  uint64_t offset = 0;
  for (const auto& [name, t] : checkpoint.params.tensors()) {
    index.push_back({{"name", name},
                     {"rows", t.rows()},
                     {"cols", t.cols()},
                     {"offset", offset}});
    offset += static_cast<uint64_t>(t.size());
  }
  const std::string header =
      nlohmann::json{{"meta", checkpoint.meta}, {"tensors", index}}.dump();
  std::string out(kMagic);
  put_u64(out, header.size());
  out += header;
  out.reserve(out.size() + 4 * offset);
  for (const auto& [name, t] : checkpoint.params.tensors())
    for (Eigen::Index r = 0; r < t.rows(); ++r)
      for (Eigen::Index c = 0; c < t.cols(); ++c)
        put_f32(out, static_cast<float>(t(r, c)));
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagic.size() + 8 || bytes.substr(0, kMagic.size()) != kMagic)
    throw FormatError("not a checkpoint file (bad magic)");
  const uint64_t header_len = get_u64(bytes.substr(kMagic.size(), 8));
  const size_t data_start = kMagic.size() + 8 + header_len;
  if (header_len > bytes.size() || data_start > bytes.size())
    throw FormatError("checkpoint header exceeds file size");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(bytes.substr(kMagic.size() + 8, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint header: ") + e.what());
  }
  Checkpoint ck;
  ck.meta = header.value("meta", nlohmann::json::object());
  const size_t floats = (bytes.size() - data_start) / 4;
  for (const auto& entry : header.at("tensors")) {
    const auto name = entry.at("name").get<std::string>();
    const int rows = entry.at("rows").get<int>();
    const int cols = entry.at("cols").get<int>();
    const auto offset = entry.at("offset").get<uint64_t>();
    if (offset + static_cast<uint64_t>(rows) * cols > floats)
      throw FormatError("tensor '" + name + "' runs past the end of the file");
    Matrix& t = ck.params.add(name, rows, cols);
    const char* p = bytes.data() + data_start + 4 * offset;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c, p += 4) t(r, c) = get_f32(p);
  }
  return ck;
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint) {
  write_file(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::string& path) {
  return parse_checkpoint(read_file(path));
}

}  // namespace lingmt
