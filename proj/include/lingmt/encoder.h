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

// Small post-norm transformer encoder over the autograd tape, Adam/SGD, and
// the binary checkpoint container.

#ifndef LINGMT_ENCODER_H_
#define LINGMT_ENCODER_H_

#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "lingmt/autograd.h"
#include "lingmt/common.h"

namespace lingmt {

struct EncoderConfig {
  int layers = 2;
  int width = 64;
  int heads = 4;
  int ffn = 256;
  int vocab_size = 0;
  int max_length = 128;
  int segments = 2;
  double init_stddev = 0.02;

  // Throws ConfigError on non-positive sizes or width % heads != 0.
  void validate() const;
  nlohmann::json to_json() const;
  static EncoderConfig from_json(const nlohmann::json& j);
  bool operator==(const EncoderConfig&) const = default;
};

// Adds every encoder tensor to `params` with truncated-normal weights, zero
// biases and unit layer-norm gains.
void init_encoder(const EncoderConfig& config, ModelParams& params, Rng& rng);

// Throws ShapeError unless every encoder tensor exists with the expected
// shape.
void check_encoder_params(const EncoderConfig& config, const ModelParams& params);

// E_tok[id_i] + E_seg[seg_i] + E_pos[i].
Var embed(Tape& tape, const EncoderConfig& config, const std::vector<int>& ids,
          const std::vector<int>& segments);

// Hidden states of one sequence; [PAD] keys are masked out of attention.
Var encode_sequence(Tape& tape, const EncoderConfig& config,
                    const std::vector<int>& ids, const std::vector<int>& segments);

// Pads every sequence with [PAD] (segment 0) to the longest length, then
// encodes each one. Output i has the padded length.
std::vector<Var> forward(Tape& tape, const EncoderConfig& config,
                         std::vector<std::vector<int>> ids,
                         std::vector<std::vector<int>> segments);

// Seeds `upstream` into `outputs` and returns gradients for every parameter
// of `params`. Throws ShapeError when the tape was built on another store.
GradientSet backward(Tape& tape, const ModelParams& params,
                     const std::vector<Var>& outputs,
                     const std::vector<Matrix>& upstream);

struct AdamConfig {
  double learning_rate = 3e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  long step = 0;
  std::map<std::string, Matrix> m;
  std::map<std::string, Matrix> v;
};

// Throws NumericError naming the first parameter with a non-finite gradient;
// parameters are left untouched in that case.
void adam_step(ModelParams& params, const GradientSet& grads, AdamState& state,
               const AdamConfig& config);
void sgd_step(ModelParams& params, const GradientSet& grads,
              double learning_rate);

// File layout: the 9 bytes "LMTCKPT1\n", a little-endian uint64 header
// length, a JSON header of that many bytes, then the float32 little-endian
// row-major data of every tensor in header order. The header holds
// {"meta": ..., "tensors": [{"name", "rows", "cols", "offset"}]} with
// offsets in floats from the start of the data block.
struct Checkpoint {
  nlohmann::json meta;
  ModelParams params;
};

std::string serialize_checkpoint(const Checkpoint& checkpoint);
Checkpoint parse_checkpoint(std::string_view bytes);
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lingmt

#endif  // LINGMT_ENCODER_H_
