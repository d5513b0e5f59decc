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

// Flat key = value run configuration. Lines starting with '#' are comments.
// Every key has a default; serialize() writes all keys in sorted order so
// parse(serialize(c)) == c.

#ifndef LINGMT_CONFIG_H_
#define LINGMT_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lingmt/encoder.h"
#include "lingmt/heads.h"
#include "lingmt/masking.h"

namespace lingmt {

struct RunConfig {
  uint64_t seed = 1;
  std::string gold_ptb;
  std::string gold_conll05;
  std::string gold_conll09;
  std::string raw_text;
  std::string silver;
  std::string vocab;  // Empty: build from the corpus.
  std::string out_dir = "out";
  double gold_probability = 0.10;
  MaskPolicy mask;
  EncoderConfig encoder;  // vocab_size is the build target.
  HeadConfig heads;
  AdamConfig adam;
  int batch_size = 32;
  long steps = 1000;
  double lambda = 50.0;
  TaskToggles tasks;
  long checkpoint_every = 500;
  int keep_checkpoints = 3;
  std::string punctuation = "`` '' : , .";

  RunConfig();

  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::string& path);
  // Throws ConfigError for unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;
  std::string serialize() const;
  // Range checks across fields; throws ConfigError.
  void validate() const;
  static std::vector<std::string> keys();

  bool operator==(const RunConfig& other) const { return serialize() == other.serialize(); }
};

}  // namespace lingmt

#endif  // LINGMT_CONFIG_H_
