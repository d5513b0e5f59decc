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

#include "lingmt/config.h"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>

#include "lingmt/common.h"

namespace lingmt {

namespace {

struct Field {
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double d = std::stod(v, &used);
    if (used == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
}

long parse_long(const std::string& key, const std::string& v) {
  long out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
  return out;
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size())
    throw ConfigError("key '" + key + "' expects an unsigned integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("key '" + key + "' expects true or false, got '" + v + "'");
}

#define STR_FIELD(name, member)                                             \
  {name, {[](const RunConfig& c) { return c.member; },                      \
          [](RunConfig& c, const std::string& v) { c.member = v; }}}
#define DBL_FIELD(name, member)                                                     \
  {name, {[](const RunConfig& c) { return format_double(c.member); },              \
          [](RunConfig& c, const std::string& v) { c.member = parse_double(name, v); }}}
#define INT_FIELD(name, member)                                                       \
  {name, {[](const RunConfig& c) { return std::to_string(c.member); },               \
          [](RunConfig& c, const std::string& v) {                                    \
            c.member = static_cast<decltype(c.member)>(parse_long(name, v));          \
          }}}
#define BOOL_FIELD(name, member)                                                    \
  {name, {[](const RunConfig& c) { return std::string(c.member ? "true" : "false"); }, \
          [](RunConfig& c, const std::string& v) { c.member = parse_bool(name, v); }}}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> kFields = {
      {"seed", {[](const RunConfig& c) { return std::to_string(c.seed); },
                [](RunConfig& c, const std::string& v) { c.seed = parse_u64("seed", v); }}},
      STR_FIELD("gold_ptb", gold_ptb),
      STR_FIELD("gold_conll05", gold_conll05),
      STR_FIELD("gold_conll09", gold_conll09),
      STR_FIELD("raw_text", raw_text),
      STR_FIELD("silver", silver),
      STR_FIELD("vocab", vocab),
      STR_FIELD("out_dir", out_dir),
      STR_FIELD("punctuation", punctuation),
      DBL_FIELD("gold_probability", gold_probability),
      DBL_FIELD("mask_rate", mask.mask_rate),
      DBL_FIELD("mask_probability", mask.mask_probability),
      DBL_FIELD("random_probability", mask.random_probability),
      DBL_FIELD("keep_probability", mask.keep_probability),
      DBL_FIELD("weight_syn_phrase", mask.strategy_weights[0]),
      DBL_FIELD("weight_sem_phrase", mask.strategy_weights[1]),
      DBL_FIELD("weight_whole_word", mask.strategy_weights[2]),
      INT_FIELD("max_phrase_width", mask.max_phrase_width),
      INT_FIELD("layers", encoder.layers),
      INT_FIELD("width", encoder.width),
      INT_FIELD("heads", encoder.heads),
      INT_FIELD("ffn", encoder.ffn),
      INT_FIELD("vocab_size", encoder.vocab_size),
      INT_FIELD("max_length", encoder.max_length),
      DBL_FIELD("init_stddev", encoder.init_stddev),
      INT_FIELD("arc_dim", heads.arc_dim),
      INT_FIELD("rel_dim", heads.rel_dim),
      INT_FIELD("span_dim", heads.span_dim),
      INT_FIELD("span_hidden", heads.span_hidden),
      INT_FIELD("srl_dim", heads.srl_dim),
      INT_FIELD("span_width_cap", heads.span_width_cap),
      INT_FIELD("joint_length_cap", heads.joint_length_cap),
      DBL_FIELD("learning_rate", adam.learning_rate),
      DBL_FIELD("beta1", adam.beta1),
      DBL_FIELD("beta2", adam.beta2),
      DBL_FIELD("adam_epsilon", adam.epsilon),
      INT_FIELD("batch_size", batch_size),
      INT_FIELD("steps", steps),
      DBL_FIELD("lambda", lambda),
      BOOL_FIELD("mlm", tasks.mlm),
      BOOL_FIELD("nsp", tasks.nsp),
      BOOL_FIELD("electra", tasks.electra),
      BOOL_FIELD("pos", tasks.pos),
      BOOL_FIELD("constituent", tasks.constituent),
      BOOL_FIELD("dependency", tasks.dependency),
      BOOL_FIELD("srl_span", tasks.srl_span),
      BOOL_FIELD("srl_dep", tasks.srl_dep),
      INT_FIELD("checkpoint_every", checkpoint_every),
      INT_FIELD("keep_checkpoints", keep_checkpoints),
  };
  return kFields;
}

#undef STR_FIELD
#undef DBL_FIELD
#undef INT_FIELD
#undef BOOL_FIELD

}  // namespace

RunConfig::RunConfig() { encoder.vocab_size = 8000; }

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown configuration key '" + key + "'");
  it->second.set(*this, value);
}

std::string RunConfig::get(const std::string& key) const {
  auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError("unknown configuration key '" + key + "'");
  return it->second.get(*this);
}

std::vector<std::string> RunConfig::keys() {
  std::vector<std::string> out;
  for (const auto& [k, f] : fields()) out.push_back(k);
  return out;
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& [k, f] : fields()) out += k + " = " + f.get(*this) + "\n";
  return out;
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig c;
  long line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    try {
      c.set(key, value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) { return parse(read_file(path)); }

void RunConfig::validate() const {
  if (gold_probability < 0.0 || gold_probability > 1.0)
    throw ConfigError("gold_probability must lie in [0, 1]");
  mask.validate();
  EncoderConfig e = encoder;
  e.validate();
  heads.validate();
  if (adam.learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
  if (adam.beta1 < 0.0 || adam.beta1 >= 1.0 || adam.beta2 < 0.0 || adam.beta2 >= 1.0)
    throw ConfigError("Adam betas must lie in [0, 1)");
  if (adam.epsilon <= 0.0) throw ConfigError("adam_epsilon must be positive");
  if (batch_size <= 0) throw ConfigError("batch_size must be positive");
  if (steps <= 0) throw ConfigError("steps must be positive");
  if (lambda < 0.0) throw ConfigError("lambda must be nonnegative");
  if (tasks.electra && !tasks.mlm) throw ConfigError("electra requires mlm");
  if (checkpoint_every <= 0) throw ConfigError("checkpoint_every must be positive");
  if (keep_checkpoints <= 0) throw ConfigError("keep_checkpoints must be positive");
}

}  // namespace lingmt
