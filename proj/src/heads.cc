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

#include "lingmt/heads.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "lingmt/common.h"

namespace lingmt {

using ops::combine;

LabelInventory::LabelInventory(std::vector<std::string> labels) {
  for (auto& l : labels) add(l);
}

int LabelInventory::add(const std::string& label) {
  auto [it, inserted] = index_.emplace(label, size());
  if (inserted) labels_.push_back(label);
  return it->second;
}

std::optional<int> LabelInventory::find(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int LabelInventory::require(const std::string& label, const char* what) const {
  auto i = find(label);
  if (!i) throw ConfigError(std::string("unknown ") + what + " label '" + label + "'");
  return *i;
}

Inventories Inventories::from_corpus(const std::vector<AnnotatedSentence>& corpus) {
  std::set<std::string> pos, cons, rel, span_role, dep_role;
  for (const auto& s : corpus) {
    if (s.pos_tags) pos.insert(s.pos_tags->begin(), s.pos_tags->end());
    if (s.tree)
      for (const auto& l : collapsed_labels(*s.tree)) cons.insert(l);
    if (s.dep_labels) rel.insert(s.dep_labels->begin(), s.dep_labels->end());
    if (s.span_frames)
      for (const auto& f : *s.span_frames)
        for (const auto& a : f.arguments) span_role.insert(a.role);
    if (s.dep_frames)
      for (const auto& f : *s.dep_frames)
        for (const auto& a : f.arguments) dep_role.insert(a.role);
  }
  auto with_empty = [](const std::set<std::string>& s) {
    std::vector<std::string> v = {""};
    for (const auto& x : s)
      if (!x.empty()) v.push_back(x);
    return LabelInventory(v);
  };
  Inventories inv;
  inv.pos = LabelInventory({pos.begin(), pos.end()});
  inv.constituent = with_empty(cons);
  inv.relation = LabelInventory({rel.begin(), rel.end()});
  inv.span_role = with_empty(span_role);
  inv.dep_role = with_empty(dep_role);
  return inv;
}

nlohmann::json Inventories::to_json() const {
  return {{"pos", pos.labels()},
          {"constituent", constituent.labels()},
          {"relation", relation.labels()},
          {"span_role", span_role.labels()},
          {"dep_role", dep_role.labels()}};
}

Inventories Inventories::from_json(const nlohmann::json& j) {
  Inventories inv;
  auto get = [&](const char* key) {
    return LabelInventory(j.at(key).get<std::vector<std::string>>());
  };
  inv.pos = get("pos");
  inv.constituent = get("constituent");
  inv.relation = get("relation");
  inv.span_role = get("span_role");
  inv.dep_role = get("dep_role");
  return inv;
}

void HeadConfig::validate() const {
  if (arc_dim <= 0 || rel_dim <= 0 || span_dim <= 0 || span_hidden <= 0 || srl_dim <= 0)
    throw ConfigError("head widths must be positive");
  if (srl_dim % 2 != 0 || span_dim % 2 != 0)
    throw ConfigError("span_dim and srl_dim must be even");
  if (span_width_cap < 1 || joint_length_cap < 1)
    throw ConfigError("span_width_cap and joint_length_cap must be positive");
}

nlohmann::json HeadConfig::to_json() const {
  return {{"arc_dim", arc_dim},         {"rel_dim", rel_dim},
          {"span_dim", span_dim},       {"span_hidden", span_hidden},
          {"srl_dim", srl_dim},         {"span_width_cap", span_width_cap},
          {"joint_length_cap", joint_length_cap}};
}

HeadConfig HeadConfig::from_json(const nlohmann::json& j) {
  HeadConfig c;
  c.arc_dim = j.at("arc_dim").get<int>();
  c.rel_dim = j.at("rel_dim").get<int>();
  c.span_dim = j.at("span_dim").get<int>();
  c.span_hidden = j.at("span_hidden").get<int>();
  c.srl_dim = j.at("srl_dim").get<int>();
  c.span_width_cap = j.at("span_width_cap").get<int>();
  c.joint_length_cap = j.at("joint_length_cap").get<int>();
  return c;
}

namespace {

struct HeadShape {
  std::string name;
  int rows;
  int cols;
  bool weight;
};

std::vector<HeadShape> head_shapes(const EncoderConfig& e, const HeadConfig& h,
                                   const Inventories& inv) {
  const int d = e.width;
  std::vector<HeadShape> s;
  auto dense = [&](const std::string& name, int in, int out) {
    s.push_back({name + ".w", in, out, true});
    s.push_back({name + ".b", 1, out, false});
  };
  dense("gen.transform", d, d);
  s.push_back({"gen.norm.gain", 1, d, false});
  s.push_back({"gen.norm.bias", 1, d, false});
  s.push_back({"gen.out.bias", 1, e.vocab_size, false});
  dense("nsp.pool", d, d);
  dense("nsp.out", d, 1);
  dense("disc.hidden", d, d);
  dense("disc.out", d, 1);
  dense("pos.out", d, std::max(1, inv.pos.size()));
  dense("arc.dep", d, h.arc_dim);
  dense("arc.head", d, h.arc_dim);
  s.push_back({"arc.u", h.arc_dim, h.arc_dim, true});
  s.push_back({"arc.head_bias", h.arc_dim, 1, true});
  const int rels = std::max(1, inv.relation.size());
  dense("rel.dep", d, h.rel_dim);
  dense("rel.head", d, h.rel_dim);
  s.push_back({"rel.u", h.rel_dim, rels * h.rel_dim, true});
  s.push_back({"rel.b", 1, rels, false});
  dense("span.proj", d, h.span_dim);
  dense("span.hidden", h.span_dim, h.span_hidden);
  dense("span.out", h.span_hidden, std::max(1, inv.constituent.size()));
  for (const auto& [prefix, roles] :
       {std::pair<std::string, int>{"srl_span", inv.span_role.size()},
        std::pair<std::string, int>{"srl_dep", inv.dep_role.size()}}) {
    const int r = std::max(1, roles);
    dense(prefix + ".pred_hidden", d, h.srl_dim);
    dense(prefix + ".pred_out", h.srl_dim, 1);
    dense(prefix + ".pred_proj", d, h.srl_dim);
    dense(prefix + ".unit_proj", d, h.srl_dim);
    s.push_back({prefix + ".u", h.srl_dim, r * h.srl_dim, true});
    s.push_back({prefix + ".unit_lin", h.srl_dim, r, true});
    s.push_back({prefix + ".b", 1, r, false});
  }
  return s;
}

}  // namespace

void init_heads(const EncoderConfig& encoder, const HeadConfig& heads,
                const Inventories& labels, ModelParams& params, Rng& rng) {
  heads.validate();
  for (const auto& s : head_shapes(encoder, heads, labels)) {
    Matrix& t = params.add(s.name, s.rows, s.cols);
    if (s.name == "gen.norm.gain") t.setOnes();
    if (!s.weight) continue;
    for (Eigen::Index c = 0; c < t.cols(); ++c)
      for (Eigen::Index r = 0; r < t.rows(); ++r)
        t(r, c) = rng.truncated_normal(encoder.init_stddev);
  }
  params.round_to_storage();
}

Model init_model(const EncoderConfig& encoder, const HeadConfig& heads,
                 const Inventories& labels, uint64_t vocab_hash, Rng& rng) {
  Model m;
  m.encoder = encoder;
  m.heads = heads;
  m.labels = labels;
  m.vocab_hash = vocab_hash;
  init_encoder(encoder, m.params, rng);
  init_heads(encoder, heads, labels, m.params, rng);
  return m;
}

Checkpoint to_checkpoint(const Model& model, const nlohmann::json& extra) {
  Checkpoint ck;
  ck.meta = {{"encoder", model.encoder.to_json()},
             {"heads", model.heads.to_json()},
             {"labels", model.labels.to_json()},
             {"vocab_hash", hex64(model.vocab_hash)}};
  if (extra.is_object())
    for (const auto& [k, v] : extra.items()) ck.meta[k] = v;
  ck.params = model.params;
  return ck;
}

Model from_checkpoint(const Checkpoint& checkpoint) {
  Model m;
  try {
    m.encoder = EncoderConfig::from_json(checkpoint.meta.at("encoder"));
    m.heads = HeadConfig::from_json(checkpoint.meta.at("heads"));
    m.labels = Inventories::from_json(checkpoint.meta.at("labels"));
    m.vocab_hash = std::stoull(checkpoint.meta.at("vocab_hash").get<std::string>(), nullptr, 16);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what());
  }
  m.params = checkpoint.params;
  check_encoder_params(m.encoder, m.params);
  for (const auto& s : head_shapes(m.encoder, m.heads, m.labels)) {
    if (!m.params.contains(s.name)) throw ShapeError("checkpoint lacks '" + s.name + "'");
    const Matrix& t = m.params.at(s.name);
    if (t.rows() != s.rows || t.cols() != s.cols)
      throw ShapeError("checkpoint tensor '" + s.name + "' has the wrong shape");
  }
  return m;
}

SentenceTargets make_targets(const AnnotatedSentence& sentence,
                             const Inventories& labels, const HeadConfig& config) {
  sentence.validate();
  SentenceTargets t;
  t.n = sentence.size();
  if (sentence.pos_tags) {
    t.pos.emplace();
    for (const auto& tag : *sentence.pos_tags) t.pos->push_back(labels.pos.require(tag, "POS"));
  }
  if (sentence.dep_heads && sentence.dep_labels) {
    t.heads = *sentence.dep_heads;
    t.relations.emplace();
    for (const auto& r : *sentence.dep_labels)
      t.relations->push_back(labels.relation.require(r, "dependency relation"));
  }
  if (sentence.tree && sentence.dep_heads) {
    if (t.n > config.joint_length_cap) {
      t.joint_excluded = "longer than the joint length cap";
    } else {
      std::string reason;
      t.joint = gold_joint_tree(*sentence.tree, *sentence.dep_heads,
                                labels.constituent.labels(), &reason);
      if (!t.joint) t.joint_excluded = reason;
    }
  }
  if (sentence.span_frames) {
    t.span_frames.emplace();
    for (const auto& f : *sentence.span_frames) {
      SpanFrameTarget ft{f.predicate, {}};
      for (const auto& a : f.arguments) {
        const int role = labels.span_role.require(a.role, "span role");
        if (a.end - a.start + 1 > config.span_width_cap) {
          ++t.skipped_arguments;
          continue;
        }
        ft.arguments.emplace_back(a.start, a.end, role);
      }
      t.span_frames->push_back(std::move(ft));
    }
  }
  if (sentence.dep_frames) {
    t.dep_frames.emplace();
    for (const auto& f : *sentence.dep_frames) {
      DepFrameTarget ft{f.predicate, {}};
      for (const auto& a : f.arguments)
        ft.arguments.emplace_back(a.word, labels.dep_role.require(a.role, "dependency role"));
      t.dep_frames->push_back(std::move(ft));
    }
  }
  return t;
}

Var word_vectors(Var x, const std::vector<int>& word_last_piece) {
  return ops::gather_rows(x, word_last_piece);
}

Var fence_rows(Var x, const TokenSequence& seq) {
  std::vector<int> rows = {0};
  rows.insert(rows.end(), seq.word_last_piece.begin(), seq.word_last_piece.end());
  rows.push_back(seq.first_sep);
  return ops::gather_rows(x, rows);
}

nlohmann::json TrainingLosses::to_json(long step) const {
  nlohmann::json j = {{"step", step}, {"J_G", J_G},   {"J_D", J_D}, {"J_lm", J_lm},
                      {"J_1", J_1},   {"J_2", J_2},   {"J_3", J_3}, {"J_4", J_4},
                      {"J_lt", J_lt}, {"J_overall", J_overall},     {"lambda", lambda}};
  if (!flags.empty()) j["flags"] = flags;
  return j;
}

TrainingLosses total_loss(const LossComponents& c, double lambda) {
  const std::pair<const char*, double> parts[] = {{"J_G", c.J_G}, {"J_D", c.J_D},
                                                  {"J_1", c.J_1}, {"J_2", c.J_2},
                                                  {"J_3", c.J_3}, {"J_4", c.J_4}};
  for (const auto& [name, v] : parts) {
    if (!std::isfinite(v)) throw NumericError(std::string("loss component ") + name + " is not finite");
    if (v < 0.0) throw NumericError(std::string("loss component ") + name + " is negative");
  }
  if (!std::isfinite(lambda) || lambda < 0.0) throw NumericError("lambda must be finite and nonnegative");
  TrainingLosses t;
  t.J_G = c.J_G;
  t.J_D = c.J_D;
  t.J_1 = c.J_1;
  t.J_2 = c.J_2;
  t.J_3 = c.J_3;
  t.J_4 = c.J_4;
  t.lambda = lambda;
  t.J_lm = c.J_G + lambda * c.J_D;
  t.J_lt = c.J_1 + c.J_2 + c.J_3 + c.J_4;
  t.J_overall = t.J_lm + t.J_lt;
  return t;
}

namespace {

Var dense(Tape& tape, Var x, const std::string& name) {
  return ops::linear(x, tape.param(name + ".w"), tape.param(name + ".b"));
}

int argmax_row(const Matrix& m, Eigen::Index row, int begin = 0) {
  Eigen::Index best = begin;
  for (Eigen::Index c = begin + 1; c < m.cols(); ++c)
    if (m(row, c) > m(row, best)) best = c;
  return static_cast<int>(best);
}

Var zero(Tape& tape) { return tape.constant(Matrix::Zero(1, 1)); }

// Sum of the valid scalars, or an invalid Var when there are none.
Var sum_valid(const std::vector<Var>& parts) {
  std::vector<Var> valid;
  for (const auto& p : parts)
    if (p.valid()) valid.push_back(p);
  if (valid.empty()) return {};
  if (valid.size() == 1) return valid[0];
  return combine(valid, std::vector<double>(valid.size(), 1.0));
}

}  // namespace

GeneratorOutput generator_loss(Tape& tape, const std::vector<Var>& states,
                               const std::vector<MaskedExample>& examples,
                               bool nsp_active) {
  if (states.size() != examples.size())
    throw ShapeError("generator_loss: one state matrix per example");
  GeneratorOutput out;
  out.predictions.resize(examples.size());
  std::vector<Var> rows;
  std::vector<int> targets;
  for (size_t b = 0; b < examples.size(); ++b) {
    const auto& ex = examples[b];
    if (ex.mask_positions.empty()) continue;
    rows.push_back(ops::gather_rows(states[b], ex.mask_positions));
    for (int p : ex.mask_positions) targets.push_back(ex.original_ids[static_cast<size_t>(p)]);
  }
  if (!rows.empty()) {
    Var h = ops::gelu(dense(tape, ops::concat_rows(rows), "gen.transform"));
    h = ops::layer_norm(h, tape.param("gen.norm.gain"), tape.param("gen.norm.bias"));
    Var logits = ops::add_row(ops::matmul_nt(h, tape.param("emb.token")),
                              tape.param("gen.out.bias"));
    out.token_loss = ops::softmax_cross_entropy(logits, targets, 1.0 / static_cast<double>(targets.size()));
    const Matrix& lv = logits.value();
    Eigen::Index row = 0;
    for (size_t b = 0; b < examples.size(); ++b) {
      for (size_t k = 0; k < examples[b].mask_positions.size(); ++k, ++row) {
        int best = -1;
        for (Eigen::Index c = 0; c < lv.cols(); ++c) {
          if (c == Vocab::kPad || c == Vocab::kCls || c == Vocab::kSep || c == Vocab::kMask)
            continue;
          if (best < 0 || lv(row, c) > lv(row, best)) best = static_cast<int>(c);
        }
        out.predictions[b].push_back(best);
      }
    }
  }
  if (nsp_active) {
    std::vector<Var> cls;
    std::vector<double> labels;
    for (size_t b = 0; b < examples.size(); ++b) {
      if (!examples[b].nsp_label) continue;
      cls.push_back(ops::gather_rows(states[b], {0}));
      labels.push_back(*examples[b].nsp_label ? 1.0 : 0.0);
    }
    if (!cls.empty()) {
      Var pooled = ops::tanh(dense(tape, ops::concat_rows(cls), "nsp.pool"));
      Var logit = dense(tape, pooled, "nsp.out");
      out.nsp_loss = ops::sigmoid_cross_entropy(logit, labels, std::vector<double>(labels.size(), 1.0),
                                                1.0 / static_cast<double>(labels.size()));
    }
  }
  out.loss = sum_valid({out.token_loss, out.nsp_loss});
  return out;
}

DiscriminatorInput corrupt_for_discriminator(const MaskedExample& example,
                                             const std::vector<int>& predictions) {
  if (predictions.size() != example.mask_positions.size())
    throw ShapeError("one generator prediction per mask position is required");
  DiscriminatorInput in;
  in.ids = example.original_ids;
  for (size_t k = 0; k < predictions.size(); ++k) {
    const int p = predictions[k];
    if (p == Vocab::kMask || p < 0) throw InvariantError("generator predicted [MASK]");
    in.ids[static_cast<size_t>(example.mask_positions[k])] = p;
  }
  in.replaced.resize(in.ids.size());
  for (size_t i = 0; i < in.ids.size(); ++i) in.replaced[i] = in.ids[i] != example.original_ids[i];
  return in;
}

Var discriminator_logits(Tape& tape, Var states) {
  return dense(tape, ops::gelu(dense(tape, states, "disc.hidden")), "disc.out");
}

Var discriminator_loss(Tape& tape, const std::vector<Var>& states,
                       const std::vector<std::vector<int>>& original_ids,
                       const std::vector<DiscriminatorInput>& inputs) {
  if (states.size() != inputs.size() || states.size() != original_ids.size())
    throw ShapeError("discriminator_loss: batch sizes differ");
  long count = 0;
  for (const auto& ids : original_ids)
    for (int id : ids) count += (id == Vocab::kPad || id == Vocab::kCls || id == Vocab::kSep) ? 0 : 1;
  if (count == 0) return zero(tape);
  std::vector<Var> parts;
  for (size_t b = 0; b < states.size(); ++b) {
    const auto rows = static_cast<size_t>(states[b].rows());
    std::vector<double> y(rows, 0.0), w(rows, 0.0);
    for (size_t i = 0; i < original_ids[b].size() && i < rows; ++i) {
      const int id = original_ids[b][i];
      if (id == Vocab::kPad || id == Vocab::kCls || id == Vocab::kSep) continue;
      w[i] = 1.0;
      y[i] = inputs[b].replaced[i] ? 1.0 : 0.0;
    }
    parts.push_back(ops::sigmoid_cross_entropy(discriminator_logits(tape, states[b]), y, w,
                                               1.0 / static_cast<double>(count)));
  }
  return sum_valid(parts);
}

Var pos_scores(Tape& tape, Var words) { return dense(tape, words, "pos.out"); }

Var arc_scores(Tape& tape, Var words, Var root) {
  Var dep = ops::gelu(dense(tape, words, "arc.dep"));
  Var head = ops::gelu(dense(tape, ops::concat_rows({root, words}), "arc.head"));
  Var s = ops::matmul_nt(ops::matmul(dep, tape.param("arc.u")), head);
  Var bias = ops::transpose(ops::matmul(head, tape.param("arc.head_bias")));
  return ops::add_row(s, bias);
}

Var rel_scores(Tape& tape, Var words, Var root,
               const std::vector<std::pair<int, int>>& pairs) {
  Var dep = ops::gelu(dense(tape, words, "rel.dep"));
  Var head = ops::gelu(dense(tape, ops::concat_rows({root, words}), "rel.head"));
  const Var bias = tape.param("rel.b");
  const int labels = static_cast<int>(bias.cols());
  Var left = ops::matmul(dep, tape.param("rel.u"));
  return ops::add_row(ops::pair_block_dot(left, head, pairs, labels), bias);
}

Var span_label_scores(Tape& tape, Var fence, const std::vector<std::pair<int, int>>& spans) {
  Var f = ops::fence_spans(dense(tape, fence, "span.proj"), spans);
  return dense(tape, ops::gelu(dense(tape, f, "span.hidden")), "span.out");
}

namespace {

const char* style_prefix(SrlStyle style) {
  return style == SrlStyle::kSpan ? "srl_span" : "srl_dep";
}

}  // namespace

Var predicate_logits(Tape& tape, Var words, SrlStyle style) {
  const std::string p = style_prefix(style);
  return dense(tape, ops::gelu(dense(tape, words, p + ".pred_hidden")), p + ".pred_out");
}

Var role_scores(Tape& tape, Var words, Var fence, SrlStyle style,
                const std::vector<int>& predicates,
                const std::vector<std::pair<int, int>>& units) {
  const std::string p = style_prefix(style);
  Var unit;
  if (style == SrlStyle::kSpan) {
    unit = ops::gelu(ops::fence_spans(dense(tape, fence, p + ".unit_proj"), units));
  } else {
    std::vector<int> rows;
    for (const auto& [s, e] : units) {
      if (s != e) throw ShapeError("dependency-style units are single words");
      rows.push_back(s);
    }
    unit = ops::gather_rows(ops::gelu(dense(tape, words, p + ".unit_proj")), rows);
  }
  Var pred = ops::gelu(dense(tape, ops::gather_rows(words, predicates), p + ".pred_proj"));
  const Var bias = tape.param(p + ".b");
  const int roles = static_cast<int>(bias.cols());
  Var left = ops::matmul(pred, tape.param(p + ".u"));
  std::vector<std::pair<int, int>> pairs;
  std::vector<int> unit_rows;
  for (size_t k = 0; k < predicates.size(); ++k)
    for (size_t u = 0; u < units.size(); ++u) {
      pairs.emplace_back(static_cast<int>(k), static_cast<int>(u));
      unit_rows.push_back(static_cast<int>(u));
    }
  Var bilinear = ops::pair_block_dot(left, unit, pairs, roles);
  Var linear = ops::gather_rows(ops::matmul(unit, tape.param(p + ".unit_lin")), unit_rows);
  return ops::add_row(ops::add(bilinear, linear), bias);
}

std::vector<std::pair<int, int>> srl_units(int n, SrlStyle style, int width_cap) {
  std::vector<std::pair<int, int>> out;
  if (style == SrlStyle::kDependency) {
    for (int w = 0; w < n; ++w) out.emplace_back(w, w);
    return out;
  }
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n && j - i + 1 <= width_cap; ++j) out.emplace_back(i, j);
  return out;
}

SentenceStates sentence_states(Var x, const TokenSequence& seq) {
  SentenceStates s;
  s.words = word_vectors(x, seq.word_last_piece);
  s.fence = fence_rows(x, seq);
  s.root = ops::gather_rows(x, {0});
  s.n = static_cast<int>(seq.word_last_piece.size());
  return s;
}

namespace {

// Structured hinge for one sentence, scaled by `scale`; returns the hinge
// value through `value`.
Var joint_hinge(Var spans, Var arcs, const JointSpanTree& gold, int n, double scale,
                double* value) {
  const Matrix& sv = spans.value();
  const Matrix& av = arcs.value();
  std::vector<int> gold_label(static_cast<size_t>(span_count(n)), 0);
  for (const auto& x : gold.nodes) gold_label[static_cast<size_t>(span_index(x.start, x.end, n))] = x.label;
  Matrix augmented = (sv.array() + 1.0).matrix();
  for (size_t r = 0; r < gold_label.size(); ++r)
    augmented(static_cast<Eigen::Index>(r), gold_label[r]) -= 1.0;
  const JointSpanTree pred = joint_span_cky(augmented, av, nullptr, n);
  double cost = 0.0;
  for (const auto& x : pred.nodes)
    cost += x.label == gold_label[static_cast<size_t>(span_index(x.start, x.end, n))] ? 0.0 : 1.0;
  const double hinge = tree_score(pred, sv, av) + cost - tree_score(gold, sv, av);
  // Below 1e-9 the decode ties the gold structure and the difference is
  // summation rounding.
  if (hinge <= 1e-9) {
    *value = 0.0;
    return {};
  }
  *value = hinge;
  std::vector<std::tuple<int, int, double>> se, ae;
  for (const auto& x : pred.nodes) se.emplace_back(span_index(x.start, x.end, n), x.label, scale);
  for (const auto& x : gold.nodes) se.emplace_back(span_index(x.start, x.end, n), x.label, -scale);
  for (int d = 0; d < n; ++d) {
    ae.emplace_back(d, pred.dep_heads[static_cast<size_t>(d)], scale);
    ae.emplace_back(d, gold.dep_heads[static_cast<size_t>(d)], -scale);
  }
  return combine({ops::pick_sum(spans, se), ops::pick_sum(arcs, ae)}, {1.0, 1.0}, scale * cost);
}

// Normalizers: the predicate term averages over words, the role term sums
// over units and averages over gold predicates.
struct SrlCounts {
  long words = 0;
  long frames = 0;
};

void srl_style_losses(Tape& tape, const SentenceStates& st, SrlStyle style,
                      const std::vector<int>& predicates,
                      const std::vector<std::vector<std::pair<std::pair<int, int>, int>>>& args,
                      const std::vector<std::pair<int, int>>& units, const SrlCounts& totals,
                      std::vector<Var>& out) {
  std::vector<double> is_pred(static_cast<size_t>(st.n), 0.0);
  for (int p : predicates) is_pred[static_cast<size_t>(p)] = 1.0;
  out.push_back(ops::sigmoid_cross_entropy(predicate_logits(tape, st.words, style), is_pred,
                                           std::vector<double>(is_pred.size(), 1.0),
                                           1.0 / static_cast<double>(totals.words)));
  if (predicates.empty() || units.empty()) return;
  std::map<std::pair<int, int>, int> unit_index;
  for (size_t u = 0; u < units.size(); ++u) unit_index.emplace(units[u], static_cast<int>(u));
  std::vector<int> targets(predicates.size() * units.size(), 0);
  for (size_t k = 0; k < predicates.size(); ++k)
    for (const auto& [span, role] : args[k]) {
      auto it = unit_index.find(span);
      if (it != unit_index.end()) targets[k * units.size() + static_cast<size_t>(it->second)] = role;
    }
  Var scores = role_scores(tape, st.words, st.fence, style, predicates, units);
  out.push_back(ops::softmax_cross_entropy(scores, targets, 1.0 / static_cast<double>(totals.frames)));
}

}  // namespace

TaskLosses task_losses(Tape& tape, const Model& model,
                       const std::vector<SentenceStates>& states,
                       const std::vector<const SentenceTargets*>& targets,
                       const TaskToggles& toggles) {
  if (states.size() != targets.size()) throw ShapeError("task_losses: batch sizes differ");
  TaskLosses out;
  const int cap = model.heads.span_width_cap;
  long pos_words = 0, dep_words = 0, joint_sents = 0;
  SrlCounts span_tot, dep_tot;
  for (size_t b = 0; b < states.size(); ++b) {
    const SentenceTargets& t = *targets[b];
    if (t.n != states[b].n) throw ShapeError("task_losses: word counts differ");
    if (toggles.pos) {
      if (t.pos) pos_words += t.n; else ++out.flags["missing_pos"];
    }
    if (toggles.dependency) {
      if (t.heads) dep_words += t.n; else ++out.flags["missing_dependency"];
    }
    if (toggles.constituent) {
      if (t.joint) ++joint_sents;
      else if (!t.joint_excluded.empty()) ++out.flags["excluded_joint"];
      else ++out.flags["missing_constituent"];
    }
    if (toggles.srl_span) {
      if (t.span_frames) {
        span_tot.words += t.n;
        span_tot.frames += static_cast<long>(t.span_frames->size());
        if (t.skipped_arguments > 0) out.flags["skipped_arguments"] += t.skipped_arguments;
      } else {
        ++out.flags["missing_srl_span"];
      }
    }
    if (toggles.srl_dep) {
      if (t.dep_frames) {
        dep_tot.words += t.n;
        dep_tot.frames += static_cast<long>(t.dep_frames->size());
      } else {
        ++out.flags["missing_srl_dep"];
      }
    }
  }

  std::vector<Var> j1, j2, j3, j4;
  for (size_t b = 0; b < states.size(); ++b) {
    const SentenceTargets& t = *targets[b];
    const SentenceStates& st = states[b];
    const int n = t.n;
    if (pos_words > 0 && t.pos)
      j4.push_back(ops::softmax_cross_entropy(pos_scores(tape, st.words), *t.pos,
                                              1.0 / static_cast<double>(pos_words)));
    const bool want_dep = dep_words > 0 && t.heads.has_value();
    const bool want_joint = joint_sents > 0 && t.joint.has_value();
    Var arcs;
    if (want_dep || want_joint) arcs = arc_scores(tape, st.words, st.root);
    if (want_dep) {
      j2.push_back(ops::softmax_cross_entropy(arcs, *t.heads, 1.0 / static_cast<double>(dep_words)));
      std::vector<std::pair<int, int>> pairs;
      for (int d = 0; d < n; ++d) pairs.emplace_back(d, (*t.heads)[static_cast<size_t>(d)]);
      j2.push_back(ops::softmax_cross_entropy(rel_scores(tape, st.words, st.root, pairs),
                                              *t.relations, 1.0 / static_cast<double>(dep_words)));
    }
    if (want_joint) {
      Var spans = span_label_scores(tape, st.fence, all_spans(n));
      double h = 0.0;
      Var v = joint_hinge(spans, arcs, *t.joint, n, 1.0 / static_cast<double>(joint_sents), &h);
      if (v.valid()) j1.push_back(v);
    }
    if (span_tot.words > 0 && t.span_frames) {
      std::vector<int> preds;
      std::vector<std::vector<std::pair<std::pair<int, int>, int>>> args;
      for (const auto& f : *t.span_frames) {
        preds.push_back(f.predicate);
        args.emplace_back();
        for (const auto& [s, e, r] : f.arguments) args.back().push_back({{s, e}, r});
      }
      srl_style_losses(tape, st, SrlStyle::kSpan, preds, args, srl_units(n, SrlStyle::kSpan, cap),
                       span_tot, j3);
    }
    if (dep_tot.words > 0 && t.dep_frames) {
      std::vector<int> preds;
      std::vector<std::vector<std::pair<std::pair<int, int>, int>>> args;
      for (const auto& f : *t.dep_frames) {
        preds.push_back(f.predicate);
        args.emplace_back();
        for (const auto& [w, r] : f.arguments) args.back().push_back({{w, w}, r});
      }
      srl_style_losses(tape, st, SrlStyle::kDependency, preds, args,
                       srl_units(n, SrlStyle::kDependency, cap), dep_tot, j3);
    }
  }
  if (joint_sents > 0) {
    out.J_1 = sum_valid(j1);
    if (!out.J_1.valid()) out.J_1 = zero(tape);
  }
  out.J_2 = sum_valid(j2);
  out.J_3 = sum_valid(j3);
  out.J_4 = sum_valid(j4);
  return out;
}

StepOutput compute_step(Tape& tape, const Model& model,
                        const std::vector<BatchItem>& batch,
                        const TaskToggles& toggles, double lambda,
                        bool pair_batch) {
  if (toggles.electra && !toggles.mlm)
    throw ConfigError("electra requires mlm");
  StepOutput out;
  std::vector<std::vector<int>> clean, segs;
  for (const auto& item : batch) {
    clean.push_back(item.seq.piece_ids);
    segs.push_back(item.seq.segment_ids);
  }
  std::vector<Var> task_states;
  Var jg, jd;
  if (toggles.mlm) {
    std::vector<MaskedExample> masked;
    std::vector<std::vector<int>> gen_ids;
    for (const auto& item : batch) {
      if (!item.masked) throw InvariantError("mlm is on but an example was not masked");
      masked.push_back(*item.masked);
      gen_ids.push_back(item.masked->input_ids);
    }
    std::vector<Var> gen_states = forward(tape, model.encoder, gen_ids, segs);
    GeneratorOutput gen = generator_loss(tape, gen_states, masked, pair_batch && toggles.nsp);
    jg = gen.loss;
    if (toggles.electra) {
      std::vector<DiscriminatorInput> inputs;
      std::vector<std::vector<int>> disc_ids;
      for (size_t b = 0; b < batch.size(); ++b) {
        inputs.push_back(corrupt_for_discriminator(masked[b], gen.predictions[b]));
        disc_ids.push_back(inputs.back().ids);
      }
      task_states = forward(tape, model.encoder, disc_ids, segs);
      jd = discriminator_loss(tape, task_states, clean, inputs);
      out.discriminator_inputs = std::move(disc_ids);
    } else {
      task_states = std::move(gen_states);
    }
  } else {
    task_states = forward(tape, model.encoder, clean, segs);
  }

  TaskLosses tl;
  if (toggles.pos || toggles.constituent || toggles.dependency || toggles.srl_span ||
      toggles.srl_dep) {
    std::vector<SentenceStates> states;
    std::vector<const SentenceTargets*> targets;
    for (size_t b = 0; b < batch.size(); ++b) {
      states.push_back(sentence_states(task_states[b], batch[b].seq));
      targets.push_back(batch[b].targets);
    }
    tl = task_losses(tape, model, states, targets, toggles);
  }

  auto value = [](const Var& v) { return v.valid() ? v.scalar() : 0.0; };
  LossComponents c{value(jg), value(jd), value(tl.J_1), value(tl.J_2), value(tl.J_3), value(tl.J_4)};
  out.losses = total_loss(c, lambda);
  out.losses.flags = tl.flags;
  std::vector<Var> parts;
  std::vector<double> coefs;
  for (const auto& [v, coef] : {std::pair<Var, double>{jg, 1.0}, {jd, lambda}, {tl.J_1, 1.0},
                                {tl.J_2, 1.0}, {tl.J_3, 1.0}, {tl.J_4, 1.0}}) {
    if (!v.valid()) continue;
    parts.push_back(v);
    coefs.push_back(coef);
  }
  out.objective = parts.empty() ? zero(tape) : combine(parts, coefs);
  return out;
}

AnnotatedSentence annotate_sentence(const Model& model, const Vocab& vocab,
                                    const std::vector<std::string>& words) {
  if (words.empty()) throw InvariantError("cannot annotate an empty sentence");
  const TokenSequence seq = encode(words, nullptr, std::nullopt, vocab, model.encoder.max_length);
  Tape tape(&model.params);
  Var x = encode_sequence(tape, model.encoder, seq.piece_ids, seq.segment_ids);
  const SentenceStates st = sentence_states(x, seq);
  const int n = st.n;
  const Inventories& inv = model.labels;

  AnnotatedSentence out;
  out.words = words;
  out.provenance = Provenance::kSilver;
  const Matrix pos = pos_scores(tape, st.words).value();
  out.pos_tags.emplace();
  for (int w = 0; w < n; ++w) out.pos_tags->push_back(inv.pos.label(argmax_row(pos, w)));

  if (n > model.heads.joint_length_cap)
    spdlog::warn("decoding a {}-word sentence beyond the training length cap {}", n,
                 model.heads.joint_length_cap);
  const Matrix spans = span_label_scores(tape, st.fence, all_spans(n)).value();
  const Matrix arcs = arc_scores(tape, st.words, st.root).value();
  std::vector<std::pair<int, int>> pairs;
  for (int d = 0; d < n; ++d)
    for (int c = 0; c <= n; ++c) pairs.emplace_back(d, c);
  const Matrix rels = rel_scores(tape, st.words, st.root, pairs).value();
  const JointSpanTree tree = joint_span_cky(spans, arcs, &rels, n);
  out.tree = to_constituent_tree(tree, inv.constituent.labels(), *out.pos_tags);
  out.dep_heads = tree.dep_heads;
  out.dep_labels.emplace();
  for (int r : tree.dep_labels) out.dep_labels->push_back(inv.relation.label(r));

  for (SrlStyle style : {SrlStyle::kSpan, SrlStyle::kDependency}) {
    const Matrix logits = predicate_logits(tape, st.words, style).value();
    std::vector<double> lv(logits.data(), logits.data() + logits.size());
    const std::vector<int> preds = predict_predicates(lv);
    const auto units = srl_units(n, style, model.heads.span_width_cap);
    Matrix scores;
    if (!preds.empty()) scores = role_scores(tape, st.words, st.fence, style, preds, units).value();
    const LabelInventory& roles = style == SrlStyle::kSpan ? inv.span_role : inv.dep_role;
    std::vector<SpanFrame> span_frames;
    std::vector<DepFrame> dep_frames;
    for (size_t k = 0; k < preds.size(); ++k) {
      const Matrix block = scores.middleRows(static_cast<Eigen::Index>(k * units.size()),
                                             static_cast<Eigen::Index>(units.size()));
      const SrlSelection sel = srl_decode(block, units, style, preds[k]);
      if (style == SrlStyle::kSpan) {
        SpanFrame f{preds[k], {}};
        for (const auto& a : sel.arguments) f.arguments.push_back({a.start, a.end, roles.label(a.role)});
        span_frames.push_back(std::move(f));
      } else {
        DepFrame f{preds[k], {}};
        for (const auto& a : sel.arguments) f.arguments.push_back({a.start, roles.label(a.role)});
        dep_frames.push_back(std::move(f));
      }
    }
    if (style == SrlStyle::kSpan) out.span_frames = std::move(span_frames);
    else out.dep_frames = std::move(dep_frames);
  }
  out.validate();
  return out;
}

AnnotateResult annotate(const Model& model, const Vocab& vocab,
                        const std::vector<std::vector<std::string>>& sentences) {
  if (vocab.hash() != model.vocab_hash)
    throw ConfigError("vocabulary hash " + hex64(vocab.hash()) + " does not match checkpoint " +
                      hex64(model.vocab_hash));
  AnnotateResult r;
  for (const auto& words : sentences) {
    if (words.empty()) {
      ++r.skipped;
      continue;
    }
    try {
      r.sentences.push_back(annotate_sentence(model, vocab, words));
    } catch (const TruncationError&) {
      ++r.skipped;
    }
  }
  if (r.skipped > 0) spdlog::warn("annotate skipped {} sentence(s)", r.skipped);
  return r;
}

}  // namespace lingmt
