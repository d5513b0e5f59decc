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

#include "lingmt/oracles.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>

#include "lingmt/common.h"

namespace lingmt {

namespace {

struct Partial {
  std::vector<JointSpanNode> nodes;  // Local indices; root last.
  double score = 0.0;
  int head = 0;
};

std::vector<Partial> enumerate(int i, int j, int n, const Matrix& span_scores,
                               const Matrix& arc_scores,
                               const std::vector<int>& best_label) {
  const int s = span_index(i, j, n);
  const double ls = span_scores(s, best_label[static_cast<size_t>(s)]);
  std::vector<Partial> out;
  if (i == j) {
    out.push_back({{{i, i, best_label[static_cast<size_t>(s)], i, -1, -1}}, ls, i});
    return out;
  }
  for (int k = i; k < j; ++k) {
    const auto lefts = enumerate(i, k, n, span_scores, arc_scores, best_label);
    const auto rights = enumerate(k + 1, j, n, span_scores, arc_scores, best_label);
    for (const auto& l : lefts) {
      for (const auto& r : rights) {
        for (bool head_left : {true, false}) {
          Partial p;
          p.nodes = l.nodes;
          const int offset = static_cast<int>(p.nodes.size());
          for (auto x : r.nodes) {
            if (!x.is_leaf()) {
              x.left += offset;
              x.right += offset;
            }
            p.nodes.push_back(x);
          }
          p.head = head_left ? l.head : r.head;
          const int dep = head_left ? r.head : l.head;
          p.score = l.score + r.score + arc_scores(dep, p.head + 1) + ls;
          p.nodes.push_back({i, j, best_label[static_cast<size_t>(s)], p.head,
                             offset - 1, static_cast<int>(p.nodes.size()) - 1});
          out.push_back(std::move(p));
        }
      }
    }
  }
  return out;
}

}  // namespace

BruteForceParse brute_force_parse(const Matrix& span_scores,
                                  const Matrix& arc_scores, int n) {
  if (n < 1 || n > 8) throw ShapeError("brute_force_parse supports 1 to 8 words");
  if (span_scores.rows() != span_count(n) || arc_scores.rows() != n ||
      arc_scores.cols() != n + 1)
    throw ShapeError("brute_force_parse: score shapes do not match n");
  std::vector<int> best_label(static_cast<size_t>(span_count(n)), 0);
  for (int s = 0; s < span_count(n); ++s)
    for (Eigen::Index c = 1; c < span_scores.cols(); ++c)
      if (span_scores(s, c) > span_scores(s, best_label[static_cast<size_t>(s)]))
        best_label[static_cast<size_t>(s)] = static_cast<int>(c);
  const auto all = enumerate(0, n - 1, n, span_scores, arc_scores, best_label);
  BruteForceParse result;
  result.trees_enumerated = static_cast<long>(all.size());
  result.score = -std::numeric_limits<double>::infinity();
  const Partial* best = nullptr;
  for (const auto& p : all) {
    const double total = p.score + arc_scores(p.head, 0);
    if (best == nullptr || total > result.score) {
      result.score = total;
      best = &p;
    }
  }
  result.tree.nodes = best->nodes;
  result.tree.root = static_cast<int>(best->nodes.size()) - 1;
  result.tree.dep_heads = derive_dep_heads(result.tree, n);
  result.tree.score = result.score;
  return result;
}

SrlSelection brute_force_srl(const Matrix& role_scores,
                             const std::vector<std::pair<int, int>>& units,
                             SrlStyle style, int predicate) {
  if (units.size() > 20) throw ShapeError("brute_force_srl supports at most 20 units");
  if (role_scores.rows() != static_cast<Eigen::Index>(units.size()) || role_scores.cols() < 1)
    throw ShapeError("brute_force_srl: score shape does not match units");
  const size_t u = units.size();
  std::vector<double> margin(u, -std::numeric_limits<double>::infinity());
  std::vector<int> role(u, 0);
  for (size_t k = 0; k < u; ++k)
    for (Eigen::Index c = 1; c < role_scores.cols(); ++c) {
      const double mg = role_scores(static_cast<Eigen::Index>(k), c) -
                        role_scores(static_cast<Eigen::Index>(k), 0);
      if (mg > margin[k]) {
        margin[k] = mg;
        role[k] = static_cast<int>(c);
      }
    }

  double best = 0.0;
  std::vector<size_t> best_set, current;
  auto overlaps = [&](size_t a, size_t b) {
    if (style == SrlStyle::kDependency) return false;
    return units[a].first <= units[b].second && units[b].first <= units[a].second;
  };
  auto search = [&](auto&& self, size_t k, double total) -> void {
    if (k == u) {
      if (total > best) {
        best = total;
        best_set = current;
      }
      return;
    }
    self(self, k + 1, total);
    if (margin[k] == -std::numeric_limits<double>::infinity()) return;
    for (size_t c : current)
      if (overlaps(c, k)) return;
    current.push_back(k);
    self(self, k + 1, total + margin[k]);
    current.pop_back();
  };
  search(search, 0, 0.0);

  SrlSelection sel;
  sel.predicate = predicate;
  sel.total = best;
  for (size_t k : best_set)
    sel.arguments.push_back({units[k].first, units[k].second, role[k], margin[k]});
  std::sort(sel.arguments.begin(), sel.arguments.end(),
            [](const SrlArgument& a, const SrlArgument& b) { return a.start < b.start; });
  return sel;
}

GradientCheck check_gradients(ModelParams& params,
                              const std::function<Var(Tape&)>& loss,
                              const GradientCheckOptions& options) {
  GradientSet analytic;
  {
    Tape tape(&params);
    Var l = loss(tape);
    if (l.rows() != 1 || l.cols() != 1) throw ShapeError("gradient check needs a 1x1 loss");
    tape.backward(l);
    analytic = tape.parameter_gradients();
  }
  auto eval = [&]() {
    Tape tape(&params);
    return loss(tape).scalar();
  };
  auto wanted = [&](const std::string& name) {
    if (options.prefixes.empty()) return true;
    for (const auto& p : options.prefixes)
      if (name.compare(0, p.size(), p) == 0) return true;
    return false;
  };

  GradientCheck out;
  Rng rng(options.seed);
  for (auto& [name, tensor] : params.tensors()) {
    if (!wanted(name)) continue;
    const Matrix& g = analytic.at(name);
    const long size = static_cast<long>(tensor.size());
    std::vector<long> picks;
    if (size <= options.samples_per_tensor) {
      for (long k = 0; k < size; ++k) picks.push_back(k);
    } else {
      // One entry of largest analytic magnitude, the rest at random.
      Eigen::Index r = 0, c = 0;
      g.cwiseAbs().maxCoeff(&r, &c);
      picks.push_back(static_cast<long>(c * tensor.rows() + r));
      while (static_cast<int>(picks.size()) < options.samples_per_tensor)
        picks.push_back(static_cast<long>(rng.below(static_cast<uint64_t>(size))));
    }
    double worst = 0.0;
    for (long k : picks) {
      double& x = tensor.data()[k];
      const double saved = x;
      x = saved + options.epsilon;
      const double up = eval();
      x = saved - options.epsilon;
      const double down = eval();
      x = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double a = g.data()[k];
      const double err = std::fabs(a - numeric) /
                         std::max({std::fabs(a), std::fabs(numeric), options.floor});
      ++out.entries;
      worst = std::max(worst, err);
      if (err >= out.max_error) {
        out.max_error = err;
        out.worst_tensor = name;
        out.worst_analytic = a;
        out.worst_numeric = numeric;
      }
    }
    out.tensor_error[name] = worst;
  }
  return out;
}

std::map<std::string, GradientCheck> check_objective_gradients(
    Model& model, const Vocab& vocab, const std::vector<AnnotatedSentence>& sentences,
    uint64_t seed, const GradientCheckOptions& options) {
  if (sentences.size() < 2) throw ShapeError("gradient check needs two sentences");
  const EncoderConfig& enc = model.encoder;
  std::vector<SentenceTargets> targets;
  std::vector<TokenSequence> single, paired;
  std::vector<MaskedExample> masked, masked_pair;
  Rng rng(seed);
  MaskPolicy policy;
  policy.mask_rate = 0.3;
  for (size_t b = 0; b < 2; ++b) {
    const AnnotatedSentence& s = sentences[b];
    targets.push_back(make_targets(s, model.labels, model.heads));
    single.push_back(encode(s.words, nullptr, std::nullopt, vocab, enc.max_length));
    paired.push_back(encode(s.words, &sentences[1 - b].words, b == 0, vocab, enc.max_length));
    masked.push_back(mask_sentence(single.back(), s, policy, rng, vocab));
    masked_pair.push_back(mask_sentence(paired.back(), s, policy, rng, vocab));
  }
  auto ids_of = [](const std::vector<MaskedExample>& ex) {
    std::vector<std::vector<int>> out;
    for (const auto& e : ex) out.push_back(e.input_ids);
    return out;
  };
  auto segs_of = [](const std::vector<TokenSequence>& seqs) {
    std::vector<std::vector<int>> out;
    for (const auto& q : seqs) out.push_back(q.segment_ids);
    return out;
  };

  // Discriminator inputs from one generator pass at the current parameters.
  std::vector<DiscriminatorInput> disc;
  std::vector<std::vector<int>> clean;
  {
    Tape tape(&model.params);
    auto states = forward(tape, enc, ids_of(masked), segs_of(single));
    GeneratorOutput g = generator_loss(tape, states, masked, false);
    for (size_t b = 0; b < 2; ++b) {
      disc.push_back(corrupt_for_discriminator(masked[b], g.predictions[b]));
      clean.push_back(single[b].piece_ids);
    }
  }

  std::map<std::string, std::function<Var(Tape&)>> losses;
  losses["J_G"] = [&](Tape& t) {
    auto states = forward(t, enc, ids_of(masked_pair), segs_of(paired));
    return generator_loss(t, states, masked_pair, true).loss;
  };
  losses["J_D"] = [&](Tape& t) {
    std::vector<std::vector<int>> ids;
    for (const auto& d : disc) ids.push_back(d.ids);
    auto states = forward(t, enc, ids, segs_of(single));
    return discriminator_loss(t, states, clean, disc);
  };
  auto task = [&](Tape& t) {
    std::vector<std::vector<int>> ids;
    for (const auto& q : single) ids.push_back(q.piece_ids);
    auto x = forward(t, enc, ids, segs_of(single));
    std::vector<SentenceStates> st;
    std::vector<const SentenceTargets*> tg;
    for (size_t b = 0; b < 2; ++b) {
      st.push_back(sentence_states(x[b], single[b]));
      tg.push_back(&targets[b]);
    }
    return task_losses(t, model, st, tg, TaskToggles());
  };
  losses["J_1"] = [&](Tape& t) { return task(t).J_1; };
  losses["J_2"] = [&](Tape& t) { return task(t).J_2; };
  losses["J_3"] = [&](Tape& t) { return task(t).J_3; };
  losses["J_4"] = [&](Tape& t) { return task(t).J_4; };

  std::map<std::string, GradientCheck> out;
  for (const auto& [name, fn] : losses) {
    {
      Tape probe(&model.params);
      if (!fn(probe).valid()) throw InvariantError(name + " is empty on the check batch");
    }
    out[name] = check_gradients(model.params, fn, options);
  }
  return out;
}

}  // namespace lingmt
