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

#include <cmath>
#include <algorithm>
#include <limits>

#include "doctest.h"
#include "lingmt/common.h"
#include "lingmt/decoders.h"
#include "lingmt/oracles.h"

namespace lingmt {
namespace {

// Multiples of 1/64 in [-4, 4] keep every score sum exact in binary.
double dyadic(Rng& rng) { return (static_cast<double>(rng.below(513)) - 256.0) / 64.0; }

Matrix dyadic_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = dyadic(rng);
  return m;
}

const std::vector<std::string> kLabels = {"", "S", "NP", "VP", "SBAR+S", "PP"};

TEST_CASE("span_index enumerates all spans densely") {
  for (int n = 1; n <= 7; ++n) {
    const auto spans = all_spans(n);
    REQUIRE(static_cast<int>(spans.size()) == span_count(n));
    for (size_t k = 0; k < spans.size(); ++k)
      CHECK(span_index(spans[k].first, spans[k].second, n) == static_cast<int>(k));
  }
}

TEST_CASE("single word yields a leaf attached to the root") {
  Matrix span = Matrix::Zero(1, 3);
  span(0, 2) = 1.0;
  Matrix arc = Matrix::Zero(1, 2);
  const auto t = joint_span_cky(span, arc, nullptr, 1);
  CHECK(t.dep_heads == std::vector<int>{0});
  CHECK(t.nodes.size() == 1);
  CHECK(t.nodes[0].label == 2);
  t.validate(1, 3);
  const auto b = brute_force_parse(span, arc, 1);
  CHECK(b.score == t.score);
  CHECK(b.trees_enumerated == 1);
}

TEST_CASE("oracle enumerates Catalan shapes times head choices") {
  Rng rng(1);
  const long expected[] = {0, 1, 2, 8, 40, 224, 1344};
  for (int n = 1; n <= 6; ++n) {
    const auto b = brute_force_parse(dyadic_matrix(rng, span_count(n), 2),
                                     dyadic_matrix(rng, n, n + 1), n);
    CHECK(b.trees_enumerated == expected[n]);
  }
  CHECK_THROWS_AS(brute_force_parse(Matrix::Zero(span_count(9), 1), Matrix::Zero(9, 10), 9),
                  ShapeError);
}

TEST_CASE("joint CKY matches exhaustive search on seeded instances") {
  Rng rng(20260101);
  for (int n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 200; ++trial) {
      const Matrix span = dyadic_matrix(rng, span_count(n), 4);
      const Matrix arc = dyadic_matrix(rng, n, n + 1);
      const auto t = joint_span_cky(span, arc, nullptr, n);
      const auto b = brute_force_parse(span, arc, n);
      REQUIRE(t.score == b.score);
      t.validate(n, 4);
      b.tree.validate(n, 4);
      CHECK(tree_score(t, span, arc) == t.score);
      CHECK(tree_score(b.tree, span, arc) == b.score);
    }
  }
}

TEST_CASE("forcing arc scores recovers a chain") {
  const int n = 3;
  const double ninf = -std::numeric_limits<double>::infinity();
  Matrix arc = Matrix::Constant(n, n + 1, ninf);
  arc(0, 2) = 0.0;  // word 0 <- word 1
  arc(1, 3) = 0.0;  // word 1 <- word 2
  arc(2, 0) = 0.0;  // word 2 <- root
  Matrix span = Matrix::Zero(span_count(n), 2);
  span(span_index(0, 1, n), 1) = 1.0;
  const auto t = joint_span_cky(span, arc, nullptr, n);
  CHECK(t.dep_heads == std::vector<int>{2, 3, 0});
  CHECK(t.score == 1.0);
  t.validate(n, 2);
  const auto b = brute_force_parse(span, arc, n);
  CHECK(b.score == t.score);
  CHECK(b.tree.dep_heads == t.dep_heads);
}

TEST_CASE("ties prefer the smaller split and the left head") {
  const int n = 3;
  const auto t = joint_span_cky(Matrix::Zero(span_count(n), 1), Matrix::Zero(n, n + 1), nullptr, n);
  CHECK(t.dep_heads == std::vector<int>{0, 1, 2});
  const auto& top = t.nodes[static_cast<size_t>(t.root)];
  CHECK(t.nodes[static_cast<size_t>(top.left)].end == 0);
}

TEST_CASE("shifting every span score leaves the argmax tree unchanged") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(6));
    const Matrix span = dyadic_matrix(rng, span_count(n), 3);
    const Matrix arc = dyadic_matrix(rng, n, n + 1);
    const auto a = joint_span_cky(span, arc, nullptr, n);
    const auto b = joint_span_cky((span.array() + 2.5).matrix(), arc, nullptr, n);
    CHECK(a.dep_heads == b.dep_heads);
    for (size_t k = 0; k < a.nodes.size(); ++k) {
      CHECK(a.nodes[k].start == b.nodes[k].start);
      CHECK(a.nodes[k].end == b.nodes[k].end);
      CHECK(a.nodes[k].label == b.nodes[k].label);
    }
    CHECK(b.score == a.score + 2.5 * (2 * n - 1));
  }
}

TEST_CASE("fuzzed real-valued scores always give valid trees") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(12));
    Matrix span(span_count(n), 5), arc(n, n + 1), rel(n * (n + 1), 4);
    for (auto* m : {&span, &arc, &rel})
      for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = rng.normal() * 3;
    const auto t = joint_span_cky(span, arc, &rel, n);
    t.validate(n, 5);
    CHECK(t.dep_labels.size() == static_cast<size_t>(n));
    CHECK(std::fabs(tree_score(t, span, arc) - t.score) < 1e-9);
  }
}

TEST_CASE("relations take the argmax at the chosen arc") {
  const int n = 2;
  Matrix arc = Matrix::Zero(n, n + 1);
  arc(0, 2) = 5.0;  // word 0 <- word 1
  arc(1, 0) = 5.0;
  Matrix rel = Matrix::Zero(n * (n + 1), 3);
  rel(0 * 3 + 2, 2) = 1.0;
  rel(1 * 3 + 0, 1) = 1.0;
  const auto t = joint_span_cky(Matrix::Zero(span_count(n), 1), arc, &rel, n);
  CHECK(t.dep_heads == std::vector<int>{2, 0});
  CHECK(t.dep_labels == std::vector<int>{2, 1});
}

TEST_CASE("decoder rejects empty and non-finite input") {
  CHECK_THROWS_AS(joint_span_cky(Matrix::Zero(0, 1), Matrix::Zero(0, 1), nullptr, 0), ShapeError);
  Matrix span = Matrix::Zero(span_count(2), 2);
  span(0, 1) = std::nan("");
  CHECK_THROWS_AS(joint_span_cky(span, Matrix::Zero(2, 3), nullptr, 2), NumericError);
  CHECK_THROWS_AS(joint_span_cky(Matrix::Zero(span_count(2), 2), Matrix::Zero(2, 2), nullptr, 2),
                  ShapeError);
}

ConstituentTree parse(const std::string& s) { return parse_ptb(s).tree; }

TEST_CASE("gold binarization takes heads from dependencies") {
  const auto tree = parse("(S (NP (DT The) (NN cat)) (VP (VBZ sleeps)))");
  const std::vector<int> heads = {2, 3, 0};
  std::string why;
  const auto g = gold_joint_tree(tree, heads, kLabels, &why);
  REQUIRE_MESSAGE(g.has_value(), why);
  g->validate(3, static_cast<int>(kLabels.size()));
  CHECK(g->dep_heads == heads);
  const auto& top = g->nodes[static_cast<size_t>(g->root)];
  CHECK(top.label == 1);
  CHECK(top.head == 2);
  const auto& np = g->nodes[static_cast<size_t>(top.left)];
  CHECK(np.label == 2);
  CHECK(np.head == 1);
  const auto& vp = g->nodes[static_cast<size_t>(top.right)];
  CHECK(vp.is_leaf());
  CHECK(vp.label == 3);
  CHECK(to_constituent_tree(*g, kLabels, {"DT", "NN", "VBZ"}) == tree);
}

TEST_CASE("incompatible head annotation is rejected with a reason") {
  const auto tree = parse("(S (NP (DT The) (NN cat)) (VP (VBZ sleeps)))");
  std::string why;
  CHECK_FALSE(gold_joint_tree(tree, {3, 3, 0}, kLabels, &why).has_value());
  CHECK(why.find("more than one head") != std::string::npos);
  CHECK_FALSE(gold_joint_tree(tree, {2, 3, 0}, {"", "S"}, &why).has_value());
  CHECK(why.find("inventory") != std::string::npos);
}

TEST_CASE("unary chains collapse and re-expand") {
  const auto tree = parse(
      "(S (NP (NNP John)) (VP (VBD said) (SBAR (S (NP (PRP he)) (VP (VBD left))))))");
  const auto labels = collapsed_labels(tree);
  CHECK(std::find(labels.begin(), labels.end(), "SBAR+S") != labels.end());
  // John->said, said root, he->left, left->said
  const std::vector<int> heads = {2, 0, 4, 2};
  std::string why;
  const auto g = gold_joint_tree(tree, heads, kLabels, &why);
  REQUIRE_MESSAGE(g.has_value(), why);
  g->validate(4, static_cast<int>(kLabels.size()));
  CHECK(to_constituent_tree(*g, kLabels, {"NNP", "VBD", "PRP", "VBD"}) == tree);
}

TEST_CASE("binarization attaches right siblings before left ones") {
  const auto tree = parse("(NP (DT a) (NN b) (NN c) (NN d))");
  // Head is word 1; the others depend on it.
  const std::vector<int> heads = {2, 0, 2, 2};
  const auto g = gold_joint_tree(tree, heads, kLabels);
  REQUIRE(g.has_value());
  const auto& top = g->nodes[static_cast<size_t>(g->root)];
  CHECK(g->nodes[static_cast<size_t>(top.left)].end == 0);
  const auto& rest = g->nodes[static_cast<size_t>(top.right)];
  CHECK(rest.start == 1);
  CHECK(rest.end == 3);
  CHECK(rest.label == 0);
  const auto& inner = g->nodes[static_cast<size_t>(rest.left)];
  CHECK(inner.start == 1);
  CHECK(inner.end == 2);
}

TEST_CASE("unlabeled decoded root keeps its children") {
  JointSpanTree t;
  t.nodes = {{0, 0, 0, 0, -1, -1}, {1, 1, 0, 1, -1, -1}, {0, 1, 0, 0, 0, 1}};
  t.root = 2;
  t.dep_heads = {0, 1};
  const auto c = to_constituent_tree(t, kLabels, {"A", "B"});
  CHECK(c.label.empty());
  CHECK(c.children.size() == 2);
  CHECK(write_ptb(c, {"x", "y"}) == "( (A x) (B y))");
}

std::vector<std::pair<int, int>> random_units(Rng& rng, int n, size_t count) {
  std::vector<std::pair<int, int>> all = all_spans(n);
  rng.shuffle(all);
  all.resize(std::min(all.size(), count));
  return all;
}

TEST_CASE("span SRL decoding: degenerate cases") {
  const std::vector<std::pair<int, int>> units = {{0, 1}, {1, 2}};
  Matrix s(2, 2);
  s << 0, -1, 0, -2;
  CHECK(srl_decode(s, units, SrlStyle::kSpan).arguments.empty());
  s << 0, 5, 0, 3;
  const auto sel = srl_decode(s, units, SrlStyle::kSpan);
  REQUIRE(sel.arguments.size() == 1);
  CHECK(sel.arguments[0].start == 0);
  CHECK(sel.total == 5.0);
  Matrix one(1, 2);
  one << 0, 1;
  CHECK(brute_force_srl(one, {{0, 0}}, SrlStyle::kSpan).arguments.size() == 1);
  Matrix nested(2, 2);
  nested << 0, 2, 0, 3;
  const auto b = brute_force_srl(nested, {{0, 3}, {1, 2}}, SrlStyle::kSpan);
  REQUIRE(b.arguments.size() == 1);
  CHECK(b.arguments[0].start == 1);
}

TEST_CASE("SRL decoder matches exhaustive search") {
  Rng rng(4242);
  for (SrlStyle style : {SrlStyle::kSpan, SrlStyle::kDependency}) {
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + static_cast<int>(rng.below(8));
      std::vector<std::pair<int, int>> units;
      if (style == SrlStyle::kSpan) {
        units = random_units(rng, n, 20);
      } else {
        for (int w = 0; w < n; ++w) units.emplace_back(w, w);
      }
      const Matrix s = dyadic_matrix(rng, static_cast<int>(units.size()), 4);
      const auto d = srl_decode(s, units, style, 3);
      const auto b = brute_force_srl(s, units, style, 3);
      REQUIRE(d.total == b.total);
      CHECK(d.predicate == 3);
      for (size_t i = 1; i < d.arguments.size(); ++i)
        CHECK(d.arguments[i - 1].end < d.arguments[i].start);
    }
  }
  CHECK_THROWS_AS(brute_force_srl(Matrix::Zero(21, 2), random_units(rng, 8, 21), SrlStyle::kSpan),
                  ShapeError);
}

TEST_CASE("SRL decoder never returns overlapping spans on fuzzed input") {
  Rng rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + static_cast<int>(rng.below(25));
    const auto units = all_spans(n);
    Matrix s(static_cast<int>(units.size()), 6);
    for (Eigen::Index i = 0; i < s.size(); ++i) s.data()[i] = rng.normal();
    const auto d = srl_decode(s, units, SrlStyle::kSpan);
    for (size_t i = 1; i < d.arguments.size(); ++i)
      REQUIRE(d.arguments[i - 1].end < d.arguments[i].start);
    for (const auto& a : d.arguments) CHECK(a.margin > 0.0);
  }
}

TEST_CASE("predicates need a strictly positive logit") {
  CHECK(predict_predicates({-1.0, -2.0}).empty());
  CHECK(predict_predicates({-1.0, -1.0, -1.0, 2.0}) == std::vector<int>{3});
  CHECK(predict_predicates({0.0, -0.5}).empty());
}

}  // namespace
}  // namespace lingmt
