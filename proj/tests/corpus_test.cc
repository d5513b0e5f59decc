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

#include "lingmt/corpus.h"

#include <doctest.h>

#include <string>

#include "lingmt/common.h"

namespace lingmt {
namespace {

std::string toy(const std::string& name) {
  return read_file(std::string(LINGMT_SOURCE_DIR) + "/data/toy/" + name);
}

TEST_CASE("ptb: three-leaf tree") {
  ParsedTree p = parse_ptb("(S (NP (DT The) (NN cat)) (VP (VBZ sleeps)))");
  CHECK(p.words == std::vector<std::string>{"The", "cat", "sleeps"});
  CHECK(p.tree.label == "S");
  REQUIRE(p.tree.children.size() == 2);
  CHECK(p.tree.children[0].label == "NP");
  CHECK(p.tree.children[1].label == "VP");
  CHECK(tree_preterminals(p.tree) == std::vector<std::string>{"DT", "NN", "VBZ"});
  CHECK(tree_leaves(p.tree) == std::vector<int>{0, 1, 2});
}

TEST_CASE("ptb: minimal tree") {
  ParsedTree p = parse_ptb("(X (Y a))");
  CHECK(p.words.size() == 1);
  CHECK(p.tree.label == "X");
  CHECK(p.tree.children.at(0).label == "Y");
  CHECK(p.tree.children.at(0).is_preterminal());
}

TEST_CASE("ptb: unbalanced input reports the end offset") {
  const std::string text = "(S (NP";
  try {
    parse_ptb(text);
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.offset() == static_cast<long>(text.size()));
  }
  CHECK_THROWS_AS(parse_ptb(""), FormatError);
  CHECK_THROWS_AS(parse_ptb("   "), FormatError);
  CHECK_THROWS_AS(parse_ptb("(S (NP (DT a)))) "), FormatError);
}

TEST_CASE("ptb: function tags and traces are stripped") {
  ParsedTree p = parse_ptb(
      "( (S (NP-SBJ-1 (DT The) (NN cat)) (VP (VBZ sleeps) (NP (-NONE- *T*-1))) (. .)) )");
  CHECK(p.words == std::vector<std::string>{"The", "cat", "sleeps", "."});
  CHECK(write_ptb(p.tree, p.words) == "(S (NP (DT The) (NN cat)) (VP (VBZ sleeps)) (. .))");
}

TEST_CASE("ptb: write/read fixed point on the toy treebank") {
  const std::vector<ParsedTree> trees = read_ptb(toy("toy.mrg"));
  REQUIRE(trees.size() == 50);
  for (const auto& t : trees) {
    const std::string once = write_ptb(t.tree, t.words);
    ParsedTree again = parse_ptb(once);
    CHECK(again.words == t.words);
    CHECK(write_ptb(again.tree, again.words) == once);
  }
}

TEST_CASE("conll2005: column convention") {
  const std::string block =
      "John\t(A0*)\n"
      "sells\t(V*)\n"
      "the\t(A1*\n"
      "old\t*\n"
      "house\t*)\n";
  auto s = read_conll2005(block);
  REQUIRE(s.size() == 1);
  REQUIRE(s[0].span_frames);
  REQUIRE(s[0].span_frames->size() == 1);
  const SpanFrame& f = s[0].span_frames->at(0);
  CHECK(f.predicate == 1);
  REQUIRE(f.arguments.size() == 2);
  CHECK(f.arguments[0].start == 0);
  CHECK(f.arguments[0].end == 0);
  CHECK(f.arguments[0].role == "A0");
  CHECK(f.arguments[1].start == 2);
  CHECK(f.arguments[1].end == 4);
  CHECK(f.arguments[1].role == "A1");
}

TEST_CASE("conll2005: malformed blocks") {
  CHECK_THROWS_AS(read_conll2005("a\t(A0*\nb\t(V*)\n"), FormatError);
  try {
    read_conll2005("a\t(A0*)\t*\nb\t(V*)\n");
    FAIL("expected ragged columns to fail");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("conll2005: toy file round trip") {
  auto s = read_conll2005(toy("toy.props"));
  REQUIRE(s.size() == 50);
  const std::string once = write_conll2005(s);
  CHECK(write_conll2005(read_conll2005(once)) == once);
}

std::string conll09_row(int id, const std::string& word, const std::string& pos, int head,
                        const std::string& rel, const std::string& fill,
                        const std::vector<std::string>& apreds) {
  std::string r = std::to_string(id) + "\t" + word + "\t" + word + "\t" + word + "\t" + pos +
                  "\t" + pos + "\t_\t_\t" + std::to_string(head) + "\t" + std::to_string(head) +
                  "\t" + rel + "\t" + rel + "\t" + fill + "\t" + (fill == "Y" ? word + ".01" : "_");
  for (const auto& a : apreds) r += "\t" + a;
  return r + "\n";
}

TEST_CASE("conll2009: heads, frames and errors") {
  auto two = read_conll2009(conll09_row(1, "dogs", "NNS", 2, "nsubj", "_", {}) +
                            conll09_row(2, "bark", "VBP", 0, "root", "_", {}));
  REQUIRE(two.size() == 1);
  CHECK(*two[0].dep_heads == std::vector<int>{2, 0});
  CHECK(*two[0].pos_tags == std::vector<std::string>{"NNS", "VBP"});

  auto framed = read_conll2009(conll09_row(1, "dogs", "NNS", 3, "nsubj", "_", {"A0"}) +
                               conll09_row(2, "often", "RB", 3, "advmod", "_", {"_"}) +
                               conll09_row(3, "bark", "VBP", 0, "root", "Y", {"_"}));
  REQUIRE(framed[0].dep_frames);
  REQUIRE(framed[0].dep_frames->size() == 1);
  CHECK(framed[0].dep_frames->at(0).predicate == 2);
  REQUIRE(framed[0].dep_frames->at(0).arguments.size() == 1);
  CHECK(framed[0].dep_frames->at(0).arguments[0].word == 0);
  CHECK(framed[0].dep_frames->at(0).arguments[0].role == "A0");

  std::string bad_head = conll09_row(1, "dogs", "NNS", 2, "nsubj", "_", {}) +
                         conll09_row(2, "bark", "VBP", 0, "root", "_", {});
  bad_head.replace(bad_head.find("\t2\t2\t"), 5, "\tx\tx\t");
  CHECK_THROWS_AS(read_conll2009(bad_head), FormatError);

  CHECK_THROWS_AS(read_conll2009(conll09_row(1, "dogs", "NNS", 2, "nsubj", "Y", {}) +
                                 conll09_row(2, "bark", "VBP", 0, "root", "_", {})),
                  FormatError);
  CHECK_THROWS_AS(read_conll2009(conll09_row(1, "a", "DT", 2, "x", "_", {}) +
                                 conll09_row(2, "b", "NN", 1, "x", "_", {})),
                  InvariantError);
}

TEST_CASE("conll2009: toy file round trip") {
  auto s = read_conll2009(toy("toy.conll09"));
  REQUIRE(s.size() == 50);
  const std::string once = write_conll2009(s);
  CHECK(write_conll2009(read_conll2009(once)) == once);
}

AnnotatedSentence full_sentence() {
  auto merged = merge_annotations({sentences_from_ptb(toy("toy.mrg")),
                                   read_conll2005(toy("toy.props")),
                                   read_conll2009(toy("toy.conll09"))});
  return merged.at(0);
}

TEST_CASE("merge: toy sources unify into fully annotated sentences") {
  auto merged = merge_annotations({sentences_from_ptb(toy("toy.mrg")),
                                   read_conll2005(toy("toy.props")),
                                   read_conll2009(toy("toy.conll09"))});
  REQUIRE(merged.size() == 50);
  for (const auto& s : merged) {
    CHECK(s.pos_tags.has_value());
    CHECK(s.tree.has_value());
    CHECK(s.dep_heads.has_value());
    CHECK(s.span_frames.has_value());
    CHECK(s.dep_frames.has_value());
    CHECK(s.provenance == Provenance::kGold);
    CHECK_NOTHROW(s.validate());
  }
}

TEST_CASE("silver: round trip, empty file, missing words") {
  AnnotatedSentence s = full_sentence();
  s.provenance = Provenance::kSilver;
  auto back = read_silver(write_silver({s}));
  REQUIRE(back.size() == 1);
  CHECK(back[0].words == s.words);
  CHECK(back[0].pos_tags == s.pos_tags);
  CHECK(back[0].dep_heads == s.dep_heads);
  CHECK(back[0].dep_labels == s.dep_labels);
  CHECK(back[0].provenance == Provenance::kSilver);
  CHECK(write_silver(back) == write_silver({s}));

  AnnotatedSentence bare;
  bare.words = {"just", "words"};
  auto bare_back = read_silver(write_silver({bare}));
  REQUIRE(bare_back.size() == 1);
  CHECK_FALSE(bare_back[0].tree.has_value());
  CHECK(bare_back[0].provenance == Provenance::kGold);

  CHECK(read_silver("").empty());
  try {
    read_silver(write_silver({s}) + "{\"provenance\":\"silver\"}\n");
    FAIL("expected a format error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(read_silver("not json\n"), FormatError);
}

TEST_CASE("validate: invariants") {
  AnnotatedSentence s;
  s.words = {"a", "b"};
  s.dep_heads = std::vector<int>{2, 1};
  CHECK_THROWS_AS(s.validate(), InvariantError);
  s.dep_heads = std::vector<int>{0, 0};
  CHECK_THROWS_AS(s.validate(), InvariantError);
  s.dep_heads = std::vector<int>{2, 3};
  CHECK_THROWS(s.validate());
  s.dep_heads = std::vector<int>{2, 0};
  CHECK_NOTHROW(s.validate());
  s.span_frames = std::vector<SpanFrame>{{1, {{0, 1, "A0"}, {1, 1, "A1"}}}};
  CHECK_THROWS_AS(s.validate(), InvariantError);
  s.span_frames = std::vector<SpanFrame>{{1, {{1, 0, "A0"}}}};
  CHECK_THROWS(s.validate());
  s.span_frames.reset();
  s.dep_frames = std::vector<DepFrame>{{1, {{0, "A0"}, {0, "A1"}}}};
  CHECK_THROWS_AS(s.validate(), InvariantError);
}

TEST_CASE("mixer: degenerate and Bernoulli draws") {
  SourceMixer never({0.0, 3}, 10, 10);
  SourceMixer always({1.0, 3}, 10, 10);
  for (int i = 0; i < 200; ++i) {
    CHECK(never.next_source() == DataSource::kSilver);
    CHECK(always.next_source() == DataSource::kGold);
  }
  SourceMixer m({0.10, 11}, 10, 10);
  int gold = 0;
  for (int i = 0; i < 10000; ++i) gold += m.next_source() == DataSource::kGold ? 1 : 0;
  CHECK(std::abs(gold / 10000.0 - 0.10) <= 0.01);

  SourceMixer only_gold({0.10, 11}, 10, 0);
  for (int i = 0; i < 50; ++i) CHECK(only_gold.next_source() == DataSource::kGold);
  CHECK_THROWS_AS(SourceMixer({0.1, 1}, 0, 0), ConfigError);
  CHECK_THROWS_AS(MixerPolicy({1.5, 1}).validate(), ConfigError);

  // Stateless in (seed, index).
  MixerPolicy p{0.3, 99};
  SourceMixer a(p, 5, 5);
  for (uint64_t i = 0; i < 100; ++i) CHECK(a.next_source() == draw_source(p, i));
}

TEST_CASE("raw text: one sentence per non-blank line") {
  auto r = read_raw_text("a b c\n\n  d  e \n");
  REQUIRE(r.size() == 2);
  CHECK(r[1] == std::vector<std::string>{"d", "e"});
  CHECK(read_raw_text(toy("toy.txt")).size() == 50);
}

}  // namespace
}  // namespace lingmt
