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

#include "lingmt/masking.h"

#include <doctest.h>

#include <algorithm>
#include <set>

namespace lingmt {
namespace {

// Reserved tokens plus w0..w{n-1}; every word is one piece.
Vocab word_vocab(int n) {
  std::vector<std::string> t = Vocab::reserved_tokens();
  for (int i = 0; i < n; ++i) t.push_back("w" + std::to_string(i));
  return Vocab(t);
}

std::vector<std::string> words_of(int n, int offset = 0) {
  std::vector<std::string> w;
  for (int i = 0; i < n; ++i) w.push_back("w" + std::to_string((i + offset) % 100));
  return w;
}

ConstituentTree tree_of(const std::string& ptb) { return parse_ptb(ptb).tree; }

TEST_CASE("syntactic phrases: subtree spans without the sentence") {
  auto spans = extract_syntactic_phrases(tree_of("(S (NP (DT The) (NN cat)) (VP (VBZ sleeps)))"));
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].start == 0);
  CHECK(spans[0].end == 1);
  CHECK(spans[0].label == "NP");
  CHECK(spans[1].start == 2);
  CHECK(spans[1].end == 2);
  CHECK(spans[1].label == "VP");
  CHECK(extract_syntactic_phrases(tree_of("(X (Y a))")).empty());
  // Width cap.
  auto capped = extract_syntactic_phrases(
      tree_of("(S (NP (DT a) (NN b) (NN c)) (VP (VBZ d)))"), 2);
  REQUIRE(capped.size() == 1);
  CHECK(capped[0].label == "VP");
}

TEST_CASE("syntactic phrases: federal paper board is one width-3 unit") {
  const std::string ptb =
      "(S (NP (DT the) (NP (JJ federal) (NN paper) (NN board))) (VP (VBD ruled)))";
  ParsedTree p = parse_ptb(ptb);
  auto spans = extract_syntactic_phrases(p.tree);
  auto it = std::find_if(spans.begin(), spans.end(),
                         [](const PhraseSpan& s) { return s.start == 1 && s.end == 3; });
  REQUIRE(it != spans.end());
  CHECK(it->width() == 3);

  std::vector<std::string> t = Vocab::reserved_tokens();
  for (const auto& w : p.words) t.push_back(w);
  Vocab v(t);
  TokenSequence seq = encode(p.words, nullptr, std::nullopt, v, 32);
  MaskPolicy policy;
  policy.mask_rate = 0.6;  // Budget 3 of 5 pieces.
  int hits = 0;
  for (uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    auto pos = select_positions(seq, spans, policy, MaskStrategy::kSynPhrase, rng);
    CHECK(pos.size() == 3);
    std::set<int> s(pos.begin(), pos.end());
    const int inside = static_cast<int>(s.count(2) + s.count(3) + s.count(4));
    if (inside == 3) ++hits;
  }
  CHECK(hits > 0);
}

TEST_CASE("semantic phrases: predicates and arguments") {
  auto spans = extract_semantic_phrases({{2, {{0, 1, "A0"}}}});
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].start == 0);
  CHECK(spans[0].end == 1);
  CHECK(spans[1].start == 2);
  CHECK(spans[1].end == 2);
  CHECK(extract_semantic_phrases({}).empty());
  CHECK(extract_semantic_phrases({{1, {{0, 0, "A0"}}}, {1, {{0, 0, "A1"}}}}).size() == 2);
}

TEST_CASE("semantic phrase masking replaces the predicates sells and products") {
  AnnotatedSentence s;
  s.words = {"the", "company", "sells", "paper", "products"};
  s.span_frames = std::vector<SpanFrame>{{2, {}}, {4, {}}};
  std::vector<std::string> t = Vocab::reserved_tokens();
  for (const auto& w : s.words) t.push_back(w);
  Vocab v(t);
  TokenSequence seq = encode(s.words, nullptr, std::nullopt, v, 32);
  MaskPolicy policy;
  policy.mask_rate = 0.4;  // Budget 2.
  policy.strategy_weights = {0.0, 1.0, 0.0};
  policy.mask_probability = 1.0;
  policy.random_probability = 0.0;
  policy.keep_probability = 0.0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    MaskedExample ex = mask_sentence(seq, s, policy, rng, v);
    CHECK(ex.strategy == MaskStrategy::kSemPhrase);
    CHECK(ex.mask_positions == std::vector<int>{3, 5});
    CHECK(ex.input_ids[3] == Vocab::kMask);
    CHECK(ex.input_ids[5] == Vocab::kMask);
  }
}

TEST_CASE("budget: rounding and minimum") {
  CHECK(mask_budget(0.15, 20) == 3);
  CHECK(mask_budget(0.15, 10) == 2);  // 1.5 rounds up.
  CHECK(mask_budget(0.15, 3) == 1);
  CHECK(mask_budget(0.15, 0) == 0);
  Vocab v = word_vocab(100);
  TokenSequence seq = encode(words_of(20), nullptr, std::nullopt, v, 64);
  Rng rng(1);
  CHECK(select_positions(seq, {}, MaskPolicy(), MaskStrategy::kWholeWord, rng).size() == 3);
}

TEST_CASE("select: phrase strategy without phrases matches whole-word selection") {
  Vocab v = word_vocab(100);
  TokenSequence seq = encode(words_of(17), nullptr, std::nullopt, v, 64);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng a(seed), b(seed);
    CHECK(select_positions(seq, {}, MaskPolicy(), MaskStrategy::kSemPhrase, a) ==
          select_positions(seq, {}, MaskPolicy(), MaskStrategy::kWholeWord, b));
  }
}

TEST_CASE("select: multi-piece words are atomic and never exceed the budget") {
  Vocab v = build_vocab({"internationalization", "of", "the", "markets", "unbelievable", "a"}, 40);
  const std::vector<std::string> s = {"the", "internationalization", "of", "a", "markets",
                                      "unbelievable", "the", "a", "of", "markets"};
  TokenSequence seq = encode(s, nullptr, std::nullopt, v, 128);
  const int budget = mask_budget(0.15, static_cast<int>(maskable_positions(seq).size()));
  for (uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    auto pos = select_positions(seq, {}, MaskPolicy(), MaskStrategy::kWholeWord, rng);
    CHECK(static_cast<int>(pos.size()) <= budget);
    std::set<int> chosen(pos.begin(), pos.end());
    for (const auto& [b, e] : seq.word_pieces) {
      int c = 0;
      for (int p = b; p <= e; ++p) c += static_cast<int>(chosen.count(p));
      CHECK((c == 0 || c == e - b + 1));
    }
    CHECK(chosen.count(0) == 0);
    CHECK(chosen.count(seq.first_sep) == 0);
  }
}

TEST_CASE("replacement: degenerate policies and invariants") {
  Vocab v = word_vocab(100);
  TokenSequence seq = encode(words_of(30), nullptr, std::nullopt, v, 64);
  Rng sel(3);
  auto positions = select_positions(seq, {}, MaskPolicy(), MaskStrategy::kWholeWord, sel);

  MaskPolicy all_mask;
  all_mask.mask_probability = 1.0;
  all_mask.random_probability = 0.0;
  all_mask.keep_probability = 0.0;
  Rng r1(4);
  MaskedExample m = apply_replacement(seq, positions, all_mask, r1, v);
  for (int p : positions) CHECK(m.input_ids[p] == Vocab::kMask);

  MaskPolicy keep;
  keep.mask_probability = 0.0;
  keep.random_probability = 0.0;
  keep.keep_probability = 1.0;
  Rng r2(4);
  MaskedExample k = apply_replacement(seq, positions, keep, r2, v);
  CHECK(k.input_ids == k.original_ids);
  CHECK(k.mask_positions == positions);

  Rng r3(9);
  MaskedExample d = apply_replacement(seq, positions, MaskPolicy(), r3, v);
  std::set<int> sel_set(positions.begin(), positions.end());
  for (int p = 0; p < seq.size(); ++p)
    if (!sel_set.count(p)) CHECK(d.input_ids[p] == d.original_ids[p]);
  for (size_t i = 0; i < positions.size(); ++i) {
    const int p = positions[i];
    if (d.actions[i] == MaskAction::kMask) CHECK(d.input_ids[p] == Vocab::kMask);
    if (d.actions[i] == MaskAction::kKeep) CHECK(d.input_ids[p] == d.original_ids[p]);
    if (d.actions[i] == MaskAction::kRandom) CHECK_FALSE(Vocab::is_reserved(d.input_ids[p]));
  }
}

// Expected value from tools/oracles/masking_budget.py --lo 10 --hi 40.
constexpr double kExpectedFraction = 0.153616;

TEST_CASE("statistics: selected fraction over 1023 sentences matches the budget oracle") {
  Vocab v = word_vocab(100);
  double total = 0.0;
  int count = 0;
  for (int k = 0; k < 1023; ++k) {
    const int m = 10 + k % 31;
    TokenSequence seq = encode(words_of(m, k), nullptr, std::nullopt, v, 64);
    Rng rng(derive_seed(17, "sentence " + std::to_string(k)));
    auto pos = select_positions(seq, {}, MaskPolicy(), choose_strategy(MaskPolicy(), rng), rng);
    total += static_cast<double>(pos.size()) / m;
    ++count;
  }
  CHECK(total / count == doctest::Approx(kExpectedFraction).epsilon(1e-5));
  CHECK(std::abs(total / count - 0.15) <= 0.01);
}

TEST_CASE("statistics: 10,000 action draws within 0.02 of 80/10/10") {
  Vocab v = word_vocab(100);
  TokenSequence seq = encode(words_of(60), nullptr, std::nullopt, v, 64);
  std::vector<int> all;
  for (int p = 1; p <= 60; ++p) all.push_back(p);
  Rng rng(23);
  std::array<int, 3> counts{};
  int draws = 0;
  while (draws < 10000) {
    MaskedExample ex = apply_replacement(seq, all, MaskPolicy(), rng, v);
    for (MaskAction a : ex.actions) {
      ++counts[static_cast<int>(a)];
      if (++draws == 10000) break;
    }
  }
  CHECK(std::abs(counts[0] / 10000.0 - 0.8) <= 0.02);
  CHECK(std::abs(counts[1] / 10000.0 - 0.1) <= 0.02);
  CHECK(std::abs(counts[2] / 10000.0 - 0.1) <= 0.02);
}

TEST_CASE("strategy draws: degenerate weights and uniform frequencies") {
  MaskPolicy syn;
  syn.strategy_weights = {1.0, 0.0, 0.0};
  MaskPolicy wwm;
  wwm.strategy_weights = {0.0, 0.0, 1.0};
  Rng rng(8);
  for (int i = 0; i < 500; ++i) {
    CHECK(choose_strategy(syn, rng) == MaskStrategy::kSynPhrase);
    CHECK(choose_strategy(wwm, rng) == MaskStrategy::kWholeWord);
  }
  std::array<int, 3> counts{};
  for (int i = 0; i < 9000; ++i) ++counts[static_cast<int>(choose_strategy(MaskPolicy(), rng))];
  for (int c : counts) CHECK(std::abs(c / 9000.0 - 1.0 / 3) <= 0.02);
}

TEST_CASE("policy validation and determinism") {
  MaskPolicy bad;
  bad.mask_probability = 0.9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  MaskPolicy bad_w;
  bad_w.strategy_weights = {0.5, 0.5, 0.5};
  CHECK_THROWS_AS(bad_w.validate(), ConfigError);
  MaskPolicy bad_rate;
  bad_rate.mask_rate = 1.5;
  CHECK_THROWS_AS(bad_rate.validate(), ConfigError);

  AnnotatedSentence s;
  s.words = words_of(12);
  s.tree = parse_ptb("(S (NP (DT w0) (NN w1)) (VP (VB w2) (NP (DT w3) (NN w4) (NN w5))) "
                     "(NP (DT w6) (NN w7) (NN w8)) (VP (VB w9) (NN w10) (NN w11)))")
               .tree;
  Vocab v = word_vocab(100);
  TokenSequence seq = encode(s.words, nullptr, std::nullopt, v, 64);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    Rng a(seed), b(seed);
    MaskedExample x = mask_sentence(seq, s, MaskPolicy(), a, v);
    MaskedExample y = mask_sentence(seq, s, MaskPolicy(), b, v);
    CHECK(x.input_ids == y.input_ids);
    CHECK(x.mask_positions == y.mask_positions);
    CHECK(x.strategy == y.strategy);
  }
}

TEST_CASE("pair mode: sentence two pieces are maskable as whole words") {
  Vocab v = word_vocab(100);
  const std::vector<std::string> two = words_of(20, 40);
  TokenSequence seq = encode(words_of(4), &two, true, v, 64);
  CHECK(maskable_positions(seq).size() == 24);
  bool saw_second = false;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    for (int p : select_positions(seq, {}, MaskPolicy(), MaskStrategy::kWholeWord, rng)) {
      CHECK(p != seq.first_sep);
      CHECK(p != seq.size() - 1);
      if (p > seq.first_sep) saw_second = true;
    }
  }
  CHECK(saw_second);
}

}  // namespace
}  // namespace lingmt
