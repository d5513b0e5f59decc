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

#include "lingmt/tokenizer.h"

#include <doctest.h>

#include "lingmt/common.h"

namespace lingmt {
namespace {

Vocab make_vocab(std::vector<std::string> extra) {
  std::vector<std::string> t = Vocab::reserved_tokens();
  t.insert(t.end(), extra.begin(), extra.end());
  return Vocab(t);
}

std::vector<std::string> pieces(const std::string& w, const Vocab& v) {
  std::vector<std::string> out;
  for (int id : tokenize_word(w, v)) out.push_back(v.token(id));
  return out;
}

TEST_CASE("vocab: reserved ids and file round trip") {
  Vocab v = make_vocab({"a", "##b"});
  CHECK(v.token(Vocab::kPad) == "[PAD]");
  CHECK(v.token(Vocab::kUnk) == "[UNK]");
  CHECK(v.token(Vocab::kCls) == "[CLS]");
  CHECK(v.token(Vocab::kSep) == "[SEP]");
  CHECK(v.token(Vocab::kMask) == "[MASK]");
  CHECK(*v.find("##b") == 6);
  const std::string text = v.serialize();
  Vocab back = Vocab::parse(text);
  CHECK(back == v);
  CHECK(back.serialize() == text);
  CHECK(back.hash() == v.hash());
  CHECK_THROWS_AS(Vocab({"[UNK]", "[PAD]", "[CLS]", "[SEP]", "[MASK]"}), InvariantError);
  CHECK_THROWS_AS(make_vocab({"a", "a"}), InvariantError);
}

TEST_CASE("build_vocab: dominant pair merges, bounds, determinism") {
  std::vector<std::string> corpus(10, "aa");
  Vocab v = build_vocab(corpus, 10);
  CHECK(v.find("aa").has_value());
  CHECK(pieces("aa", v) == std::vector<std::string>{"aa"});

  CHECK_THROWS_AS(build_vocab({"abc"}, 6), ConfigError);
  CHECK_THROWS_AS(build_vocab({}, 100), ConfigError);

  const std::vector<std::string> words = {"lower", "lowest", "newer", "wider", "low", "new"};
  Vocab a = build_vocab(words, 40);
  Vocab b = build_vocab(words, 40);
  CHECK(a == b);
  for (const auto& w : words) CHECK(detokenize(tokenize_word(w, a), a) == w);
}

TEST_CASE("tokenize_word: greedy longest match and fallback") {
  Vocab v = make_vocab({"a", "b", "c", "##a", "##b", "##c", "ab", "abc"});
  CHECK(pieces("abc", v) == std::vector<std::string>{"abc"});
  Vocab w = make_vocab({"a", "b", "c", "##b", "##c", "ab"});
  CHECK(pieces("abc", w) == std::vector<std::string>{"ab", "##c"});
  CHECK(pieces("xyz", w) == std::vector<std::string>{"[UNK]"});
  CHECK(pieces("ABC", w) == std::vector<std::string>{"ab", "##c"});
  // Composed and decomposed e-acute normalize to the same piece.
  Vocab e = make_vocab({"\xC3\xA9"});
  CHECK(pieces("e\xCC\x81", e) == std::vector<std::string>{"\xC3\xA9"});
}

TEST_CASE("encode: framing and alignment") {
  Vocab v = make_vocab({"a", "b", "c", "##b", "##c", "cat"});
  TokenSequence one = encode({"cat"}, nullptr, std::nullopt, v, 128);
  CHECK(one.size() == 3);
  CHECK(one.piece_ids.front() == Vocab::kCls);
  CHECK(one.piece_ids.back() == Vocab::kSep);
  CHECK(one.word_last_piece == std::vector<int>{1});
  CHECK_FALSE(one.nsp_label.has_value());

  TokenSequence three = encode({"abc"}, nullptr, std::nullopt, v, 128);
  CHECK(three.size() == 5);
  CHECK(three.word_last_piece == std::vector<int>{3});

  const std::vector<std::string> s2 = {"cat", "a"};
  TokenSequence pair = encode({"cat", "b"}, &s2, true, v, 128);
  CHECK(pair.piece_ids == std::vector<int>{Vocab::kCls, *v.find("cat"), *v.find("b"), Vocab::kSep,
                                           *v.find("cat"), *v.find("a"), Vocab::kSep});
  CHECK(pair.segment_ids == std::vector<int>{0, 0, 0, 0, 1, 1, 1});
  CHECK(pair.word_last_piece == std::vector<int>{1, 2});
  CHECK(pair.first_sep == 3);
  REQUIRE(pair.nsp_label.has_value());
  CHECK(*pair.nsp_label);
  TokenSequence neg = encode({"cat"}, &s2, false, v, 128);
  CHECK_FALSE(*neg.nsp_label);

  CHECK_THROWS_AS(encode({"abc", "abc"}, nullptr, std::nullopt, v, 7), TruncationError);
  // Sentence two is trimmed word by word, never sentence one.
  TokenSequence trimmed = encode({"cat"}, &s2, true, v, 5);
  CHECK(trimmed.size() == 5);
  CHECK(trimmed.word_pieces.size() == 2);
}

TEST_CASE("encode: word_last_piece is strictly increasing over random sentences") {
  const std::vector<std::string> words = {"the", "market", "sells", "products", "federal",
                                          "paper", "board", "reported", "a"};
  Vocab v = build_vocab(words, 30);
  Rng rng(5);
  for (int k = 0; k < 200; ++k) {
    std::vector<std::string> s;
    const int n = 1 + static_cast<int>(rng.below(12));
    for (int i = 0; i < n; ++i) s.push_back(words[rng.below(words.size())]);
    TokenSequence seq = encode(s, nullptr, std::nullopt, v, 128);
    REQUIRE(seq.word_last_piece.size() == s.size());
    for (size_t i = 0; i < s.size(); ++i) {
      CHECK(seq.word_last_piece[i] > 0);
      CHECK(seq.word_last_piece[i] < seq.first_sep);
      if (i > 0) CHECK(seq.word_last_piece[i] > seq.word_last_piece[i - 1]);
      const auto [b, e] = seq.word_pieces[i];
      std::vector<int> ids(seq.piece_ids.begin() + b, seq.piece_ids.begin() + e + 1);
      CHECK(detokenize(ids, v) == s[i]);
    }
  }
}

}  // namespace
}  // namespace lingmt
