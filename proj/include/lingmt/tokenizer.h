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

// Subword vocabulary, greedy longest-match wordpiece segmentation and
// [CLS]/[SEP] sequence framing.

#ifndef LINGMT_TOKENIZER_H_
#define LINGMT_TOKENIZER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lingmt {

// Bidirectional token <-> id map. Ids are dense from 0 and the five reserved
// tokens come first. Continuation pieces carry a "##" prefix.
class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;
  static constexpr int kMask = 4;
  static constexpr int kNumReserved = 5;
  static const std::vector<std::string>& reserved_tokens();

  Vocab() = default;
  // Throws InvariantError unless the reserved tokens lead, once each, and
  // no token repeats.
  explicit Vocab(std::vector<std::string> tokens);

  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const { return tokens_.at(id); }
  std::optional<int> find(std::string_view token) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  static bool is_reserved(int id) { return id >= 0 && id < kNumReserved; }

  // One token per line; line number = id.
  std::string serialize() const;
  static Vocab parse(std::string_view text);
  // FNV-1a of the serialized form.
  uint64_t hash() const;

  bool operator==(const Vocab& other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> ids_;
};

// NFC normalization followed by lowercasing.
std::string normalize_word(std::string_view word);
// UTF-8 code points of `text` as separate strings.
std::vector<std::string> utf8_chars(std::string_view text);

// BPE-style merging over word frequencies until `target_size` tokens exist
// or no pair remains. Ties between equally frequent pairs go to the
// lexicographically smallest pair.
Vocab build_vocab(const std::vector<std::string>& corpus_words,
                  int target_size);

// Greedy longest-match-first segmentation; [UNK] alone when no segmentation
// exists.
std::vector<int> tokenize_word(std::string_view word, const Vocab& vocab);
// Concatenates pieces with "##" stripped.
std::string detokenize(const std::vector<int>& pieces, const Vocab& vocab);

struct TokenSequence {
  std::vector<int> piece_ids;
  std::vector<int> segment_ids;
  // Final piece of each word of sentence one.
  std::vector<int> word_last_piece;
  // Inclusive piece range of every word of both sentences, in order. The
  // first `sentence_one_words` entries belong to sentence one.
  std::vector<std::pair<int, int>> word_pieces;
  int sentence_one_words = 0;
  // Index of the [SEP] closing sentence one.
  int first_sep = 0;
  std::optional<bool> nsp_label;

  int size() const { return static_cast<int>(piece_ids.size()); }
};

// Frames [CLS] s1 [SEP] or, with `second`, [CLS] s1 [SEP] s2 [SEP]. Sentence
// two is trimmed at word boundaries to fit `max_length`, and dropped when no
// word of it fits; sentence one is never trimmed: if it does not fit, a
// TruncationError is thrown.
TokenSequence encode(const std::vector<std::string>& first,
                     const std::vector<std::string>* second,
                     std::optional<bool> is_next, const Vocab& vocab,
                     int max_length);

}  // namespace lingmt

#endif  // LINGMT_TOKENIZER_H_
