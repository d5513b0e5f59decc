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

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <map>
#include <set>

#include "lingmt/common.h"

namespace lingmt {

namespace {

constexpr std::string_view kContinuation = "##";

bool is_continuation(std::string_view token) {
  return token.size() > 2 && token.substr(0, 2) == kContinuation;
}

}  // namespace

const std::vector<std::string>& Vocab::reserved_tokens() {
  static const std::vector<std::string> kReserved = {"[PAD]", "[UNK]", "[CLS]",
                                                     "[SEP]", "[MASK]"};
  return kReserved;
}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  const auto& reserved = reserved_tokens();
  if (tokens_.size() < reserved.size())
    throw InvariantError("vocabulary is missing reserved tokens");
  for (size_t i = 0; i < reserved.size(); ++i) {
    if (tokens_[i] != reserved[i])
      throw InvariantError("reserved token " + reserved[i] +
                           " must have id " + std::to_string(i));
  }
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i].empty()) throw InvariantError("empty vocabulary token");
    if (!ids_.emplace(tokens_[i], static_cast<int>(i)).second)
      throw InvariantError("duplicate vocabulary token '" + tokens_[i] + "'");
  }
}

std::optional<int> Vocab::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::string Vocab::serialize() const {
  std::string out;
  for (const auto& t : tokens_) {
    out += t;
    out += '\n';
  }
  return out;
}

Vocab Vocab::parse(std::string_view text) {
  std::vector<std::string> tokens;
  for (std::string_view line : split_lines(text))
    tokens.emplace_back(line);
  return Vocab(std::move(tokens));
}

uint64_t Vocab::hash() const { return fnv1a64(serialize()); }

std::string normalize_word(std::string_view word) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(word.data(), static_cast<int32_t>(word.size())));
  icu::UnicodeString normalized = U_SUCCESS(status)
                                      ? nfc->normalize(text, status)
                                      : text;
  if (U_FAILURE(status)) normalized = text;
  normalized.toLower(icu::Locale::getRoot());
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::vector<std::string> utf8_chars(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    const unsigned char c = static_cast<unsigned char>(text[i]);
    size_t len = 1;
    if (c >= 0xF0)
      len = 4;
    else if (c >= 0xE0)
      len = 3;
    else if (c >= 0xC0)
      len = 2;
    len = std::min(len, text.size() - i);
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

Vocab build_vocab(const std::vector<std::string>& corpus_words,
                  int target_size) {
  std::map<std::string, long> counts;
  for (const auto& w : corpus_words) {
    std::string norm = normalize_word(w);
    if (!norm.empty()) ++counts[norm];
  }
  if (counts.empty()) throw ConfigError("cannot build a vocabulary from an empty corpus");

  std::vector<std::vector<std::string>> symbols;
  std::vector<long> freq;
  std::set<std::string> alphabet;
  for (const auto& [word, count] : counts) {
    std::vector<std::string> chars = utf8_chars(word);
    for (size_t i = 1; i < chars.size(); ++i)
      chars[i] = std::string(kContinuation) + chars[i];
    for (const auto& c : chars) alphabet.insert(c);
    symbols.push_back(std::move(chars));
    freq.push_back(count);
  }
  const int floor = Vocab::kNumReserved + static_cast<int>(alphabet.size());
  if (target_size < floor)
    throw ConfigError("vocabulary size " + std::to_string(target_size) +
                      " is below reserved + alphabet size " +
                      std::to_string(floor));

  std::vector<std::string> tokens = Vocab::reserved_tokens();
  std::set<std::string> present(alphabet.begin(), alphabet.end());
  tokens.insert(tokens.end(), alphabet.begin(), alphabet.end());

  while (static_cast<int>(tokens.size()) < target_size) {
    std::map<std::pair<std::string, std::string>, long> pairs;
    for (size_t w = 0; w < symbols.size(); ++w) {
      const auto& s = symbols[w];
      for (size_t i = 0; i + 1 < s.size(); ++i) pairs[{s[i], s[i + 1]}] += freq[w];
    }
    if (pairs.empty()) break;
    auto best = pairs.begin();
    for (auto it = pairs.begin(); it != pairs.end(); ++it)
      if (it->second > best->second) best = it;
    const std::string left = best->first.first;
    const std::string right = best->first.second;
    const std::string merged = left + right.substr(kContinuation.size());
    if (present.insert(merged).second) tokens.push_back(merged);
    for (auto& s : symbols) {
      std::vector<std::string> next;
      next.reserve(s.size());
      for (size_t i = 0; i < s.size(); ++i) {
        if (i + 1 < s.size() && s[i] == left && s[i + 1] == right) {
          next.push_back(merged);
          ++i;
        } else {
          next.push_back(s[i]);
        }
      }
      s = std::move(next);
    }
  }
  return Vocab(std::move(tokens));
}

std::vector<int> tokenize_word(std::string_view word, const Vocab& vocab) {
  const std::vector<std::string> chars = utf8_chars(normalize_word(word));
  if (chars.empty()) return {Vocab::kUnk};
  std::vector<int> pieces;
  size_t start = 0;
  while (start < chars.size()) {
    std::optional<int> match;
    size_t match_end = start;
    std::string candidate;
    for (size_t i = start; i < chars.size(); ++i) candidate += chars[i];
    for (size_t end = chars.size(); end > start; --end) {
      const std::string piece =
          start == 0 ? candidate : std::string(kContinuation) + candidate;
      if (auto id = vocab.find(piece); id && !Vocab::is_reserved(*id)) {
        match = id;
        match_end = end;
        break;
      }
      candidate.resize(candidate.size() - chars[end - 1].size());
    }
    if (!match) return {Vocab::kUnk};
    pieces.push_back(*match);
    start = match_end;
  }
  return pieces;
}

std::string detokenize(const std::vector<int>& pieces, const Vocab& vocab) {
  std::string out;
  for (int id : pieces) {
    const std::string& t = vocab.token(id);
    out += is_continuation(t) ? t.substr(kContinuation.size()) : t;
  }
  return out;
}

TokenSequence encode(const std::vector<std::string>& first,
                     const std::vector<std::string>* second,
                     std::optional<bool> is_next, const Vocab& vocab,
                     int max_length) {
  TokenSequence seq;
  seq.piece_ids.push_back(Vocab::kCls);
  seq.segment_ids.push_back(0);
  for (const auto& w : first) {
    const std::vector<int> pieces = tokenize_word(w, vocab);
    const int begin = seq.size();
    for (int p : pieces) {
      seq.piece_ids.push_back(p);
      seq.segment_ids.push_back(0);
    }
    seq.word_pieces.emplace_back(begin, seq.size() - 1);
    seq.word_last_piece.push_back(seq.size() - 1);
  }
  seq.first_sep = seq.size();
  seq.piece_ids.push_back(Vocab::kSep);
  seq.segment_ids.push_back(0);
  seq.sentence_one_words = static_cast<int>(first.size());
  if (seq.size() > max_length)
    throw TruncationError("sentence of " + std::to_string(first.size()) +
                          " words needs " + std::to_string(seq.size()) +
                          " pieces, above the maximum " +
                          std::to_string(max_length));
  if (second == nullptr) return seq;

  std::vector<std::vector<int>> kept;
  int length = seq.size() + 1;  // Closing [SEP].
  for (const auto& w : *second) {
    std::vector<int> pieces = tokenize_word(w, vocab);
    if (length + static_cast<int>(pieces.size()) > max_length) break;
    length += static_cast<int>(pieces.size());
    kept.push_back(std::move(pieces));
  }
  if (kept.empty()) return seq;
  for (const auto& pieces : kept) {
    const int begin = seq.size();
    for (int p : pieces) {
      seq.piece_ids.push_back(p);
      seq.segment_ids.push_back(1);
    }
    seq.word_pieces.emplace_back(begin, seq.size() - 1);
  }
  seq.piece_ids.push_back(Vocab::kSep);
  seq.segment_ids.push_back(1);
  seq.nsp_label = is_next.value_or(true);
  return seq;
}

}  // namespace lingmt
