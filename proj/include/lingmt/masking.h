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

// Linguistically guided masking: syntactic phrase, semantic phrase and whole
// word strategies under a fixed piece budget, followed by the
// [MASK]/random/keep replacement scheme.

#ifndef LINGMT_MASKING_H_
#define LINGMT_MASKING_H_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "lingmt/common.h"
#include "lingmt/corpus.h"
#include "lingmt/tokenizer.h"

namespace lingmt {

enum class PhraseKind { kSyntactic, kSemantic };

// Inclusive word span of sentence one.
struct PhraseSpan {
  int start = 0;
  int end = 0;
  PhraseKind kind = PhraseKind::kSyntactic;
  std::string label;
  int width() const { return end - start + 1; }
};

enum class MaskStrategy { kSynPhrase = 0, kSemPhrase = 1, kWholeWord = 2 };
enum class MaskAction { kMask, kRandom, kKeep };

const char* strategy_name(MaskStrategy s);
const char* action_name(MaskAction a);

struct MaskPolicy {
  double mask_rate = 0.15;
  double mask_probability = 0.8;
  double random_probability = 0.1;
  double keep_probability = 0.1;
  // SYN_PHRASE, SEM_PHRASE, WHOLE_WORD.
  std::array<double, 3> strategy_weights = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  int max_phrase_width = 10;

  // Throws ConfigError on out-of-range probabilities or weights that do not
  // sum to 1.
  void validate() const;
};

struct MaskedExample {
  std::vector<int> input_ids;
  std::vector<int> original_ids;
  std::vector<int> mask_positions;
  std::vector<MaskAction> actions;  // Parallel to mask_positions.
  std::vector<int> segment_ids;
  std::optional<bool> nsp_label;
  MaskStrategy strategy = MaskStrategy::kWholeWord;
};

// Spans of internal non-preterminal nodes, excluding the whole sentence and
// spans wider than `max_width`. Spans repeated by unary chains appear once.
std::vector<PhraseSpan> extract_syntactic_phrases(const ConstituentTree& tree,
                                                  int max_width = 10);

// One span per argument and one width-1 span per predicate, de-duplicated.
std::vector<PhraseSpan> extract_semantic_phrases(
    const std::vector<SpanFrame>& frames, int max_width = 10);

MaskStrategy choose_strategy(const MaskPolicy& policy, Rng& rng);

// round-half-up(rate * maskable), at least 1 when maskable > 0.
int mask_budget(double rate, int maskable);

// Piece positions eligible for masking: every piece except [CLS]/[SEP].
std::vector<int> maskable_positions(const TokenSequence& seq);

// Sorted piece indices. Phrase units are taken in random order and skipped
// when they would overshoot the budget; remaining budget is filled by whole
// words. Without phrases the result equals the WHOLE_WORD selection.
std::vector<int> select_positions(const TokenSequence& seq,
                                  const std::vector<PhraseSpan>& phrases,
                                  const MaskPolicy& policy,
                                  MaskStrategy strategy, Rng& rng);

MaskedExample apply_replacement(const TokenSequence& seq,
                                const std::vector<int>& positions,
                                const MaskPolicy& policy, Rng& rng,
                                const Vocab& vocab);

// Strategy draw, phrase extraction for the drawn strategy, selection and
// replacement in one call.
MaskedExample mask_sentence(const TokenSequence& seq,
                            const AnnotatedSentence& sentence,
                            const MaskPolicy& policy, Rng& rng,
                            const Vocab& vocab);

}  // namespace lingmt

#endif  // LINGMT_MASKING_H_
