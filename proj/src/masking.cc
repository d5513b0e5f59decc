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

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

namespace lingmt {

const char* strategy_name(MaskStrategy s) {
  switch (s) {
    case MaskStrategy::kSynPhrase:
      return "SYN_PHRASE";
    case MaskStrategy::kSemPhrase:
      return "SEM_PHRASE";
    case MaskStrategy::kWholeWord:
      return "WHOLE_WORD";
  }
  return "?";
}

const char* action_name(MaskAction a) {
  switch (a) {
    case MaskAction::kMask:
      return "MASK";
    case MaskAction::kRandom:
      return "RANDOM";
    case MaskAction::kKeep:
      return "KEEP";
  }
  return "?";
}

void MaskPolicy::validate() const {
  auto unit = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!unit(mask_rate)) throw ConfigError("mask_rate must lie in [0, 1]");
  if (!unit(mask_probability) || !unit(random_probability) ||
      !unit(keep_probability))
    throw ConfigError("replacement probabilities must lie in [0, 1]");
  if (std::fabs(mask_probability + random_probability + keep_probability -
                1.0) > 1e-9)
    throw ConfigError("replacement probabilities must sum to 1");
  double total = 0.0;
  for (double w : strategy_weights) {
    if (!unit(w)) throw ConfigError("strategy weights must lie in [0, 1]");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9)
    throw ConfigError("strategy weights must sum to 1");
  if (max_phrase_width < 1)
    throw ConfigError("max_phrase_width must be positive");
}

namespace {

// Returns the leaf span of `t` and appends internal spans to `out`.
std::pair<int, int> collect_spans(const ConstituentTree& t,
                                  std::vector<PhraseSpan>& out) {
  if (t.is_leaf()) return {t.word, t.word};
  int lo = -1, hi = -1;
  for (const auto& c : t.children) {
    auto [a, b] = collect_spans(c, out);
    if (lo < 0) lo = a;
    hi = b;
  }
  if (!t.is_preterminal())
    out.push_back({lo, hi, PhraseKind::kSyntactic, t.label});
  return {lo, hi};
}

void add_unique(std::vector<PhraseSpan>& out, std::set<std::pair<int, int>>& seen,
                PhraseSpan span, int max_width) {
  if (span.width() > max_width) return;
  if (seen.insert({span.start, span.end}).second) out.push_back(std::move(span));
}

}  // namespace

std::vector<PhraseSpan> extract_syntactic_phrases(const ConstituentTree& tree,
                                                  int max_width) {
  std::vector<PhraseSpan> all;
  auto [lo, hi] = collect_spans(tree, all);
  // Post-order puts children first; reverse so unary chains keep the top
  // label when de-duplicating.
  std::reverse(all.begin(), all.end());
  std::vector<PhraseSpan> out;
  std::set<std::pair<int, int>> seen;
  for (auto& s : all) {
    if (s.start == lo && s.end == hi) continue;
    add_unique(out, seen, std::move(s), max_width);
  }
  std::sort(out.begin(), out.end(), [](const PhraseSpan& a, const PhraseSpan& b) {
    return std::make_pair(a.start, a.end) < std::make_pair(b.start, b.end);
  });
  return out;
}

std::vector<PhraseSpan> extract_semantic_phrases(
    const std::vector<SpanFrame>& frames, int max_width) {
  std::vector<PhraseSpan> out;
  std::set<std::pair<int, int>> seen;
  for (const auto& f : frames) {
    add_unique(out, seen,
               {f.predicate, f.predicate, PhraseKind::kSemantic, "V"},
               max_width);
    for (const auto& a : f.arguments)
      add_unique(out, seen, {a.start, a.end, PhraseKind::kSemantic, a.role},
                 max_width);
  }
  std::sort(out.begin(), out.end(), [](const PhraseSpan& a, const PhraseSpan& b) {
    return std::make_pair(a.start, a.end) < std::make_pair(b.start, b.end);
  });
  return out;
}

MaskStrategy choose_strategy(const MaskPolicy& policy, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (int i = 0; i < 3; ++i) {
    acc += policy.strategy_weights[i];
    if (u < acc && policy.strategy_weights[i] > 0.0)
      return static_cast<MaskStrategy>(i);
  }
  for (int i = 2; i >= 0; --i)
    if (policy.strategy_weights[i] > 0.0) return static_cast<MaskStrategy>(i);
  return MaskStrategy::kWholeWord;
}

int mask_budget(double rate, int maskable) {
  if (maskable <= 0) return 0;
  const int budget = static_cast<int>(std::floor(rate * maskable + 0.5));
  return std::max(1, budget);
}

std::vector<int> maskable_positions(const TokenSequence& seq) {
  std::vector<int> out;
  for (const auto& [begin, end] : seq.word_pieces)
    for (int p = begin; p <= end; ++p) out.push_back(p);
  return out;
}

std::vector<int> select_positions(const TokenSequence& seq,
                                  const std::vector<PhraseSpan>& phrases,
                                  const MaskPolicy& policy,
                                  MaskStrategy strategy, Rng& rng) {
  const int maskable = static_cast<int>(maskable_positions(seq).size());
  const int budget = mask_budget(policy.mask_rate, maskable);
  std::vector<bool> chosen(seq.size(), false);
  int used = 0;

  // Tries to add the piece range [begin, end]; only unselected pieces count
  // against the budget.
  auto take = [&](int begin, int end) {
    int fresh = 0;
    for (int p = begin; p <= end; ++p) fresh += chosen[p] ? 0 : 1;
    if (fresh == 0 || used + fresh > budget) return;
    for (int p = begin; p <= end; ++p) chosen[p] = true;
    used += fresh;
  };

  if (strategy != MaskStrategy::kWholeWord) {
    const PhraseKind wanted = strategy == MaskStrategy::kSynPhrase
                                  ? PhraseKind::kSyntactic
                                  : PhraseKind::kSemantic;
    std::vector<std::pair<int, int>> units;
    for (const auto& ph : phrases) {
      if (ph.kind != wanted || ph.start < 0 ||
          ph.end >= seq.sentence_one_words || ph.start > ph.end)
        continue;
      units.emplace_back(seq.word_pieces[ph.start].first,
                         seq.word_pieces[ph.end].second);
    }
    rng.shuffle(units);
    for (const auto& [b, e] : units) {
      if (used >= budget) break;
      take(b, e);
    }
  }

  std::vector<std::pair<int, int>> words = seq.word_pieces;
  rng.shuffle(words);
  for (const auto& [b, e] : words) {
    if (used >= budget) break;
    take(b, e);
  }

  std::vector<int> out;
  for (int p = 0; p < seq.size(); ++p)
    if (chosen[p]) out.push_back(p);
  return out;
}

MaskedExample apply_replacement(const TokenSequence& seq,
                                const std::vector<int>& positions,
                                const MaskPolicy& policy, Rng& rng,
                                const Vocab& vocab) {
  MaskedExample ex;
  ex.original_ids = seq.piece_ids;
  ex.input_ids = seq.piece_ids;
  ex.segment_ids = seq.segment_ids;
  ex.nsp_label = seq.nsp_label;
  ex.mask_positions = positions;
  const int regular = vocab.size() - Vocab::kNumReserved;
  for (int p : positions) {
    const double u = rng.uniform();
    MaskAction action;
    if (u < policy.mask_probability)
      action = MaskAction::kMask;
    else if (u < policy.mask_probability + policy.random_probability)
      action = MaskAction::kRandom;
    else
      action = MaskAction::kKeep;
    if (action == MaskAction::kRandom && regular <= 0) action = MaskAction::kMask;
    switch (action) {
      case MaskAction::kMask:
        ex.input_ids[p] = Vocab::kMask;
        break;
      case MaskAction::kRandom:
        ex.input_ids[p] =
            Vocab::kNumReserved + static_cast<int>(rng.below(regular));
        break;
      case MaskAction::kKeep:
        break;
    }
    ex.actions.push_back(action);
  }
  return ex;
}

MaskedExample mask_sentence(const TokenSequence& seq,
                            const AnnotatedSentence& sentence,
                            const MaskPolicy& policy, Rng& rng,
                            const Vocab& vocab) {
  const MaskStrategy strategy = choose_strategy(policy, rng);
  std::vector<PhraseSpan> phrases;
  if (strategy == MaskStrategy::kSynPhrase && sentence.tree)
    phrases = extract_syntactic_phrases(*sentence.tree, policy.max_phrase_width);
  if (strategy == MaskStrategy::kSemPhrase && sentence.span_frames)
    phrases =
        extract_semantic_phrases(*sentence.span_frames, policy.max_phrase_width);
  std::vector<int> positions =
      select_positions(seq, phrases, policy, strategy, rng);
  MaskedExample ex = apply_replacement(seq, positions, policy, rng, vocab);
  ex.strategy = strategy;
  return ex;
}

}  // namespace lingmt
