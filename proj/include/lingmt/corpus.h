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

// Annotated sentences and the readers/writers for the gold treebank and SRL
// formats (PTB brackets, CoNLL-2005 props, CoNLL-2009 columns) plus the
// line-delimited silver interchange format.

#ifndef LINGMT_CORPUS_H_
#define LINGMT_CORPUS_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lingmt {

// A constituent tree node. Leaves hold a word index; every other node holds
// a label and at least one child. A preterminal is a node whose only child is
// a leaf; its label is the word's POS tag.
struct ConstituentTree {
  std::string label;
  std::vector<ConstituentTree> children;
  int word = -1;

  static ConstituentTree leaf(int word_index);
  bool is_leaf() const { return word >= 0; }
  bool is_preterminal() const {
    return children.size() == 1 && children[0].is_leaf();
  }
  bool operator==(const ConstituentTree& other) const = default;
};

// Leaves visited left to right.
std::vector<int> tree_leaves(const ConstituentTree& tree);
// Preterminal labels in word order.
std::vector<std::string> tree_preterminals(const ConstituentTree& tree);
// Throws InvariantError unless the leaves enumerate 0..n-1 exactly once and
// every internal node has a child.
void validate_tree(const ConstituentTree& tree, int n);

// A PTB tree together with the surface words at its leaves.
struct ParsedTree {
  ConstituentTree tree;
  std::vector<std::string> words;
};

// Parses one bracketed tree. Function tags and indices are stripped, -NONE-
// leaves and their emptied ancestors are removed, and an unlabeled root with
// a single child is unwrapped.
ParsedTree parse_ptb(std::string_view text);
// Parses every tree in a .mrg-style file.
std::vector<ParsedTree> read_ptb(std::string_view text);
// One-line bracketing; parentheses in words are written as -LRB-/-RRB-.
std::string write_ptb(const ConstituentTree& tree,
                      const std::vector<std::string>& words);

struct SpanArgument {
  int start = 0;
  int end = 0;
  std::string role;
  bool operator==(const SpanArgument&) const = default;
};

struct SpanFrame {
  int predicate = 0;
  std::vector<SpanArgument> arguments;
  bool operator==(const SpanFrame&) const = default;
};

struct DepArgument {
  int word = 0;
  std::string role;
  bool operator==(const DepArgument&) const = default;
};

struct DepFrame {
  int predicate = 0;
  std::vector<DepArgument> arguments;
  bool operator==(const DepFrame&) const = default;
};

enum class Provenance { kGold, kSilver };

const char* provenance_name(Provenance p);

// Word indices are 0-based everywhere except dep_heads, which follows the
// CoNLL convention: 0 is the root and k refers to word k-1.
struct AnnotatedSentence {
  std::vector<std::string> words;
  std::optional<std::vector<std::string>> pos_tags;
  std::optional<ConstituentTree> tree;
  std::optional<std::vector<int>> dep_heads;
  std::optional<std::vector<std::string>> dep_labels;
  std::optional<std::vector<SpanFrame>> span_frames;
  std::optional<std::vector<DepFrame>> dep_frames;
  Provenance provenance = Provenance::kGold;

  int size() const { return static_cast<int>(words.size()); }
  // Throws InvariantError on any length, index, tree or overlap violation.
  void validate() const;
  bool operator==(const AnnotatedSentence&) const = default;
};

// Throws InvariantError unless heads form a single-rooted tree.
void validate_dep_tree(const std::vector<int>& heads);

// Builds sentences from PTB trees: words, POS tags from preterminals, tree.
std::vector<AnnotatedSentence> sentences_from_ptb(std::string_view text);

std::vector<AnnotatedSentence> read_conll2005(std::string_view text);
std::string write_conll2005(const std::vector<AnnotatedSentence>& sentences);

std::vector<AnnotatedSentence> read_conll2009(std::string_view text);
std::string write_conll2009(const std::vector<AnnotatedSentence>& sentences);

std::vector<AnnotatedSentence> read_silver(std::string_view text);
std::string write_silver(const std::vector<AnnotatedSentence>& sentences);

// Unions annotations of sentences with identical word sequences. The first
// corpus fixes the order; unmatched sentences of later corpora are appended.
std::vector<AnnotatedSentence> merge_annotations(
    const std::vector<std::vector<AnnotatedSentence>>& corpora);

// One whitespace-tokenized sentence per non-blank line.
std::vector<std::vector<std::string>> read_raw_text(std::string_view text);

enum class DataSource { kGold, kSilver };

struct MixerPolicy {
  double gold_probability = 0.10;
  uint64_t rng_seed = 0;
  void validate() const;
};

// Stateless draw: the source of draw `index` is a function of the seed and
// the index alone.
DataSource draw_source(const MixerPolicy& policy, uint64_t index);

// Sequential gold/silver chooser for one training run.
class SourceMixer {
 public:
  SourceMixer(MixerPolicy policy, size_t gold_count, size_t silver_count);
  DataSource next_source();
  uint64_t draws() const { return draws_; }

 private:
  MixerPolicy policy_;
  size_t gold_count_;
  size_t silver_count_;
  uint64_t draws_ = 0;
};

}  // namespace lingmt

#endif  // LINGMT_CORPUS_H_
