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

// Exact decoders: head-annotated span CKY that yields a constituent tree and
// a projective dependency tree together, and the non-overlapping SRL
// argument DP.
//
// Score layouts shared with the heads:
//   span scores  span_count(n) x L, row span_index(i, j, n), column 0 is the
//                empty placeholder label
//   arc scores   n x (n + 1), entry (d, 0) scores d attaching to the root and
//                (d, h + 1) scores d attaching to word h
//   rel scores   n * (n + 1) x R, row d * (n + 1) + head column

#ifndef LINGMT_DECODERS_H_
#define LINGMT_DECODERS_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lingmt/autograd.h"
#include "lingmt/corpus.h"

namespace lingmt {

int span_index(int i, int j, int n);
int span_count(int n);
// Every (i, j) with 0 <= i <= j < n in span_index order.
std::vector<std::pair<int, int>> all_spans(int n);

struct JointSpanNode {
  int start = 0;
  int end = 0;
  int label = 0;
  int head = 0;
  int left = -1;  // Child node indices; -1 on leaves.
  int right = -1;
  bool is_leaf() const { return left < 0; }
};

struct JointSpanTree {
  std::vector<JointSpanNode> nodes;  // Children precede parents.
  int root = -1;
  std::vector<int> dep_heads;   // 1-based, 0 = root.
  std::vector<int> dep_labels;  // Relation index per word; empty if unset.
  double score = 0.0;

  int size() const { return static_cast<int>(dep_heads.size()); }
  // Throws InvariantError on any structural violation: span coverage, head
  // inheritance, leaf heads, arc derivation or label range.
  void validate(int n, int num_labels) const;
};

// Arcs implied by a head-annotated binary tree.
std::vector<int> derive_dep_heads(const JointSpanTree& tree, int n);

// Sum of node label scores and derived arc scores.
double tree_score(const JointSpanTree& tree, const Matrix& span_scores,
                  const Matrix& arc_scores);

// Exact argmax. Ties prefer the smaller split, then the head on the left,
// then the smaller head/label index. Relations are filled by argmax when
// rel_scores is given. Throws ShapeError for n = 0 or mis-shaped inputs and
// NumericError for non-finite scores (-inf arc scores are allowed).
JointSpanTree joint_span_cky(const Matrix& span_scores, const Matrix& arc_scores,
                             const Matrix* rel_scores, int n);

void assign_relations(JointSpanTree& tree, const Matrix& rel_scores);

// Joined label of each collapsed unary chain ("S+VP") in `tree`.
std::vector<std::string> collapsed_labels(const ConstituentTree& tree);

// Binarizes a gold tree using gold dependency heads to pick head children.
// Returns nullopt (with `reason`) when some constituent has no unique head
// word, the derived arcs differ from `dep_heads`, or a label is missing from
// `labels` (index 0 must be the empty label).
std::optional<JointSpanTree> gold_joint_tree(const ConstituentTree& tree,
                                             const std::vector<int>& dep_heads,
                                             const std::vector<std::string>& labels,
                                             std::string* reason = nullptr);

// n-ary tree with placeholder nodes spliced out, joined labels expanded and
// `pos` tags as preterminals.
ConstituentTree to_constituent_tree(const JointSpanTree& tree,
                                    const std::vector<std::string>& labels,
                                    const std::vector<std::string>& pos);

enum class SrlStyle { kSpan, kDependency };
const char* srl_style_name(SrlStyle style);

struct SrlArgument {
  int start = 0;
  int end = 0;  // Equal to start in dependency style.
  int role = 0;
  double margin = 0.0;
  bool operator==(const SrlArgument&) const = default;
};

struct SrlSelection {
  int predicate = 0;
  std::vector<SrlArgument> arguments;  // Sorted by start.
  double total = 0.0;
};

// role_scores is units x (R + 1) with column 0 the null role; units are word
// spans (span style) or single words (dependency style, start == end).
SrlSelection srl_decode(const Matrix& role_scores,
                        const std::vector<std::pair<int, int>>& units,
                        SrlStyle style, int predicate = 0);

// Words whose logit is strictly positive.
std::vector<int> predict_predicates(const std::vector<double>& logits);

}  // namespace lingmt

#endif  // LINGMT_DECODERS_H_
