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

// Corpus-level evaluation: labeled brackets, attachment scores, SRL tuples
// and POS accuracy. Every scorer accumulates counts, so corpus totals are
// independent of sentence order.

#ifndef LINGMT_METRICS_H_
#define LINGMT_METRICS_H_

#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "lingmt/corpus.h"

namespace lingmt {

struct PRF {
  long matched = 0;
  long predicted = 0;
  long gold = 0;

  double precision() const;
  double recall() const;
  double f1() const;
  PRF& operator+=(const PRF& other);
  nlohmann::json to_json() const;
};

// (label, start, end) multiset over labeled non-preterminal nodes, root
// included. Nodes with an empty label are not brackets. Throws ShapeError
// when a pair covers different word counts.
PRF bracket_prf(const ConstituentTree& predicted, const ConstituentTree& gold);
PRF bracket_prf(const std::vector<ConstituentTree>& predicted,
                const std::vector<ConstituentTree>& gold);

struct AttachmentScore {
  long total = 0;
  long head_correct = 0;
  long labeled_correct = 0;

  double uas() const;
  double las() const;
  AttachmentScore& operator+=(const AttachmentScore& other);
  nlohmann::json to_json() const;
};

const std::set<std::string>& default_punctuation_tags();

// Words whose gold tag is in `punctuation` are skipped; `gold_tags` may be
// empty to score every word. Throws ShapeError on length mismatches.
AttachmentScore uas_las(const std::vector<int>& predicted_heads,
                        const std::vector<std::string>& predicted_labels,
                        const std::vector<int>& gold_heads,
                        const std::vector<std::string>& gold_labels,
                        const std::vector<std::string>& gold_tags = {},
                        const std::set<std::string>& punctuation = default_punctuation_tags());

// Exact tuple match: (predicate, start, end, role) for spans and
// (predicate, word, role) for dependencies, plus one (predicate, "V") tuple
// per frame.
PRF srl_prf(const std::vector<SpanFrame>& predicted, const std::vector<SpanFrame>& gold);
PRF srl_prf(const std::vector<DepFrame>& predicted, const std::vector<DepFrame>& gold);

struct Accuracy {
  long correct = 0;
  long total = 0;
  double value() const;
};

// Throws ShapeError on length mismatches and InvariantError on an empty
// corpus.
Accuracy pos_accuracy(const std::vector<std::vector<std::string>>& predicted,
                      const std::vector<std::vector<std::string>>& gold);

}  // namespace lingmt

#endif  // LINGMT_METRICS_H_
