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

#include "lingmt/metrics.h"

#include <map>
#include <tuple>

#include "lingmt/common.h"

namespace lingmt {

double PRF::precision() const {
  return predicted == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(predicted);
}

double PRF::recall() const {
  return gold == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(gold);
}

double PRF::f1() const {
  const double p = precision(), r = recall();
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

PRF& PRF::operator+=(const PRF& other) {
  matched += other.matched;
  predicted += other.predicted;
  gold += other.gold;
  return *this;
}

nlohmann::json PRF::to_json() const {
  return {{"precision", precision()}, {"recall", recall()}, {"f1", f1()},
          {"matched", matched},       {"predicted", predicted}, {"gold", gold}};
}

namespace {

template <typename Key>
PRF multiset_prf(const std::vector<Key>& predicted, const std::vector<Key>& gold) {
  std::map<Key, long> counts;
  for (const auto& k : gold) ++counts[k];
  PRF r;
  r.predicted = static_cast<long>(predicted.size());
  r.gold = static_cast<long>(gold.size());
  for (const auto& k : predicted) {
    auto it = counts.find(k);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++r.matched;
    }
  }
  return r;
}

using Bracket = std::tuple<std::string, int, int>;

std::pair<int, int> brackets(const ConstituentTree& t, std::vector<Bracket>& out) {
  if (t.is_leaf()) return {t.word, t.word};
  int lo = -1, hi = -1;
  for (const auto& c : t.children) {
    auto [a, b] = brackets(c, out);
    if (lo < 0) lo = a;
    hi = b;
  }
  if (!t.is_preterminal() && !t.label.empty()) out.emplace_back(t.label, lo, hi);
  return {lo, hi};
}

}  // namespace

PRF bracket_prf(const ConstituentTree& predicted, const ConstituentTree& gold) {
  if (tree_leaves(predicted).size() != tree_leaves(gold).size())
    throw ShapeError("bracket_prf: trees cover different word counts");
  std::vector<Bracket> p, g;
  brackets(predicted, p);
  brackets(gold, g);
  return multiset_prf(p, g);
}

PRF bracket_prf(const std::vector<ConstituentTree>& predicted,
                const std::vector<ConstituentTree>& gold) {
  if (predicted.size() != gold.size()) throw ShapeError("bracket_prf: corpus sizes differ");
  PRF total;
  for (size_t i = 0; i < gold.size(); ++i) total += bracket_prf(predicted[i], gold[i]);
  return total;
}

double AttachmentScore::uas() const {
  return total == 0 ? 0.0 : static_cast<double>(head_correct) / static_cast<double>(total);
}

double AttachmentScore::las() const {
  return total == 0 ? 0.0 : static_cast<double>(labeled_correct) / static_cast<double>(total);
}

AttachmentScore& AttachmentScore::operator+=(const AttachmentScore& other) {
  total += other.total;
  head_correct += other.head_correct;
  labeled_correct += other.labeled_correct;
  return *this;
}

nlohmann::json AttachmentScore::to_json() const {
  return {{"uas", uas()}, {"las", las()}, {"total", total},
          {"head_correct", head_correct}, {"labeled_correct", labeled_correct}};
}

const std::set<std::string>& default_punctuation_tags() {
  static const std::set<std::string> kTags = {"``", "''", ":", ",", "."};
  return kTags;
}

AttachmentScore uas_las(const std::vector<int>& predicted_heads,
                        const std::vector<std::string>& predicted_labels,
                        const std::vector<int>& gold_heads,
                        const std::vector<std::string>& gold_labels,
                        const std::vector<std::string>& gold_tags,
                        const std::set<std::string>& punctuation) {
  const size_t n = gold_heads.size();
  if (predicted_heads.size() != n || predicted_labels.size() != n || gold_labels.size() != n ||
      (!gold_tags.empty() && gold_tags.size() != n))
    throw ShapeError("uas_las: sequence lengths differ");
  AttachmentScore s;
  for (size_t i = 0; i < n; ++i) {
    if (!gold_tags.empty() && punctuation.count(gold_tags[i])) continue;
    ++s.total;
    if (predicted_heads[i] != gold_heads[i]) continue;
    ++s.head_correct;
    if (predicted_labels[i] == gold_labels[i]) ++s.labeled_correct;
  }
  return s;
}

PRF srl_prf(const std::vector<SpanFrame>& predicted, const std::vector<SpanFrame>& gold) {
  using Key = std::tuple<int, int, int, std::string>;
  auto tuples = [](const std::vector<SpanFrame>& frames) {
    std::vector<Key> out;
    for (const auto& f : frames) {
      out.emplace_back(f.predicate, -1, -1, "V");
      for (const auto& a : f.arguments) out.emplace_back(f.predicate, a.start, a.end, a.role);
    }
    return out;
  };
  return multiset_prf(tuples(predicted), tuples(gold));
}

PRF srl_prf(const std::vector<DepFrame>& predicted, const std::vector<DepFrame>& gold) {
  using Key = std::tuple<int, int, std::string>;
  auto tuples = [](const std::vector<DepFrame>& frames) {
    std::vector<Key> out;
    for (const auto& f : frames) {
      out.emplace_back(f.predicate, -1, "V");
      for (const auto& a : f.arguments) out.emplace_back(f.predicate, a.word, a.role);
    }
    return out;
  };
  return multiset_prf(tuples(predicted), tuples(gold));
}

double Accuracy::value() const {
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

Accuracy pos_accuracy(const std::vector<std::vector<std::string>>& predicted,
                      const std::vector<std::vector<std::string>>& gold) {
  if (predicted.size() != gold.size()) throw ShapeError("pos_accuracy: corpus sizes differ");
  Accuracy a;
  for (size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i].size() != gold[i].size())
      throw ShapeError("pos_accuracy: sentence " + std::to_string(i) + " lengths differ");
    for (size_t w = 0; w < gold[i].size(); ++w) a.correct += predicted[i][w] == gold[i][w] ? 1 : 0;
    a.total += static_cast<long>(gold[i].size());
  }
  if (a.total == 0) throw InvariantError("pos_accuracy is undefined on an empty corpus");
  return a;
}

}  // namespace lingmt
