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

#include "lingmt/decoders.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "lingmt/common.h"

namespace lingmt {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string describe(int i, int j) {
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

int span_index(int i, int j, int n) {
  // Rows of all spans starting before i, then the offset within row i.
  return i * n - i * (i - 1) / 2 + (j - i);
}

int span_count(int n) { return n * (n + 1) / 2; }

std::vector<std::pair<int, int>> all_spans(int n) {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<size_t>(span_count(n)));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) out.emplace_back(i, j);
  return out;
}

std::vector<int> derive_dep_heads(const JointSpanTree& tree, int n) {
  std::vector<int> heads(static_cast<size_t>(n), -1);
  for (const auto& node : tree.nodes) {
    if (node.is_leaf()) continue;
    const auto& l = tree.nodes[static_cast<size_t>(node.left)];
    const auto& r = tree.nodes[static_cast<size_t>(node.right)];
    const int dependent = l.head == node.head ? r.head : l.head;
    heads[static_cast<size_t>(dependent)] = node.head + 1;
  }
  if (tree.root >= 0) heads[static_cast<size_t>(tree.nodes[static_cast<size_t>(tree.root)].head)] = 0;
  return heads;
}

void JointSpanTree::validate(int n, int num_labels) const {
  if (n <= 0) throw InvariantError("joint tree over an empty sentence");
  if (static_cast<int>(nodes.size()) != 2 * n - 1)
    throw InvariantError("binary tree over " + std::to_string(n) +
                         " words must have " + std::to_string(2 * n - 1) +
                         " nodes, found " + std::to_string(nodes.size()));
  if (root != static_cast<int>(nodes.size()) - 1)
    throw InvariantError("root must be the last node");
  std::vector<int> parents(nodes.size(), 0);
  std::vector<bool> leaf_seen(static_cast<size_t>(n), false);
  for (size_t k = 0; k < nodes.size(); ++k) {
    const auto& x = nodes[k];
    if (x.start < 0 || x.end >= n || x.start > x.end)
      throw InvariantError("node span " + describe(x.start, x.end) + " is invalid");
    if (x.label < 0 || x.label >= num_labels)
      throw InvariantError("node label index out of range");
    if (x.head < x.start || x.head > x.end)
      throw InvariantError("head outside span " + describe(x.start, x.end));
    if (x.is_leaf()) {
      if (x.start != x.end || x.head != x.start || x.right >= 0)
        throw InvariantError("leaf " + describe(x.start, x.end) + " is malformed");
      if (leaf_seen[static_cast<size_t>(x.start)])
        throw InvariantError("word covered by two leaves");
      leaf_seen[static_cast<size_t>(x.start)] = true;
      continue;
    }
    if (x.left >= static_cast<int>(k) || x.right >= static_cast<int>(k) || x.right < 0)
      throw InvariantError("children must precede their parent");
    const auto& l = nodes[static_cast<size_t>(x.left)];
    const auto& r = nodes[static_cast<size_t>(x.right)];
    ++parents[static_cast<size_t>(x.left)];
    ++parents[static_cast<size_t>(x.right)];
    if (l.start != x.start || r.end != x.end || l.end + 1 != r.start)
      throw InvariantError("children do not partition span " + describe(x.start, x.end));
    if (x.head != l.head && x.head != r.head)
      throw InvariantError("head of " + describe(x.start, x.end) +
                           " is not inherited from a child");
  }
  for (size_t k = 0; k + 1 < nodes.size(); ++k)
    if (parents[k] != 1) throw InvariantError("node without exactly one parent");
  const auto& top = nodes[static_cast<size_t>(root)];
  if (top.start != 0 || top.end != n - 1)
    throw InvariantError("root does not cover the sentence");
  if (dep_heads != derive_dep_heads(*this, n))
    throw InvariantError("dependency heads disagree with the span heads");
  if (!dep_labels.empty() && static_cast<int>(dep_labels.size()) != n)
    throw InvariantError("one relation per word is required");
}

double tree_score(const JointSpanTree& tree, const Matrix& span_scores,
                  const Matrix& arc_scores) {
  const int n = tree.size();
  double total = 0.0;
  for (const auto& x : tree.nodes) total += span_scores(span_index(x.start, x.end, n), x.label);
  for (int d = 0; d < n; ++d) total += arc_scores(d, tree.dep_heads[static_cast<size_t>(d)]);
  return total;
}

namespace {

struct Back {
  int split = -1;
  int other = -1;  // Head of the non-head child.
  bool head_left = true;
};

}  // namespace

JointSpanTree joint_span_cky(const Matrix& span_scores, const Matrix& arc_scores,
                             const Matrix* rel_scores, int n) {
  if (n <= 0) throw ShapeError("joint_span_cky: sentence has no words");
  if (span_scores.rows() != span_count(n) || span_scores.cols() < 1)
    throw ShapeError("joint_span_cky: span scores must be " +
                     std::to_string(span_count(n)) + " x labels");
  if (arc_scores.rows() != n || arc_scores.cols() != n + 1)
    throw ShapeError("joint_span_cky: arc scores must be n x (n + 1)");
  if (!span_scores.allFinite())
    throw NumericError("joint_span_cky: non-finite span score");
  for (Eigen::Index r = 0; r < arc_scores.rows(); ++r)
    for (Eigen::Index c = 0; c < arc_scores.cols(); ++c) {
      const double a = arc_scores(r, c);
      if (std::isnan(a) || a == std::numeric_limits<double>::infinity())
        throw NumericError("joint_span_cky: non-finite arc score");
    }

  const int m = span_count(n);
  std::vector<double> label_score(static_cast<size_t>(m));
  std::vector<int> label(static_cast<size_t>(m));
  for (int s = 0; s < m; ++s) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < span_scores.cols(); ++c)
      if (span_scores(s, c) > span_scores(s, best)) best = c;
    label[static_cast<size_t>(s)] = static_cast<int>(best);
    label_score[static_cast<size_t>(s)] = span_scores(s, best);
  }

  const size_t cells = static_cast<size_t>(n) * n * n;
  std::vector<double> chart(cells, kNegInf);
  std::vector<Back> back(cells);
  auto at = [n](int i, int j, int h) {
    return (static_cast<size_t>(i) * n + j) * n + h;
  };
  for (int i = 0; i < n; ++i)
    chart[at(i, i, i)] = label_score[static_cast<size_t>(span_index(i, i, n))];

  for (int width = 2; width <= n; ++width) {
    for (int i = 0; i + width - 1 < n; ++i) {
      const int j = i + width - 1;
      for (int k = i; k < j; ++k) {
        for (int hl = i; hl <= k; ++hl) {
          const double left = chart[at(i, k, hl)];
          if (left == kNegInf) continue;
          for (int hr = k + 1; hr <= j; ++hr) {
            const double right = chart[at(k + 1, j, hr)];
            if (right == kNegInf) continue;
            const double as_left = left + right + arc_scores(hr, hl + 1);
            if (as_left > chart[at(i, j, hl)]) {
              chart[at(i, j, hl)] = as_left;
              back[at(i, j, hl)] = {k, hr, true};
            }
            const double as_right = left + right + arc_scores(hl, hr + 1);
            if (as_right > chart[at(i, j, hr)]) {
              chart[at(i, j, hr)] = as_right;
              back[at(i, j, hr)] = {k, hl, false};
            }
          }
        }
      }
      const double ls = label_score[static_cast<size_t>(span_index(i, j, n))];
      for (int h = i; h <= j; ++h)
        if (chart[at(i, j, h)] != kNegInf) chart[at(i, j, h)] += ls;
    }
  }

  int root_head = -1;
  double best_total = kNegInf;
  for (int h = 0; h < n; ++h) {
    const double total = chart[at(0, n - 1, h)] + arc_scores(h, 0);
    if (total > best_total) {
      best_total = total;
      root_head = h;
    }
  }
  if (root_head < 0) throw NumericError("joint_span_cky: no tree has a finite score");

  JointSpanTree tree;
  tree.nodes.reserve(static_cast<size_t>(2 * n - 1));
  auto build = [&](auto&& self, int i, int j, int h) -> int {
    JointSpanNode node{i, j, label[static_cast<size_t>(span_index(i, j, n))], h, -1, -1};
    if (i < j) {
      const Back& b = back[at(i, j, h)];
      const int hl = b.head_left ? h : b.other;
      const int hr = b.head_left ? b.other : h;
      node.left = self(self, i, b.split, hl);
      node.right = self(self, b.split + 1, j, hr);
    }
    tree.nodes.push_back(node);
    return static_cast<int>(tree.nodes.size()) - 1;
  };
  tree.root = build(build, 0, n - 1, root_head);
  tree.dep_heads = derive_dep_heads(tree, n);
  tree.score = best_total;
  if (rel_scores != nullptr) assign_relations(tree, *rel_scores);
  return tree;
}

void assign_relations(JointSpanTree& tree, const Matrix& rel_scores) {
  const int n = tree.size();
  if (rel_scores.rows() != static_cast<Eigen::Index>(n) * (n + 1) || rel_scores.cols() < 1)
    throw ShapeError("relation scores must be n * (n + 1) x relations");
  tree.dep_labels.assign(static_cast<size_t>(n), 0);
  for (int d = 0; d < n; ++d) {
    const Eigen::Index row = static_cast<Eigen::Index>(d) * (n + 1) + tree.dep_heads[static_cast<size_t>(d)];
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < rel_scores.cols(); ++c)
      if (rel_scores(row, c) > rel_scores(row, best)) best = c;
    tree.dep_labels[static_cast<size_t>(d)] = static_cast<int>(best);
  }
}

namespace {

// Follows a unary chain from `node`. Returns the joined label of every
// non-preterminal node on the chain and the node where it stops: either a
// preterminal or a node with two or more children.
std::pair<std::string, const ConstituentTree*> follow_chain(const ConstituentTree& node) {
  std::string joined;
  const ConstituentTree* cur = &node;
  auto push = [&](const std::string& l) {
    if (l.empty()) return;
    if (!joined.empty()) joined += '+';
    joined += l;
  };
  while (!cur->is_leaf() && !cur->is_preterminal() && cur->children.size() == 1) {
    push(cur->label);
    cur = &cur->children[0];
  }
  if (!cur->is_leaf() && !cur->is_preterminal()) push(cur->label);
  return {joined, cur};
}

void gather_labels(const ConstituentTree& node, std::vector<std::string>& out) {
  if (node.is_leaf() || node.is_preterminal()) return;
  auto [joined, bottom] = follow_chain(node);
  if (!joined.empty()) out.push_back(joined);
  if (bottom->is_preterminal()) return;
  for (const auto& c : bottom->children) gather_labels(c, out);
}

class GoldBinarizer {
 public:
  GoldBinarizer(const std::vector<int>& heads, const std::vector<std::string>& labels)
      : heads_(heads) {
    for (size_t i = 0; i < labels.size(); ++i) index_.emplace(labels[i], static_cast<int>(i));
  }

  int build(const ConstituentTree& node) {
    if (node.is_leaf()) return add_leaf(node.word, 0);
    auto [joined, bottom] = follow_chain(node);
    const int label = lookup(joined);
    if (label < 0) return -1;
    if (bottom->is_leaf()) return add_leaf(bottom->word, label);
    if (bottom->is_preterminal()) return add_leaf(bottom->children[0].word, label);

    std::vector<int> kids;
    for (const auto& c : bottom->children) {
      const int k = build(c);
      if (k < 0) return -1;
      kids.push_back(k);
    }
    const int s = tree_.nodes[static_cast<size_t>(kids.front())].start;
    const int e = tree_.nodes[static_cast<size_t>(kids.back())].end;
    int head = -1;
    for (int w = s; w <= e; ++w) {
      const int h = heads_[static_cast<size_t>(w)] - 1;
      if (h >= s && h <= e) continue;
      if (head >= 0) {
        reason_ = "constituent " + describe(s, e) + " has more than one head word";
        return -1;
      }
      head = w;
    }
    if (head < 0) {
      reason_ = "constituent " + describe(s, e) + " has no head word";
      return -1;
    }
    size_t hc = 0;
    while (tree_.nodes[static_cast<size_t>(kids[hc])].end < head) ++hc;
    int cur = kids[hc];
    for (size_t r = hc + 1; r < kids.size(); ++r) cur = combine(cur, kids[r], head);
    for (size_t l = hc; l-- > 0;) cur = combine(kids[l], cur, head);
    tree_.nodes[static_cast<size_t>(cur)].label = label;
    return cur;
  }

  JointSpanTree& tree() { return tree_; }
  const std::string& reason() const { return reason_; }

 private:
  int lookup(const std::string& joined) {
    auto it = index_.find(joined);
    if (it == index_.end()) {
      reason_ = "label '" + joined + "' is not in the inventory";
      return -1;
    }
    return it->second;
  }

  int add_leaf(int w, int label) {
    tree_.nodes.push_back({w, w, label, w, -1, -1});
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  int combine(int left, int right, int head) {
    const auto& l = tree_.nodes[static_cast<size_t>(left)];
    const auto& r = tree_.nodes[static_cast<size_t>(right)];
    tree_.nodes.push_back({l.start, r.end, 0, head, left, right});
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  const std::vector<int>& heads_;
  std::map<std::string, int> index_;
  JointSpanTree tree_;
  std::string reason_;
};

void expand_node(const JointSpanTree& tree, int idx,
                 const std::vector<std::string>& labels,
                 const std::vector<std::string>& pos,
                 std::vector<ConstituentTree>& out) {
  const auto& x = tree.nodes[static_cast<size_t>(idx)];
  std::vector<ConstituentTree> kids;
  if (x.is_leaf()) {
    ConstituentTree pt;
    pt.label = pos[static_cast<size_t>(x.start)];
    pt.children.push_back(ConstituentTree::leaf(x.start));
    kids.push_back(std::move(pt));
  } else {
    expand_node(tree, x.left, labels, pos, kids);
    expand_node(tree, x.right, labels, pos, kids);
  }
  if (x.label != 0) {
    std::vector<std::string> parts;
    const std::string& joined = labels[static_cast<size_t>(x.label)];
    size_t begin = 0;
    while (begin <= joined.size()) {
      size_t plus = joined.find('+', begin);
      if (plus == std::string::npos) plus = joined.size();
      parts.push_back(joined.substr(begin, plus - begin));
      begin = plus + 1;
    }
    for (size_t p = parts.size(); p-- > 0;) {
      ConstituentTree t;
      t.label = parts[p];
      t.children = std::move(kids);
      kids.clear();
      kids.push_back(std::move(t));
    }
  }
  for (auto& k : kids) out.push_back(std::move(k));
}

}  // namespace

std::vector<std::string> collapsed_labels(const ConstituentTree& tree) {
  std::vector<std::string> out;
  gather_labels(tree, out);
  return out;
}

std::optional<JointSpanTree> gold_joint_tree(const ConstituentTree& tree,
                                             const std::vector<int>& dep_heads,
                                             const std::vector<std::string>& labels,
                                             std::string* reason) {
  const int n = static_cast<int>(dep_heads.size());
  auto fail = [&](const std::string& why) -> std::optional<JointSpanTree> {
    if (reason) *reason = why;
    return std::nullopt;
  };
  if (labels.empty() || !labels[0].empty())
    return fail("label inventory must start with the empty label");
  if (static_cast<int>(tree_leaves(tree).size()) != n)
    return fail("tree and dependency heads cover different word counts");
  GoldBinarizer b(dep_heads, labels);
  const int root = b.build(tree);
  if (root < 0) return fail(b.reason());
  JointSpanTree out = std::move(b.tree());
  out.root = root;
  out.dep_heads = derive_dep_heads(out, n);
  if (out.dep_heads != dep_heads)
    return fail("dependency arcs disagree with constituent heads");
  return out;
}

ConstituentTree to_constituent_tree(const JointSpanTree& tree,
                                    const std::vector<std::string>& labels,
                                    const std::vector<std::string>& pos) {
  if (static_cast<int>(pos.size()) != tree.size())
    throw ShapeError("one POS tag per word is required");
  std::vector<ConstituentTree> kids;
  expand_node(tree, tree.root, labels, pos, kids);
  if (kids.size() == 1) return std::move(kids[0]);
  ConstituentTree top;
  top.children = std::move(kids);
  return top;
}

const char* srl_style_name(SrlStyle style) {
  return style == SrlStyle::kSpan ? "span" : "dependency";
}

SrlSelection srl_decode(const Matrix& role_scores,
                        const std::vector<std::pair<int, int>>& units,
                        SrlStyle style, int predicate) {
  if (role_scores.rows() != static_cast<Eigen::Index>(units.size()))
    throw ShapeError("srl_decode: one score row per unit is required");
  if (role_scores.cols() < 1) throw ShapeError("srl_decode: missing null role column");
  SrlSelection sel;
  sel.predicate = predicate;
  const size_t u = units.size();
  std::vector<double> margin(u, kNegInf);
  std::vector<int> role(u, 0);
  for (size_t k = 0; k < u; ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    for (Eigen::Index c = 1; c < role_scores.cols(); ++c) {
      const double mg = role_scores(r, c) - role_scores(r, 0);
      if (mg > margin[k]) {
        margin[k] = mg;
        role[k] = static_cast<int>(c);
      }
    }
  }

  std::vector<size_t> chosen;
  if (style == SrlStyle::kDependency) {
    for (size_t k = 0; k < u; ++k)
      if (margin[k] > 0.0) chosen.push_back(k);
  } else {
    int n = 0;
    for (const auto& [s, e] : units) {
      if (s < 0 || e < s) throw ShapeError("srl_decode: invalid unit span");
      n = std::max(n, e + 1);
    }
    std::vector<std::vector<size_t>> ending(static_cast<size_t>(n));
    for (size_t k = 0; k < u; ++k)
      if (margin[k] > 0.0) ending[static_cast<size_t>(units[k].second)].push_back(k);
    // best[p]: optimum over words [0, p); pick[p] is the unit ending at p - 1
    // or none.
    std::vector<double> best(static_cast<size_t>(n) + 1, 0.0);
    std::vector<long> pick(static_cast<size_t>(n) + 1, -1);
    for (int e = 0; e < n; ++e) {
      best[static_cast<size_t>(e) + 1] = best[static_cast<size_t>(e)];
      for (size_t k : ending[static_cast<size_t>(e)]) {
        const double c = best[static_cast<size_t>(units[k].first)] + margin[k];
        if (c > best[static_cast<size_t>(e) + 1]) {
          best[static_cast<size_t>(e) + 1] = c;
          pick[static_cast<size_t>(e) + 1] = static_cast<long>(k);
        }
      }
    }
    for (int p = n; p > 0;) {
      if (pick[static_cast<size_t>(p)] < 0) {
        --p;
        continue;
      }
      const auto k = static_cast<size_t>(pick[static_cast<size_t>(p)]);
      chosen.push_back(k);
      p = units[k].first;
    }
  }
  for (size_t k : chosen)
    sel.arguments.push_back({units[k].first, units[k].second, role[k], margin[k]});
  std::sort(sel.arguments.begin(), sel.arguments.end(),
            [](const SrlArgument& a, const SrlArgument& b) { return a.start < b.start; });
  for (const auto& a : sel.arguments) sel.total += a.margin;
  return sel;
}

std::vector<int> predict_predicates(const std::vector<double>& logits) {
  std::vector<int> out;
  for (size_t i = 0; i < logits.size(); ++i)
    if (logits[i] > 0.0) out.push_back(static_cast<int>(i));
  return out;
}

}  // namespace lingmt
