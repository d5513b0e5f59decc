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

#include "lingmt/corpus.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <deque>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "lingmt/common.h"

namespace lingmt {

using nlohmann::json;

ConstituentTree ConstituentTree::leaf(int word_index) {
  ConstituentTree t;
  t.word = word_index;
  return t;
}

namespace {

void collect_leaves(const ConstituentTree& t, std::vector<int>& out) {
  if (t.is_leaf()) {
    out.push_back(t.word);
    return;
  }
  for (const auto& c : t.children) collect_leaves(c, out);
}

void collect_preterminals(const ConstituentTree& t,
                          std::vector<std::string>& out) {
  if (t.is_leaf()) return;
  if (t.is_preterminal()) {
    out.push_back(t.label);
    return;
  }
  for (const auto& c : t.children) collect_preterminals(c, out);
}

void check_internal(const ConstituentTree& t) {
  if (t.is_leaf()) {
    if (!t.children.empty())
      throw InvariantError("tree leaf with children");
    return;
  }
  if (t.children.empty())
    throw InvariantError("internal tree node '" + t.label + "' has no child");
  for (const auto& c : t.children) check_internal(c);
}

}  // namespace

std::vector<int> tree_leaves(const ConstituentTree& tree) {
  std::vector<int> out;
  collect_leaves(tree, out);
  return out;
}

std::vector<std::string> tree_preterminals(const ConstituentTree& tree) {
  std::vector<std::string> out;
  collect_preterminals(tree, out);
  return out;
}

void validate_tree(const ConstituentTree& tree, int n) {
  check_internal(tree);
  std::vector<int> leaves = tree_leaves(tree);
  if (static_cast<int>(leaves.size()) != n)
    throw InvariantError("tree has " + std::to_string(leaves.size()) +
                         " leaves for " + std::to_string(n) + " words");
  for (int i = 0; i < n; ++i) {
    if (leaves[i] != i)
      throw InvariantError("tree leaves are not in word order at position " +
                           std::to_string(i));
  }
}

// ---------------------------------------------------------------------------
// PTB brackets.

namespace {

std::string strip_function_tags(const std::string& label) {
  if (label.empty() || label[0] == '-') return label;
  size_t cut = label.find_first_of("-=");
  return cut == std::string::npos ? label : label.substr(0, cut);
}

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }
  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  // Returns false when the node is an empty element to be deleted.
  bool parse_node(ConstituentTree& out, std::vector<std::string>& words) {
    skip_space();
    if (pos_ >= text_.size())
      throw FormatError("unexpected end of input, expected '('", -1,
                        static_cast<long>(pos_));
    if (text_[pos_] != '(')
      throw FormatError("expected '('", -1, static_cast<long>(pos_));
    ++pos_;
    skip_space();
    std::string label = read_token();
    bool has_word = false;
    bool has_node = false;
    std::string word;
    std::vector<ConstituentTree> children;
    for (;;) {
      skip_space();
      if (pos_ >= text_.size())
        throw FormatError("unbalanced parentheses", -1,
                          static_cast<long>(pos_));
      char c = text_[pos_];
      if (c == ')') {
        ++pos_;
        break;
      }
      if (c == '(') {
        if (has_word)
          throw FormatError("word and subtree mixed under one node", -1,
                            static_cast<long>(pos_));
        has_node = true;
        ConstituentTree child;
        if (parse_node(child, words)) children.push_back(std::move(child));
        continue;
      }
      if (has_word || has_node)
        throw FormatError("word and subtree mixed under one node", -1,
                          static_cast<long>(pos_));
      word = read_token();
      has_word = true;
    }
    if (has_word) {
      if (label == "-NONE-") return false;
      out.label = strip_function_tags(label);
      out.children.clear();
      out.children.push_back(
          ConstituentTree::leaf(static_cast<int>(words.size())));
      out.word = -1;
      words.push_back(word);
      return true;
    }
    if (children.empty()) {
      if (!has_node)
        throw FormatError("empty bracket", -1, static_cast<long>(pos_));
      return false;  // Every child was an empty element.
    }
    out.label = strip_function_tags(label);
    out.children = std::move(children);
    out.word = -1;
    return true;
  }

  size_t pos() const { return pos_; }

 private:
  std::string read_token() {
    size_t start = pos_;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '(' || c == ')' || std::isspace(static_cast<unsigned char>(c)))
        break;
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  size_t pos_ = 0;
};

ParsedTree finish_tree(ConstituentTree tree, std::vector<std::string> words) {
  while (tree.label.empty() && tree.children.size() == 1 &&
         !tree.is_preterminal())
    tree = ConstituentTree(tree.children[0]);
  ParsedTree out{std::move(tree), std::move(words)};
  validate_tree(out.tree, static_cast<int>(out.words.size()));
  return out;
}

ParsedTree read_one(BracketReader& reader, std::string_view text) {
  ConstituentTree tree;
  std::vector<std::string> words;
  if (!reader.parse_node(tree, words))
    throw FormatError("tree contains only empty elements", -1,
                      static_cast<long>(reader.pos()));
  (void)text;
  return finish_tree(std::move(tree), std::move(words));
}

void write_node(const ConstituentTree& t, const std::vector<std::string>& words,
                std::string& out) {
  if (t.is_leaf()) {
    const std::string& w = words.at(t.word);
    if (w == "(")
      out += "-LRB-";
    else if (w == ")")
      out += "-RRB-";
    else
      out += w;
    return;
  }
  out += '(';
  out += t.label;
  for (const auto& c : t.children) {
    out += ' ';
    write_node(c, words, out);
  }
  out += ')';
}

}  // namespace

ParsedTree parse_ptb(std::string_view text) {
  BracketReader reader(text);
  if (reader.at_end()) throw FormatError("empty tree input", -1, 0);
  ParsedTree tree = read_one(reader, text);
  if (!reader.at_end())
    throw FormatError("trailing text after tree", -1,
                      static_cast<long>(reader.pos()));
  return tree;
}

std::vector<ParsedTree> read_ptb(std::string_view text) {
  BracketReader reader(text);
  std::vector<ParsedTree> trees;
  while (!reader.at_end()) trees.push_back(read_one(reader, text));
  return trees;
}

std::string write_ptb(const ConstituentTree& tree,
                      const std::vector<std::string>& words) {
  std::string out;
  write_node(tree, words, out);
  return out;
}

// ---------------------------------------------------------------------------
// Sentence invariants.

const char* provenance_name(Provenance p) {
  return p == Provenance::kGold ? "gold" : "silver";
}

void validate_dep_tree(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  int roots = 0;
  for (int i = 0; i < n; ++i) {
    if (heads[i] < 0 || heads[i] > n)
      throw InvariantError("dependency head " + std::to_string(heads[i]) +
                           " out of range for word " + std::to_string(i + 1));
    if (heads[i] == 0) ++roots;
  }
  if (roots != 1)
    throw InvariantError("dependency tree has " + std::to_string(roots) +
                         " roots");
  // 0 = unvisited, 1 = on current path, 2 = reaches root.
  std::vector<int> state(n, 0);
  for (int start = 0; start < n; ++start) {
    std::vector<int> path;
    int w = start;
    while (w >= 0 && state[w] == 0) {
      state[w] = 1;
      path.push_back(w);
      w = heads[w] - 1;
    }
    if (w >= 0 && state[w] == 1)
      throw InvariantError("dependency cycle through word " +
                           std::to_string(w + 1));
    for (int p : path) state[p] = 2;
  }
}

void AnnotatedSentence::validate() const {
  const int n = size();
  if (n == 0) throw InvariantError("sentence has no words");
  auto require_len = [n](size_t len, const char* what) {
    if (static_cast<int>(len) != n)
      throw InvariantError(std::string(what) + " has " + std::to_string(len) +
                           " entries for " + std::to_string(n) + " words");
  };
  if (pos_tags) require_len(pos_tags->size(), "pos_tags");
  if (tree) validate_tree(*tree, n);
  if (dep_heads) {
    require_len(dep_heads->size(), "dep_heads");
    validate_dep_tree(*dep_heads);
  }
  if (dep_labels) require_len(dep_labels->size(), "dep_labels");
  auto in_range = [n](int i) { return i >= 0 && i < n; };
  if (span_frames) {
    for (const auto& f : *span_frames) {
      if (!in_range(f.predicate))
        throw InvariantError("span frame predicate out of range");
      for (size_t a = 0; a < f.arguments.size(); ++a) {
        const auto& x = f.arguments[a];
        if (!in_range(x.start) || !in_range(x.end) || x.start > x.end)
          throw InvariantError("span argument (" + std::to_string(x.start) +
                               "," + std::to_string(x.end) + ") is invalid");
        for (size_t b = 0; b < a; ++b) {
          const auto& y = f.arguments[b];
          if (x.start <= y.end && y.start <= x.end)
            throw InvariantError("overlapping arguments for predicate " +
                                 std::to_string(f.predicate));
        }
      }
    }
  }
  if (dep_frames) {
    for (const auto& f : *dep_frames) {
      if (!in_range(f.predicate))
        throw InvariantError("dependency frame predicate out of range");
      std::set<int> seen;
      for (const auto& a : f.arguments) {
        if (!in_range(a.word))
          throw InvariantError("dependency argument out of range");
        if (!seen.insert(a.word).second)
          throw InvariantError("two roles for one argument word of predicate " +
                               std::to_string(f.predicate));
      }
    }
  }
}

std::vector<AnnotatedSentence> sentences_from_ptb(std::string_view text) {
  std::vector<AnnotatedSentence> out;
  for (auto& parsed : read_ptb(text)) {
    AnnotatedSentence s;
    s.words = std::move(parsed.words);
    std::vector<std::string> tags = tree_preterminals(parsed.tree);
    if (static_cast<int>(tags.size()) == s.size()) s.pos_tags = tags;
    s.tree = std::move(parsed.tree);
    s.validate();
    out.push_back(std::move(s));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Column formats.

namespace {

struct Row {
  long line;
  std::vector<std::string> cols;
};

std::vector<std::vector<Row>> read_blocks(std::string_view text) {
  std::vector<std::vector<Row>> blocks;
  std::vector<Row> current;
  long lineno = 0;
  for (std::string_view line : split_lines(text)) {
    ++lineno;
    if (trim(line).empty()) {
      if (!current.empty()) blocks.push_back(std::move(current));
      current.clear();
      continue;
    }
    current.push_back({lineno, split_whitespace(line)});
  }
  if (!current.empty()) blocks.push_back(std::move(current));
  return blocks;
}

// One props column in the (ROLE* ... *) bracket convention.
SpanFrame read_props_column(const std::vector<Row>& block, size_t col) {
  SpanFrame frame;
  int predicate = -1;
  std::vector<std::pair<std::string, int>> open;
  for (size_t i = 0; i < block.size(); ++i) {
    const std::string& tok = block[i].cols[col];
    const long line = block[i].line;
    size_t p = 0;
    while (p < tok.size() && tok[p] == '(') {
      size_t q = p + 1;
      while (q < tok.size() && tok[q] != '*' && tok[q] != '(') ++q;
      if (q == p + 1) throw FormatError("empty role in '" + tok + "'", line);
      open.emplace_back(tok.substr(p + 1, q - p - 1), static_cast<int>(i));
      p = q;
    }
    if (p >= tok.size() || tok[p] != '*')
      throw FormatError("malformed props token '" + tok + "'", line);
    ++p;
    for (; p < tok.size(); ++p) {
      if (tok[p] != ')')
        throw FormatError("malformed props token '" + tok + "'", line);
      if (open.empty())
        throw FormatError("closing bracket without open argument", line);
      auto [role, start] = open.back();
      open.pop_back();
      if (role == "V") {
        if (predicate < 0) predicate = start;
      } else {
        frame.arguments.push_back({start, static_cast<int>(i), role});
      }
    }
  }
  if (!open.empty())
    throw FormatError("unclosed argument bracket '" + open.back().first +
                          "' at sentence end",
                      block.back().line);
  if (predicate < 0)
    throw FormatError("props column without a (V*) predicate",
                      block.front().line);
  frame.predicate = predicate;
  std::sort(frame.arguments.begin(), frame.arguments.end(),
            [](const SpanArgument& a, const SpanArgument& b) {
              return a.start < b.start;
            });
  return frame;
}

int parse_int(const std::string& s, long line, const char* what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw FormatError(std::string("non-integer ") + what + " '" + s + "'",
                      line);
  return value;
}

void validate_or_locate(const AnnotatedSentence& s, long line) {
  try {
    s.validate();
  } catch (const InvariantError& e) {
    throw InvariantError(std::string(e.what()) + " (sentence starting line " +
                         std::to_string(line) + ")");
  }
}

}  // namespace

std::vector<AnnotatedSentence> read_conll2005(std::string_view text) {
  std::vector<AnnotatedSentence> out;
  for (const auto& block : read_blocks(text)) {
    const size_t width = block.front().cols.size();
    for (const Row& r : block) {
      if (r.cols.size() != width)
        throw FormatError("ragged column count: expected " +
                              std::to_string(width) + " columns, found " +
                              std::to_string(r.cols.size()),
                          r.line);
    }
    AnnotatedSentence s;
    for (const Row& r : block) s.words.push_back(r.cols[0]);
    std::vector<SpanFrame> frames;
    for (size_t c = 1; c < width; ++c)
      frames.push_back(read_props_column(block, c));
    s.span_frames = std::move(frames);
    validate_or_locate(s, block.front().line);
    out.push_back(std::move(s));
  }
  return out;
}

std::string write_conll2005(const std::vector<AnnotatedSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    const int n = s.size();
    const std::vector<SpanFrame> empty;
    const auto& frames = s.span_frames ? *s.span_frames : empty;
    std::vector<std::vector<std::string>> cols(
        frames.size(), std::vector<std::string>(n, ""));
    for (size_t f = 0; f < frames.size(); ++f) {
      auto& col = cols[f];
      std::vector<std::string> opens(n), closes(n);
      opens[frames[f].predicate] += "(V";
      closes[frames[f].predicate] += ")";
      for (const auto& a : frames[f].arguments) {
        opens[a.start] += "(" + a.role;
        closes[a.end] += ")";
      }
      for (int i = 0; i < n; ++i) col[i] = opens[i] + "*" + closes[i];
    }
    for (int i = 0; i < n; ++i) {
      out += s.words[i];
      for (const auto& col : cols) {
        out += '\t';
        out += col[i];
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<AnnotatedSentence> read_conll2009(std::string_view text) {
  std::vector<AnnotatedSentence> out;
  for (const auto& block : read_blocks(text)) {
    AnnotatedSentence s;
    std::vector<std::string> pos;
    std::vector<int> heads;
    std::vector<std::string> labels;
    std::vector<int> predicates;
    for (size_t i = 0; i < block.size(); ++i) {
      const Row& r = block[i];
      if (r.cols.size() < 14)
        throw FormatError("expected at least 14 columns, found " +
                              std::to_string(r.cols.size()),
                          r.line);
      if (parse_int(r.cols[0], r.line, "ID") != static_cast<int>(i) + 1)
        throw FormatError("token ID out of sequence", r.line);
      s.words.push_back(r.cols[1]);
      pos.push_back(r.cols[4]);
      heads.push_back(parse_int(r.cols[8], r.line, "HEAD"));
      labels.push_back(r.cols[10]);
      if (r.cols[12] == "Y") predicates.push_back(static_cast<int>(i));
    }
    std::vector<DepFrame> frames;
    for (int p : predicates) frames.push_back({p, {}});
    for (size_t i = 0; i < block.size(); ++i) {
      const Row& r = block[i];
      const size_t apreds = r.cols.size() - 14;
      if (apreds != predicates.size())
        throw FormatError("found " + std::to_string(apreds) +
                              " APRED columns for " +
                              std::to_string(predicates.size()) +
                              " predicates",
                          r.line);
      for (size_t a = 0; a < apreds; ++a) {
        const std::string& role = r.cols[14 + a];
        if (role != "_")
          frames[a].arguments.push_back({static_cast<int>(i), role});
      }
    }
    s.pos_tags = std::move(pos);
    s.dep_heads = std::move(heads);
    s.dep_labels = std::move(labels);
    s.dep_frames = std::move(frames);
    validate_or_locate(s, block.front().line);
    out.push_back(std::move(s));
  }
  return out;
}

std::string write_conll2009(const std::vector<AnnotatedSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    const int n = s.size();
    const std::vector<DepFrame> empty;
    const auto& frames = s.dep_frames ? *s.dep_frames : empty;
    std::vector<int> order(frames.size());
    for (size_t f = 0; f < frames.size(); ++f) order[f] = static_cast<int>(f);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return frames[a].predicate < frames[b].predicate;
    });
    for (int i = 0; i < n; ++i) {
      const std::string pos = s.pos_tags ? (*s.pos_tags)[i] : "_";
      const std::string head =
          s.dep_heads ? std::to_string((*s.dep_heads)[i]) : "_";
      const std::string rel = s.dep_labels ? (*s.dep_labels)[i] : "_";
      bool is_pred = false;
      for (const auto& f : frames) is_pred = is_pred || f.predicate == i;
      std::vector<std::string> cols = {std::to_string(i + 1),
                                       s.words[i],
                                       "_",
                                       "_",
                                       pos,
                                       pos,
                                       "_",
                                       "_",
                                       head,
                                       head,
                                       rel,
                                       rel,
                                       is_pred ? "Y" : "_",
                                       is_pred ? s.words[i] : "_"};
      for (int f : order) {
        std::string role = "_";
        for (const auto& a : frames[f].arguments)
          if (a.word == i) role = a.role;
        cols.push_back(role);
      }
      for (size_t c = 0; c < cols.size(); ++c) {
        if (c) out += '\t';
        out += cols[c];
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Silver interchange format: one JSON object per line.

namespace {

json sentence_to_json(const AnnotatedSentence& s) {
  json j;
  j["words"] = s.words;
  if (s.pos_tags) j["pos_tags"] = *s.pos_tags;
  if (s.tree) j["tree"] = write_ptb(*s.tree, s.words);
  if (s.dep_heads) j["dep_heads"] = *s.dep_heads;
  if (s.dep_labels) j["dep_labels"] = *s.dep_labels;
  if (s.span_frames) {
    json frames = json::array();
    for (const auto& f : *s.span_frames) {
      json args = json::array();
      for (const auto& a : f.arguments)
        args.push_back(json::array({a.start, a.end, a.role}));
      frames.push_back({{"predicate", f.predicate}, {"arguments", args}});
    }
    j["span_frames"] = frames;
  }
  if (s.dep_frames) {
    json frames = json::array();
    for (const auto& f : *s.dep_frames) {
      json args = json::array();
      for (const auto& a : f.arguments)
        args.push_back(json::array({a.word, a.role}));
      frames.push_back({{"predicate", f.predicate}, {"arguments", args}});
    }
    j["dep_frames"] = frames;
  }
  j["provenance"] = provenance_name(s.provenance);
  return j;
}

AnnotatedSentence sentence_from_json(const json& j) {
  if (!j.is_object()) throw FormatError("record is not an object");
  if (!j.contains("words")) throw FormatError("record missing \"words\"");
  AnnotatedSentence s;
  s.words = j.at("words").get<std::vector<std::string>>();
  if (j.contains("pos_tags"))
    s.pos_tags = j.at("pos_tags").get<std::vector<std::string>>();
  if (j.contains("tree")) {
    ParsedTree t = parse_ptb(j.at("tree").get<std::string>());
    s.tree = std::move(t.tree);
  }
  if (j.contains("dep_heads"))
    s.dep_heads = j.at("dep_heads").get<std::vector<int>>();
  if (j.contains("dep_labels"))
    s.dep_labels = j.at("dep_labels").get<std::vector<std::string>>();
  if (j.contains("span_frames")) {
    std::vector<SpanFrame> frames;
    for (const auto& f : j.at("span_frames")) {
      SpanFrame frame;
      frame.predicate = f.at("predicate").get<int>();
      for (const auto& a : f.at("arguments"))
        frame.arguments.push_back({a.at(0).get<int>(), a.at(1).get<int>(),
                                   a.at(2).get<std::string>()});
      frames.push_back(std::move(frame));
    }
    s.span_frames = std::move(frames);
  }
  if (j.contains("dep_frames")) {
    std::vector<DepFrame> frames;
    for (const auto& f : j.at("dep_frames")) {
      DepFrame frame;
      frame.predicate = f.at("predicate").get<int>();
      for (const auto& a : f.at("arguments"))
        frame.arguments.push_back(
            {a.at(0).get<int>(), a.at(1).get<std::string>()});
      frames.push_back(std::move(frame));
    }
    s.dep_frames = std::move(frames);
  }
  const std::string prov = j.value("provenance", std::string("silver"));
  if (prov == "gold")
    s.provenance = Provenance::kGold;
  else if (prov == "silver")
    s.provenance = Provenance::kSilver;
  else
    throw FormatError("unknown provenance '" + prov + "'");
  s.validate();
  return s;
}

}  // namespace

std::vector<AnnotatedSentence> read_silver(std::string_view text) {
  std::vector<AnnotatedSentence> out;
  long lineno = 0;
  for (std::string_view line : split_lines(text)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(sentence_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw FormatError(std::string("malformed silver record: ") + e.what(),
                        lineno);
    } catch (const Error& e) {
      throw FormatError(std::string("malformed silver record: ") + e.what(),
                        lineno);
    }
  }
  return out;
}

std::string write_silver(const std::vector<AnnotatedSentence>& sentences) {
  std::string out;
  for (const auto& s : sentences) {
    out += sentence_to_json(s).dump();
    out += '\n';
  }
  return out;
}

std::vector<AnnotatedSentence> merge_annotations(
    const std::vector<std::vector<AnnotatedSentence>>& corpora) {
  std::vector<AnnotatedSentence> merged;
  std::map<std::vector<std::string>, std::deque<size_t>> unmatched;
  for (size_t c = 0; c < corpora.size(); ++c) {
    std::map<std::vector<std::string>, std::deque<size_t>> available =
        unmatched;
    for (const auto& s : corpora[c]) {
      auto it = available.find(s.words);
      if (it == available.end() || it->second.empty()) {
        merged.push_back(s);
        unmatched[s.words].push_back(merged.size() - 1);
        continue;
      }
      AnnotatedSentence& base = merged[it->second.front()];
      it->second.pop_front();
      if (!base.pos_tags) base.pos_tags = s.pos_tags;
      if (!base.tree) base.tree = s.tree;
      if (!base.dep_heads) base.dep_heads = s.dep_heads;
      if (!base.dep_labels) base.dep_labels = s.dep_labels;
      if (!base.span_frames) base.span_frames = s.span_frames;
      if (!base.dep_frames) base.dep_frames = s.dep_frames;
    }
  }
  for (const auto& s : merged) s.validate();
  return merged;
}

std::vector<std::vector<std::string>> read_raw_text(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  for (std::string_view line : split_lines(text)) {
    auto words = split_whitespace(line);
    if (!words.empty()) out.push_back(std::move(words));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gold/silver mixing.

void MixerPolicy::validate() const {
  if (!(gold_probability >= 0.0 && gold_probability <= 1.0))
    throw ConfigError("gold_probability must lie in [0, 1]");
}

DataSource draw_source(const MixerPolicy& policy, uint64_t index) {
  const uint64_t bits =
      splitmix64(splitmix64(policy.rng_seed) ^ splitmix64(index));
  const double u = static_cast<double>(bits >> 11) * 0x1.0p-53;
  return u < policy.gold_probability ? DataSource::kGold : DataSource::kSilver;
}

SourceMixer::SourceMixer(MixerPolicy policy, size_t gold_count,
                         size_t silver_count)
    : policy_(policy), gold_count_(gold_count), silver_count_(silver_count) {
  policy_.validate();
  if (gold_count_ == 0 && silver_count_ == 0)
    throw ConfigError("both gold and silver corpora are empty");
  if (gold_count_ == 0)
    spdlog::warn("gold corpus is empty; every batch draws silver data");
  if (silver_count_ == 0)
    spdlog::warn("silver corpus is empty; every batch draws gold data");
}

DataSource SourceMixer::next_source() {
  const uint64_t index = draws_++;
  if (gold_count_ == 0) return DataSource::kSilver;
  if (silver_count_ == 0) return DataSource::kGold;
  return draw_source(policy_, index);
}

}  // namespace lingmt
