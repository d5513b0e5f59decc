#!/usr/bin/env python3
# Copyright 2026 The lingmt Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#    http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
# ==============================================================================
"""Generates the fully annotated toy corpus under data/toy/.

Every sentence carries a PTB tree, POS tags, head-compatible dependencies
and span/dependency SRL frames, written as three gold files (.mrg,
CoNLL-2005 props, CoNLL-2009) plus the raw word sequence.

Usage: make_toy_corpus.py OUT_DIR [--count 50] [--seed 7]
"""

import argparse
import os
import random

DETS = ["the", "a", "every", "this", "that"]
ADJS = ["big", "small", "red", "old", "federal", "happy", "local", "new"]
NOUNS = ["cat", "dog", "company", "paper", "board", "man", "woman", "bank",
         "city", "market", "teacher", "river", "garden", "student", "firm"]
PLURALS = ["products", "clients", "books", "shares", "houses", "letters"]
TRANSITIVE = [("sells", "VBZ"), ("bought", "VBD"), ("sees", "VBZ"),
              ("likes", "VBZ"), ("built", "VBD"), ("reports", "VBZ")]
INTRANSITIVE = [("sleeps", "VBZ"), ("runs", "VBZ"), ("fell", "VBD"),
                ("waited", "VBD")]
SAYS = [("says", "VBZ"), ("thinks", "VBZ"), ("reported", "VBD")]
PREPS = ["in", "near", "with", "on"]
TIMES = ["today", "yesterday", "again"]


class Node:
  """Constituent node; leaves carry (word, tag)."""

  def __init__(self, label, children=None, word=None):
    self.label = label
    self.children = children or []
    self.word = word
    self.head = None  # word index of lexical head.
    self.start = None
    self.end = None


class Builder:
  """Accumulates words, tags, arcs and relations for one sentence."""

  def __init__(self):
    self.words = []
    self.tags = []
    self.heads = {}
    self.rels = {}

  def leaf(self, word, tag):
    index = len(self.words)
    self.words.append(word)
    self.tags.append(tag)
    node = Node(tag, word=word)
    node.head = index
    node.start = node.end = index
    return node

  def phrase(self, label, children, head_child):
    node = Node(label, children)
    node.head = children[head_child].head
    node.start = children[0].start
    node.end = children[-1].end
    return node

  def attach(self, dependent, head, rel):
    self.heads[dependent.head] = head.head
    self.rels[dependent.head] = rel


def make_np(b, rng, plural_ok=True, max_mods=2):
  parts = []
  det = b.leaf(rng.choice(DETS), "DT")
  parts.append(det)
  mods = []
  for _ in range(rng.randint(0, max_mods)):
    mods.append(("amod", b.leaf(rng.choice(ADJS), "JJ")))
  if rng.random() < 0.3:
    mods.append(("nn", b.leaf(rng.choice(NOUNS), "NN")))
  parts.extend(m for _, m in mods)
  if plural_ok and rng.random() < 0.3:
    noun = b.leaf(rng.choice(PLURALS), "NNS")
  else:
    noun = b.leaf(rng.choice(NOUNS), "NN")
  parts.append(noun)
  np = b.phrase("NP", parts, len(parts) - 1)
  b.attach(det, noun, "det")
  for rel, m in mods:
    b.attach(m, noun, rel)
  return np


def make_pp(b, rng):
  prep = b.leaf(rng.choice(PREPS), "IN")
  obj = make_np(b, rng, max_mods=1)
  pp = b.phrase("PP", [prep, obj], 0)
  b.attach(obj, prep, "pobj")
  return pp


def make_clause(b, rng, frames, depth):
  """Builds (S NP VP) and records the verb's SRL frame."""
  subj = make_np(b, rng)
  kind = rng.random()
  args = [("A0", subj)]
  if depth == 0 and kind < 0.2:
    verb_word, tag = rng.choice(SAYS)
    verb = b.leaf(verb_word, tag)
    inner = make_clause(b, rng, frames, depth + 1)
    sbar = b.phrase("SBAR", [inner], 0)
    vp = b.phrase("VP", [verb, sbar], 0)
    b.attach(inner, verb, "ccomp")
    args.append(("A1", sbar))
  elif kind < 0.4:
    verb_word, tag = rng.choice(INTRANSITIVE)
    verb = b.leaf(verb_word, tag)
    children = [verb]
    if rng.random() < 0.5:
      pp = make_pp(b, rng)
      children.append(pp)
      b.attach(pp, verb, "prep")
      args.append(("AM-LOC", pp))
    if len(children) == 1:
      vp = Node("VP", [verb])
      vp.head, vp.start, vp.end = verb.head, verb.start, verb.end
    else:
      vp = b.phrase("VP", children, 0)
  else:
    verb_word, tag = rng.choice(TRANSITIVE)
    verb = b.leaf(verb_word, tag)
    obj = make_np(b, rng)
    children = [verb, obj]
    b.attach(obj, verb, "dobj")
    args.append(("A1", obj))
    if rng.random() < 0.35:
      pp = make_pp(b, rng)
      children.append(pp)
      b.attach(pp, verb, "prep")
      args.append(("AM-LOC", pp))
    if depth == 0 and rng.random() < 0.3:
      adv = b.leaf(rng.choice(TIMES), "RB")
      advp = Node("ADVP", [adv])
      advp.head, advp.start, advp.end = adv.head, adv.start, adv.end
      children.append(advp)
      b.attach(advp, verb, "advmod")
      args.append(("AM-TMP", advp))
    vp = b.phrase("VP", children, 0)
  b.attach(subj, verb, "nsubj")
  frames.append((verb.head, [(role, n.start, n.end, n.head) for role, n in args]))
  return b.phrase("S", [subj, vp], 1)


def make_sentence(rng):
  b = Builder()
  frames = []
  clause = make_clause(b, rng, frames, 0)
  stop = b.leaf(".", ".")
  top = Node("S", clause.children + [stop])
  top.head, top.start, top.end = clause.head, clause.start, stop.end
  b.attach(stop, top, "punct")
  b.heads[top.head] = -1
  b.rels[top.head] = "root"
  frames.sort()
  return b, top, frames


def bracket(node):
  if node.word is not None:
    return "(%s %s)" % (node.label, node.word)
  return "(%s %s)" % (node.label, " ".join(bracket(c) for c in node.children))


def conll05_block(b, frames):
  n = len(b.words)
  columns = []
  for pred, args in frames:
    col = ["*"] * n
    col[pred] = "(V*)"
    for role, start, end, _ in args:
      if start == end:
        col[start] = "(%s*)" % role
      else:
        col[start] = "(%s*" % role
        col[end] = "*)"
    columns.append(col)
  lines = []
  for i, word in enumerate(b.words):
    lines.append("\t".join([word] + [c[i] for c in columns]))
  return "\n".join(lines)


def conll09_block(b, frames):
  n = len(b.words)
  preds = {p: args for p, args in frames}
  order = sorted(preds)
  lines = []
  for i, word in enumerate(b.words):
    head = b.heads[i] + 1
    rel = b.rels[i]
    fill = "Y" if i in preds else "_"
    pred = word + ".01" if i in preds else "_"
    apreds = []
    for p in order:
      role = "_"
      for r, _, _, h in preds[p]:
        if h == i:
          role = r
      apreds.append(role)
    cols = [str(i + 1), word, word, word, b.tags[i], b.tags[i], "_", "_",
            str(head), str(head), rel, rel, fill, pred] + apreds
    lines.append("\t".join(cols))
  return "\n".join(lines)


def main():
  parser = argparse.ArgumentParser()
  parser.add_argument("out_dir")
  parser.add_argument("--count", type=int, default=50)
  parser.add_argument("--seed", type=int, default=7)
  args = parser.parse_args()
  rng = random.Random(args.seed)
  seen = set()
  sentences = []
  while len(sentences) < args.count:
    b, top, frames = make_sentence(rng)
    key = " ".join(b.words)
    if key in seen or len(b.words) > 18:
      continue
    seen.add(key)
    sentences.append((b, top, frames))
  os.makedirs(args.out_dir, exist_ok=True)
  with open(os.path.join(args.out_dir, "toy.mrg"), "w") as f:
    for _, top, _ in sentences:
      f.write("( %s )\n" % bracket(top))
  with open(os.path.join(args.out_dir, "toy.props"), "w") as f:
    f.write("\n\n".join(conll05_block(b, fr) for b, _, fr in sentences))
    f.write("\n\n")
  with open(os.path.join(args.out_dir, "toy.conll09"), "w") as f:
    f.write("\n\n".join(conll09_block(b, fr) for b, _, fr in sentences))
    f.write("\n\n")
  with open(os.path.join(args.out_dir, "toy.txt"), "w") as f:
    for b, _, _ in sentences:
      f.write(" ".join(b.words) + "\n")


if __name__ == "__main__":
  main()
