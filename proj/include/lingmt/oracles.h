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

// Exhaustive reference implementations used to test the exact decoders.

#ifndef LINGMT_ORACLES_H_
#define LINGMT_ORACLES_H_

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lingmt/autograd.h"
#include "lingmt/decoders.h"
#include "lingmt/heads.h"

namespace lingmt {

struct BruteForceParse {
  double score = 0.0;
  JointSpanTree tree;
  // Head-annotated binary trees visited, before choosing labels.
  long trees_enumerated = 0;
};

// Maximizes tree_score over every head-annotated binary tree, each span
// taking its best label. Throws ShapeError for n < 1 or n > 8.
BruteForceParse brute_force_parse(const Matrix& span_scores,
                                  const Matrix& arc_scores, int n);

// Maximum over every pairwise-disjoint subset of units (any subset in
// dependency style) of the summed best-role margins. Throws ShapeError for
// more than 20 units.
SrlSelection brute_force_srl(const Matrix& role_scores,
                             const std::vector<std::pair<int, int>>& units,
                             SrlStyle style, int predicate = 0);

struct GradientCheckOptions {
  double epsilon = 1e-4;
  int samples_per_tensor = 3;
  // Denominator floor of the relative error, so entries whose true gradient
  // is zero are judged by absolute error.
  double floor = 1e-6;
  uint64_t seed = 0;
  // Checks only tensors whose name starts with one of these; empty = all.
  std::vector<std::string> prefixes;
};

struct GradientCheck {
  // |analytic - numeric| / max(|analytic|, |numeric|, floor), per tensor.
  std::map<std::string, double> tensor_error;
  double max_error = 0.0;
  std::string worst_tensor;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  long entries = 0;
};

// Central finite differences of `loss` (a 1x1 tape node built over `params`)
// against one reverse pass. `params` is restored before returning.
GradientCheck check_gradients(ModelParams& params,
                              const std::function<Var(Tape&)>& loss,
                              const GradientCheckOptions& options = {});

// Runs check_gradients separately for J_G (MLM + NSP on a pair batch), J_D
// (discriminator inputs frozen from one generator pass), J_1, J_2, J_3 and
// J_4 of `model` on the first sentences of `sentences`. Keys are the loss
// names.
std::map<std::string, GradientCheck> check_objective_gradients(
    Model& model, const Vocab& vocab, const std::vector<AnnotatedSentence>& sentences,
    uint64_t seed, const GradientCheckOptions& options = {});

}  // namespace lingmt

#endif  // LINGMT_ORACLES_H_
