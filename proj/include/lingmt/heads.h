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

// Training objectives on top of the shared encoder: generator (masked LM and
// next-sentence prediction), replaced-token discriminator, POS, joint
// constituent/dependency syntax and both SRL styles, plus silver annotation.

#ifndef LINGMT_HEADS_H_
#define LINGMT_HEADS_H_

#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lingmt/autograd.h"
#include "lingmt/corpus.h"
#include "lingmt/decoders.h"
#include "lingmt/encoder.h"
#include "lingmt/masking.h"
#include "lingmt/tokenizer.h"

namespace lingmt {

class LabelInventory {
 public:
  LabelInventory() = default;
  explicit LabelInventory(std::vector<std::string> labels);

  // Returns the existing index or appends.
  int add(const std::string& label);
  std::optional<int> find(const std::string& label) const;
  // Throws ConfigError naming `what` for labels outside the inventory.
  int require(const std::string& label, const char* what) const;
  const std::string& label(int index) const { return labels_.at(static_cast<size_t>(index)); }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }
  bool operator==(const LabelInventory& o) const { return labels_ == o.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

// Constituent, span-role and dep-role inventories reserve index 0 for the
// empty/null label.
struct Inventories {
  LabelInventory pos;
  LabelInventory constituent;
  LabelInventory relation;
  LabelInventory span_role;
  LabelInventory dep_role;

  // Sorted label sets of every annotation in `corpus`.
  static Inventories from_corpus(const std::vector<AnnotatedSentence>& corpus);
  nlohmann::json to_json() const;
  static Inventories from_json(const nlohmann::json& j);
};

struct HeadConfig {
  int arc_dim = 64;
  int rel_dim = 32;
  int span_dim = 64;  // Fencepost projection width, both directions.
  int span_hidden = 128;
  int srl_dim = 32;
  int span_width_cap = 30;
  int joint_length_cap = 40;

  void validate() const;
  nlohmann::json to_json() const;
  static HeadConfig from_json(const nlohmann::json& j);
  bool operator==(const HeadConfig&) const = default;
};

struct TaskToggles {
  bool mlm = true;
  bool nsp = true;
  bool electra = true;
  bool pos = true;
  bool constituent = true;
  bool dependency = true;
  bool srl_span = true;
  bool srl_dep = true;
};

struct Model {
  EncoderConfig encoder;
  HeadConfig heads;
  Inventories labels;
  ModelParams params;
  uint64_t vocab_hash = 0;
};

// Adds head tensors for every inventory to `params`.
void init_heads(const EncoderConfig& encoder, const HeadConfig& heads,
                const Inventories& labels, ModelParams& params, Rng& rng);

Model init_model(const EncoderConfig& encoder, const HeadConfig& heads,
                 const Inventories& labels, uint64_t vocab_hash, Rng& rng);
Checkpoint to_checkpoint(const Model& model, const nlohmann::json& extra = {});
// Throws ShapeError when tensors disagree with the stored hyperparameters.
Model from_checkpoint(const Checkpoint& checkpoint);

// Training targets of one sentence mapped onto label indices.
struct SpanFrameTarget {
  int predicate = 0;
  std::vector<std::tuple<int, int, int>> arguments;  // start, end, role
};
struct DepFrameTarget {
  int predicate = 0;
  std::vector<std::pair<int, int>> arguments;  // word, role
};

struct SentenceTargets {
  int n = 0;
  std::optional<std::vector<int>> pos;
  std::optional<std::vector<int>> heads;      // 1-based, 0 = root.
  std::optional<std::vector<int>> relations;
  std::optional<JointSpanTree> joint;
  // Set when a tree exists but cannot be used for the joint objective.
  std::string joint_excluded;
  std::optional<std::vector<SpanFrameTarget>> span_frames;
  std::optional<std::vector<DepFrameTarget>> dep_frames;
  long skipped_arguments = 0;  // Span arguments wider than the cap.
};

// Throws ConfigError for labels outside the inventories.
SentenceTargets make_targets(const AnnotatedSentence& sentence,
                             const Inventories& labels, const HeadConfig& config);

// Rows of X at the final piece of every word of sentence one.
Var word_vectors(Var x, const std::vector<int>& word_last_piece);

// X rows [CLS], words of sentence one, closing [SEP].
Var fence_rows(Var x, const TokenSequence& seq);

struct TrainingLosses {
  double J_G = 0.0;
  double J_D = 0.0;
  double J_lm = 0.0;
  double J_1 = 0.0;
  double J_2 = 0.0;
  double J_3 = 0.0;
  double J_4 = 0.0;
  double J_lt = 0.0;
  double J_overall = 0.0;
  double lambda = 50.0;
  // Diagnostics: sentences missing an annotation per task, sentences
  // excluded from the joint objective, skipped SRL arguments.
  std::map<std::string, long> flags;

  nlohmann::json to_json(long step) const;
};

struct LossComponents {
  double J_G = 0.0;
  double J_D = 0.0;
  double J_1 = 0.0;
  double J_2 = 0.0;
  double J_3 = 0.0;
  double J_4 = 0.0;
};

// Throws NumericError naming the first non-finite or negative component.
TrainingLosses total_loss(const LossComponents& components, double lambda);

// Generator scoring on a batch of hidden-state matrices.
struct GeneratorOutput {
  Var loss;                              // J_G (invalid if nothing to score)
  Var token_loss;                        // mean masked-piece cross-entropy
  Var nsp_loss;                          // invalid when NSP is omitted
  std::vector<std::vector<int>> predictions;  // argmax per mask position
};

// `nsp_active` selects pair-mode batches; gold batches pass false.
GeneratorOutput generator_loss(Tape& tape, const std::vector<Var>& states,
                               const std::vector<MaskedExample>& examples,
                               bool nsp_active);

struct DiscriminatorInput {
  std::vector<int> ids;
  std::vector<bool> replaced;
};

DiscriminatorInput corrupt_for_discriminator(const MaskedExample& example,
                                             const std::vector<int>& predictions);

// Per-position replaced-token logits, seq_len x 1.
Var discriminator_logits(Tape& tape, Var states);

// Mean BCE over positions whose original id is not [PAD]/[CLS]/[SEP].
Var discriminator_loss(Tape& tape, const std::vector<Var>& states,
                       const std::vector<std::vector<int>>& original_ids,
                       const std::vector<DiscriminatorInput>& inputs);

// Per-sentence scores, all on the tape.
Var pos_scores(Tape& tape, Var words);
Var arc_scores(Tape& tape, Var words, Var root);
// pairs: (dependent word, head column) with column 0 = root.
Var rel_scores(Tape& tape, Var words, Var root,
               const std::vector<std::pair<int, int>>& pairs);
Var span_label_scores(Tape& tape, Var fence, const std::vector<std::pair<int, int>>& spans);
Var predicate_logits(Tape& tape, Var words, SrlStyle style);
// Rows ordered predicate-major: predicate k, unit u at k * units + u.
Var role_scores(Tape& tape, Var words, Var fence, SrlStyle style,
                const std::vector<int>& predicates,
                const std::vector<std::pair<int, int>>& units);

// Candidate argument units: spans up to the width cap, or single words.
std::vector<std::pair<int, int>> srl_units(int n, SrlStyle style, int width_cap);

struct SentenceStates {
  Var words;
  Var fence;
  Var root;
  int n = 0;
};

SentenceStates sentence_states(Var x, const TokenSequence& seq);

struct TaskLosses {
  Var J_1, J_2, J_3, J_4;  // Invalid when no sentence carries the task.
  std::map<std::string, long> flags;
};

// Batch means of every enabled linguistic objective.
TaskLosses task_losses(Tape& tape, const Model& model,
                       const std::vector<SentenceStates>& states,
                       const std::vector<const SentenceTargets*>& targets,
                       const TaskToggles& toggles);

// One training example assembled by the data loop.
struct BatchItem {
  const SentenceTargets* targets = nullptr;
  TokenSequence seq;
  std::optional<MaskedExample> masked;
};

struct StepOutput {
  TrainingLosses losses;
  Var objective;
  std::vector<std::vector<int>> discriminator_inputs;
};

// Full forward pass of one batch: generator, corruption, discriminator and
// task heads, combined into J_overall on `tape`.
StepOutput compute_step(Tape& tape, const Model& model,
                        const std::vector<BatchItem>& batch,
                        const TaskToggles& toggles, double lambda,
                        bool pair_batch);

// Decodes POS, tree, dependencies and both SRL styles for one sentence of
// words. Throws TruncationError when the encoding exceeds max_length.
AnnotatedSentence annotate_sentence(const Model& model, const Vocab& vocab,
                                    const std::vector<std::string>& words);

struct AnnotateResult {
  std::vector<AnnotatedSentence> sentences;
  long skipped = 0;
};

// Skips (and counts) sentences that do not fit max_length.
AnnotateResult annotate(const Model& model, const Vocab& vocab,
                        const std::vector<std::vector<std::string>>& sentences);

}  // namespace lingmt

#endif  // LINGMT_HEADS_H_
