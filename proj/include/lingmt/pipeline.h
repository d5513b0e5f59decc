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

// Command implementations behind the lingmt binary. Each is a function of
// the configuration, the input files and the seed.

#ifndef LINGMT_PIPELINE_H_
#define LINGMT_PIPELINE_H_

#include <functional>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <vector>

#include "lingmt/config.h"
#include "lingmt/corpus.h"
#include "lingmt/heads.h"
#include "lingmt/tokenizer.h"

namespace lingmt {

struct TrainingData {
  std::vector<AnnotatedSentence> gold;
  std::vector<AnnotatedSentence> silver;
  std::vector<std::vector<std::string>> raw;
};

// Reads and merges every configured source. Unreadable paths throw IoError.
TrainingData load_training_data(const RunConfig& config);
std::vector<AnnotatedSentence> load_gold(const RunConfig& config);

std::vector<std::string> corpus_words(const TrainingData& data);

struct VocabReport {
  int size = 0;
  long words = 0;
  long unknown_words = 0;  // Words that tokenize to [UNK].
  double pieces_per_word = 0.0;
  nlohmann::json to_json() const;
};

VocabReport vocab_report(const Vocab& vocab, const std::vector<std::string>& words);

// Loads config.vocab when set, else builds from the corpus.
Vocab prepare_vocab(const RunConfig& config, const TrainingData& data);

struct TrainHooks {
  // Called after every optimizer step with the pre-update step output.
  std::function<void(long step, const StepOutput& out)> on_step;
  // Sees the assembled batch before the forward pass.
  std::function<void(long step, const std::vector<BatchItem>& batch)> on_batch;
  // Called every checkpoint_every steps after the update; returning false
  // ends training there.
  std::function<bool(long step, const Model& model)> on_checkpoint;
};

struct TrainSummary {
  Model model;
  std::vector<TrainingLosses> ledger;
  long steps_run = 0;
  long filtered_gold = 0;    // Did not fit max_length.
  long filtered_silver = 0;
  std::string checkpoint_path;  // Empty when out_dir is empty.
};

// Runs the full training loop. With a non-empty out_dir writes config.txt,
// metrics.jsonl, periodic checkpoint-<step>.ckpt files and model.ckpt.
TrainSummary train(const RunConfig& config, const TrainingData& data,
                   const Vocab& vocab, const TrainHooks& hooks = {});

std::set<std::string> punctuation_tags(const RunConfig& config);

// Decodes every sentence and scores each task against the annotations the
// gold sentence carries. Throws ConfigError on an empty set or a vocabulary
// that does not match the model.
nlohmann::json evaluate(const Model& model, const Vocab& vocab,
                        const std::vector<AnnotatedSentence>& gold,
                        const std::set<std::string>& punctuation);

// Human-readable masking dump, deterministic in config.seed.
std::string mask_preview(const RunConfig& config,
                         const std::vector<AnnotatedSentence>& sentences,
                         const Vocab& vocab);

// Checkpoint files carry the vocabulary in their metadata.
Checkpoint model_checkpoint(const Model& model, const Vocab& vocab);
void load_model(const std::string& path, Model* model, Vocab* vocab);

}  // namespace lingmt

#endif  // LINGMT_PIPELINE_H_
