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

#include "lingmt/pipeline.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lingmt/common.h"
#include "lingmt/masking.h"
#include "lingmt/metrics.h"

namespace lingmt {

namespace fs = std::filesystem;

std::vector<AnnotatedSentence> load_gold(const RunConfig& config) {
  std::vector<std::vector<AnnotatedSentence>> parts;
  if (!config.gold_ptb.empty()) parts.push_back(sentences_from_ptb(read_file(config.gold_ptb)));
  if (!config.gold_conll05.empty())
    parts.push_back(read_conll2005(read_file(config.gold_conll05)));
  if (!config.gold_conll09.empty())
    parts.push_back(read_conll2009(read_file(config.gold_conll09)));
  if (parts.empty()) return {};
  return merge_annotations(parts);
}

TrainingData load_training_data(const RunConfig& config) {
  TrainingData d;
  d.gold = load_gold(config);
  if (!config.silver.empty()) d.silver = read_silver(read_file(config.silver));
  if (!config.raw_text.empty()) d.raw = read_raw_text(read_file(config.raw_text));
  return d;
}

std::vector<std::string> corpus_words(const TrainingData& data) {
  std::vector<std::string> out;
  for (const auto* part : {&data.gold, &data.silver})
    for (const auto& s : *part) out.insert(out.end(), s.words.begin(), s.words.end());
  for (const auto& s : data.raw) out.insert(out.end(), s.begin(), s.end());
  return out;
}

nlohmann::json VocabReport::to_json() const {
  return {{"size", size},
          {"words", words},
          {"unknown_words", unknown_words},
          {"pieces_per_word", pieces_per_word}};
}

VocabReport vocab_report(const Vocab& vocab, const std::vector<std::string>& words) {
  VocabReport r;
  r.size = vocab.size();
  long pieces = 0;
  for (const auto& w : words) {
    const std::vector<int> p = tokenize_word(w, vocab);
    ++r.words;
    pieces += static_cast<long>(p.size());
    if (p.size() == 1 && p[0] == Vocab::kUnk) ++r.unknown_words;
  }
  r.pieces_per_word = r.words > 0 ? static_cast<double>(pieces) / r.words : 0.0;
  return r;
}

Vocab prepare_vocab(const RunConfig& config, const TrainingData& data) {
  if (!config.vocab.empty()) return Vocab::parse(read_file(config.vocab));
  const std::vector<std::string> words = corpus_words(data);
  if (words.empty()) throw ConfigError("cannot build a vocabulary from an empty corpus");
  return build_vocab(words, config.encoder.vocab_size);
}

std::set<std::string> punctuation_tags(const RunConfig& config) {
  std::set<std::string> out;
  for (std::string_view t : split_whitespace(config.punctuation)) out.emplace(t);
  return out;
}

Checkpoint model_checkpoint(const Model& model, const Vocab& vocab) {
  nlohmann::json tokens = nlohmann::json::array();
  for (int i = 0; i < vocab.size(); ++i) tokens.push_back(vocab.token(i));
  return to_checkpoint(model, {{"vocab", tokens}});
}

void load_model(const std::string& path, Model* model, Vocab* vocab) {
  const Checkpoint ck = load_checkpoint(path);
  if (model) *model = from_checkpoint(ck);
  if (vocab) {
    if (!ck.meta.contains("vocab")) throw FormatError("checkpoint carries no vocabulary");
    *vocab = Vocab(ck.meta.at("vocab").get<std::vector<std::string>>());
  }
}

namespace {

bool fits(const AnnotatedSentence& s, const Vocab& vocab, int max_length) {
  if (s.words.empty()) return false;
  try {
    encode(s.words, nullptr, std::nullopt, vocab, max_length);
    return true;
  } catch (const TruncationError&) {
    return false;
  }
}

// Epoch-wise shuffled pass over [0, size).
class Cursor {
 public:
  Cursor(size_t size, uint64_t seed) : rng_(seed) {
    for (size_t i = 0; i < size; ++i) order_.push_back(i);
    pos_ = order_.size();
  }
  size_t next() {
    if (pos_ == order_.size()) {
      rng_.shuffle(order_);
      pos_ = 0;
    }
    return order_[pos_++];
  }

 private:
  Rng rng_;
  std::vector<size_t> order_;
  size_t pos_ = 0;
};

uint64_t slot_seed(uint64_t root, long step, int slot) {
  return splitmix64(root ^ splitmix64(static_cast<uint64_t>(step) * 65536u +
                                      static_cast<uint64_t>(slot)));
}

void remove_quietly(const std::string& path) {
  std::error_code ec;
  fs::remove(path, ec);
}

}  // namespace

TrainSummary train(const RunConfig& config, const TrainingData& data,
                   const Vocab& vocab, const TrainHooks& hooks) {
  config.validate();
  EncoderConfig enc = config.encoder;
  enc.vocab_size = vocab.size();
  enc.validate();

  TrainSummary summary;
  std::vector<const AnnotatedSentence*> gold, silver;
  for (const auto& s : data.gold) {
    if (fits(s, vocab, enc.max_length))
      gold.push_back(&s);
    else
      ++summary.filtered_gold;
  }
  for (const auto& s : data.silver) {
    if (fits(s, vocab, enc.max_length))
      silver.push_back(&s);
    else
      ++summary.filtered_silver;
  }
  if (summary.filtered_gold + summary.filtered_silver > 0)
    spdlog::warn("dropped {} gold and {} silver sentence(s) longer than max_length",
                 summary.filtered_gold, summary.filtered_silver);
  if (gold.empty() && silver.empty()) throw ConfigError("no training sentences");

  std::vector<AnnotatedSentence> all;
  for (const auto* s : gold) all.push_back(*s);
  for (const auto* s : silver) all.push_back(*s);
  const Inventories labels = Inventories::from_corpus(all);
  all.clear();

  std::vector<SentenceTargets> gold_targets, silver_targets;
  for (const auto* s : gold) gold_targets.push_back(make_targets(*s, labels, config.heads));
  for (const auto* s : silver) silver_targets.push_back(make_targets(*s, labels, config.heads));

  const uint64_t seed = config.seed;
  Rng init_rng(derive_seed(seed, "init"));
  summary.model = init_model(enc, config.heads, labels, vocab.hash(), init_rng);
  Model& model = summary.model;

  SourceMixer mixer({config.gold_probability, derive_seed(seed, "mixer")}, gold.size(),
                    silver.size());
  Cursor gold_cursor(gold.size(), derive_seed(seed, "data order/gold"));
  Cursor silver_cursor(silver.size(), derive_seed(seed, "data order/silver"));
  Rng nsp_rng(derive_seed(seed, "nsp"));
  const uint64_t mask_root = derive_seed(seed, "masking");

  std::ofstream metrics;
  std::deque<std::string> checkpoints;
  if (!config.out_dir.empty()) {
    std::error_code ec;
    fs::create_directories(config.out_dir, ec);
    if (ec) throw IoError("cannot create " + config.out_dir + ": " + ec.message());
    write_file(config.out_dir + "/config.txt", config.serialize());
    write_file(config.out_dir + "/vocab.txt", vocab.serialize());
    metrics.open(config.out_dir + "/metrics.jsonl", std::ios::binary | std::ios::trunc);
    if (!metrics) throw IoError("cannot write " + config.out_dir + "/metrics.jsonl");
  }

  AdamState adam;
  for (long step = 1; step <= config.steps; ++step) {
    const DataSource source = mixer.next_source();
    const bool from_silver = source == DataSource::kSilver;
    const bool pair_batch = from_silver && config.tasks.nsp && silver.size() > 1;
    std::vector<BatchItem> batch;
    batch.reserve(static_cast<size_t>(config.batch_size));
    for (int slot = 0; slot < config.batch_size; ++slot) {
      const size_t idx = from_silver ? silver_cursor.next() : gold_cursor.next();
      const AnnotatedSentence& s = from_silver ? *silver[idx] : *gold[idx];
      BatchItem item;
      item.targets = from_silver ? &silver_targets[idx] : &gold_targets[idx];
      if (pair_batch) {
        size_t partner;
        if (idx + 1 < silver.size() && nsp_rng.uniform() < 0.5)
          partner = idx + 1;
        else
          partner = static_cast<size_t>(nsp_rng.below(silver.size()));
        item.seq = encode(s.words, &silver[partner]->words, partner == idx + 1, vocab,
                          enc.max_length);
      } else {
        item.seq = encode(s.words, nullptr, std::nullopt, vocab, enc.max_length);
      }
      if (config.tasks.mlm) {
        Rng rng(slot_seed(mask_root, step, slot));
        item.masked = mask_sentence(item.seq, s, config.mask, rng, vocab);
      }
      batch.push_back(std::move(item));
    }

    if (hooks.on_batch) hooks.on_batch(step, batch);
    Tape tape(&model.params);
    StepOutput out = compute_step(tape, model, batch, config.tasks, config.lambda, pair_batch);
    tape.backward(out.objective);
    adam_step(model.params, tape.parameter_gradients(), adam, config.adam);
    model.params.round_to_storage();

    if (metrics.is_open()) {
      nlohmann::json line = out.losses.to_json(step);
      line["source"] = from_silver ? "silver" : "gold";
      metrics << line.dump() << '\n';
    }
    if (hooks.on_step) hooks.on_step(step, out);
    summary.ledger.push_back(std::move(out.losses));
    summary.steps_run = step;

    if (!config.out_dir.empty() && step % config.checkpoint_every == 0 && step < config.steps) {
      const std::string path = config.out_dir + "/checkpoint-" + std::to_string(step) + ".ckpt";
      save_checkpoint(path, model_checkpoint(model, vocab));
      checkpoints.push_back(path);
      while (static_cast<int>(checkpoints.size()) > config.keep_checkpoints) {
        remove_quietly(checkpoints.front());
        checkpoints.pop_front();
      }
    }
    if (hooks.on_checkpoint && step % config.checkpoint_every == 0 &&
        !hooks.on_checkpoint(step, model))
      break;
  }
  if (!config.out_dir.empty()) {
    summary.checkpoint_path = config.out_dir + "/model.ckpt";
    save_checkpoint(summary.checkpoint_path, model_checkpoint(model, vocab));
    metrics.flush();
  }
  return summary;
}

nlohmann::json evaluate(const Model& model, const Vocab& vocab,
                        const std::vector<AnnotatedSentence>& gold,
                        const std::set<std::string>& punctuation) {
  if (gold.empty()) throw ConfigError("empty evaluation set");
  if (vocab.hash() != model.vocab_hash)
    throw ConfigError("vocabulary hash " + hex64(vocab.hash()) +
                      " does not match the checkpoint's " + hex64(model.vocab_hash));
  Accuracy pos;
  PRF brackets, span_srl, dep_srl;
  AttachmentScore attach;
  long skipped = 0;
  long n_pos = 0, n_tree = 0, n_dep = 0, n_span = 0, n_depsrl = 0;
  long exact_trees = 0;
  for (const auto& g : gold) {
    AnnotatedSentence p;
    try {
      p = annotate_sentence(model, vocab, g.words);
    } catch (const TruncationError&) {
      ++skipped;
      continue;
    }
    if (g.pos_tags) {
      ++n_pos;
      for (size_t i = 0; i < g.words.size(); ++i) {
        ++pos.total;
        if ((*p.pos_tags)[i] == (*g.pos_tags)[i]) ++pos.correct;
      }
    }
    if (g.tree) {
      ++n_tree;
      const PRF b = bracket_prf(*p.tree, *g.tree);
      if (b.matched == b.gold && b.matched == b.predicted) ++exact_trees;
      brackets += b;
    }
    if (g.dep_heads && g.dep_labels) {
      ++n_dep;
      attach += uas_las(*p.dep_heads, *p.dep_labels, *g.dep_heads, *g.dep_labels,
                        g.pos_tags ? *g.pos_tags : std::vector<std::string>{}, punctuation);
    }
    if (g.span_frames) {
      ++n_span;
      span_srl += srl_prf(*p.span_frames, *g.span_frames);
    }
    if (g.dep_frames) {
      ++n_depsrl;
      dep_srl += srl_prf(*p.dep_frames, *g.dep_frames);
    }
  }
  auto with_count = [](nlohmann::json j, long sentences) {
    j["sentences"] = sentences;
    return j;
  };
  nlohmann::json report;
  report["sentences"] = static_cast<long>(gold.size());
  report["skipped"] = skipped;
  report["pos"] = with_count({{"correct", pos.correct},
                              {"total", pos.total},
                              {"accuracy", pos.total > 0 ? pos.value() : 0.0}},
                             n_pos);
  report["constituent"] = with_count(brackets.to_json(), n_tree);
  report["constituent"]["exact"] = exact_trees;
  report["dependency"] = with_count(attach.to_json(), n_dep);
  report["srl_span"] = with_count(span_srl.to_json(), n_span);
  report["srl_dep"] = with_count(dep_srl.to_json(), n_depsrl);
  return report;
}

std::string mask_preview(const RunConfig& config,
                         const std::vector<AnnotatedSentence>& sentences,
                         const Vocab& vocab) {
  config.mask.validate();
  const uint64_t root = derive_seed(config.seed, "masking");
  std::ostringstream out;
  for (size_t i = 0; i < sentences.size(); ++i) {
    const AnnotatedSentence& s = sentences[i];
    TokenSequence seq;
    try {
      seq = encode(s.words, nullptr, std::nullopt, vocab, config.encoder.max_length);
    } catch (const TruncationError& e) {
      out << "sentence " << i << ": skipped (" << e.what() << ")\n\n";
      continue;
    }
    Rng rng(slot_seed(root, 0, static_cast<int>(i)));
    const MaskedExample ex = mask_sentence(seq, s, config.mask, rng, vocab);
    std::vector<bool> masked(seq.size(), false);
    for (int p : ex.mask_positions) masked[p] = true;
    auto covered = [&](int a, int b) {
      for (int w = a; w <= b; ++w)
        for (int p = seq.word_pieces[w].first; p <= seq.word_pieces[w].second; ++p)
          if (!masked[p]) return false;
      return true;
    };

    out << "sentence " << i << ": strategy " << strategy_name(ex.strategy) << ", "
        << ex.mask_positions.size() << " of " << maskable_positions(seq).size()
        << " pieces\n";
    std::vector<PhraseSpan> phrases;
    if (ex.strategy == MaskStrategy::kSynPhrase && s.tree)
      phrases = extract_syntactic_phrases(*s.tree, config.mask.max_phrase_width);
    if (ex.strategy == MaskStrategy::kSemPhrase && s.span_frames)
      phrases = extract_semantic_phrases(*s.span_frames, config.mask.max_phrase_width);
    std::vector<bool> in_phrase(s.words.size(), false);
    out << "  units:";
    for (const auto& ph : phrases) {
      if (!covered(ph.start, ph.end)) continue;
      out << " [" << ph.label << " " << ph.start << "-" << ph.end << ":";
      for (int w = ph.start; w <= ph.end; ++w) {
        out << " " << s.words[w];
        in_phrase[w] = true;
      }
      out << "]";
    }
    for (int w = 0; w < static_cast<int>(s.words.size()); ++w)
      if (!in_phrase[w] && covered(w, w)) out << " [word " << w << ": " << s.words[w] << "]";
    out << "\n";
    size_t k = 0;
    for (int p = 0; p < seq.size(); ++p) {
      out << "  " << p << "\t" << vocab.token(ex.original_ids[p]) << "\t"
          << vocab.token(ex.input_ids[p]);
      if (k < ex.mask_positions.size() && ex.mask_positions[k] == p)
        out << "\t" << action_name(ex.actions[k++]);
      out << "\n";
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace lingmt
