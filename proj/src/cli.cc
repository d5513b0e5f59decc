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

#include "lingmt/cli.h"

#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <filesystem>
#include <optional>

#include "lingmt/common.h"
#include "lingmt/config.h"
#include "lingmt/pipeline.h"

namespace lingmt {

namespace {

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> out_dir;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "Configuration file (key = value lines)");
  cmd->add_option("--seed", f.seed, "Root seed");
  cmd->add_option("--out", f.out_dir, "Output directory");
  cmd->add_option("--set", f.overrides, "Override KEY=VALUE, repeatable");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig c = f.config_path.empty() ? RunConfig() : RunConfig::load(f.config_path);
  for (const auto& kv : f.overrides) {
    const size_t eq = kv.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
    c.set(std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1))));
  }
  if (f.seed) c.seed = *f.seed;
  if (f.out_dir) c.out_dir = *f.out_dir;
  return c;
}

std::string in_out_dir(const RunConfig& c, const std::string& name) {
  return (c.out_dir.empty() ? std::string(".") : c.out_dir) + "/" + name;
}

void ensure_out_dir(const RunConfig& c) {
  if (c.out_dir.empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(c.out_dir, ec);
  if (ec) throw IoError("cannot create " + c.out_dir + ": " + ec.message());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Linguistically informed masked-language-model training", "lingmt"};
  app.require_subcommand(1);

  CommonFlags train_f, eval_f, annotate_f, preview_f, vocab_f;
  CLI::App* train_cmd = app.add_subcommand("train", "Train a model");
  add_common(train_cmd, train_f);

  CLI::App* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on the gold data");
  add_common(eval_cmd, eval_f);
  std::string eval_ckpt, eval_report;
  eval_cmd->add_option("--checkpoint", eval_ckpt, "Checkpoint (default OUT/model.ckpt)");
  eval_cmd->add_option("--report", eval_report, "Report path (default OUT/eval.json)");

  CLI::App* annotate_cmd = app.add_subcommand("annotate", "Write a silver corpus");
  add_common(annotate_cmd, annotate_f);
  std::string ann_ckpt, ann_input, ann_output;
  annotate_cmd->add_option("--checkpoint", ann_ckpt, "Checkpoint (default OUT/model.ckpt)");
  annotate_cmd->add_option("--input", ann_input, "Raw text (default raw_text)");
  annotate_cmd->add_option("--output", ann_output, "Silver file (default OUT/silver.txt)");

  CLI::App* preview_cmd = app.add_subcommand("mask-preview", "Show masking decisions");
  add_common(preview_cmd, preview_f);
  long preview_limit = 10;
  preview_cmd->add_option("--limit", preview_limit, "Sentences to show");

  CLI::App* vocab_cmd = app.add_subcommand("vocab-build", "Build the subword vocabulary");
  add_common(vocab_cmd, vocab_f);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      out << app.help();
      return 0;
    } catch (const CLI::ParseError& e) {
      throw ConfigError(e.what());
    }

    if (*train_cmd) {
      const RunConfig c = resolve(train_f);
      c.validate();
      const TrainingData data = load_training_data(c);
      const Vocab vocab = prepare_vocab(c, data);
      const TrainSummary s = train(c, data, vocab);
      const TrainingLosses& last = s.ledger.back();
      out << "trained " << c.steps << " steps, final J_overall " << last.J_overall << "\n";
      if (!s.checkpoint_path.empty()) out << "checkpoint " << s.checkpoint_path << "\n";
    } else if (*eval_cmd) {
      const RunConfig c = resolve(eval_f);
      Model model;
      Vocab vocab = Vocab(Vocab::reserved_tokens());
      load_model(eval_ckpt.empty() ? in_out_dir(c, "model.ckpt") : eval_ckpt, &model, &vocab);
      if (!c.vocab.empty()) vocab = Vocab::parse(read_file(c.vocab));
      const nlohmann::json report =
          evaluate(model, vocab, load_gold(c), punctuation_tags(c));
      ensure_out_dir(c);
      write_file(eval_report.empty() ? in_out_dir(c, "eval.json") : eval_report,
                 report.dump(2) + "\n");
      out << report.dump(2) << "\n";
    } else if (*annotate_cmd) {
      const RunConfig c = resolve(annotate_f);
      Model model;
      Vocab vocab = Vocab(Vocab::reserved_tokens());
      load_model(ann_ckpt.empty() ? in_out_dir(c, "model.ckpt") : ann_ckpt, &model, &vocab);
      const std::string input = ann_input.empty() ? c.raw_text : ann_input;
      if (input.empty()) throw ConfigError("annotate needs --input or raw_text");
      const auto sentences = read_raw_text(read_file(input));
      const AnnotateResult r = annotate(model, vocab, sentences);
      ensure_out_dir(c);
      const std::string path = ann_output.empty() ? in_out_dir(c, "silver.txt") : ann_output;
      write_file(path, write_silver(r.sentences));
      out << "annotated " << r.sentences.size() << " sentence(s), skipped " << r.skipped
          << ", wrote " << path << "\n";
    } else if (*preview_cmd) {
      const RunConfig c = resolve(preview_f);
      const TrainingData data = load_training_data(c);
      const Vocab vocab = prepare_vocab(c, data);
      std::vector<AnnotatedSentence> sentences = data.gold;
      sentences.insert(sentences.end(), data.silver.begin(), data.silver.end());
      for (const auto& words : data.raw) {
        AnnotatedSentence s;
        s.words = words;
        sentences.push_back(std::move(s));
      }
      if (preview_limit >= 0 && static_cast<long>(sentences.size()) > preview_limit)
        sentences.resize(static_cast<size_t>(preview_limit));
      out << mask_preview(c, sentences, vocab);
    } else if (*vocab_cmd) {
      const RunConfig c = resolve(vocab_f);
      const TrainingData data = load_training_data(c);
      RunConfig build = c;
      build.vocab.clear();
      const Vocab vocab = prepare_vocab(build, data);
      ensure_out_dir(c);
      const std::string path = in_out_dir(c, "vocab.txt");
      write_file(path, vocab.serialize());
      out << vocab_report(vocab, corpus_words(data)).to_json().dump() << "\n";
      out << "wrote " << path << "\n";
    }
  } catch (const Error& e) {
    err << "lingmt-error: " << e.kind() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "lingmt-error: internal: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

}  // namespace lingmt
