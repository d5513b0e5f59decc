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

#include <doctest.h>

#include <filesystem>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lingmt/common.h"
#include "lingmt/config.h"
#include "lingmt/corpus.h"

namespace lingmt {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  fs::current_path(LINGMT_SOURCE_DIR);
  std::ostringstream out, err;
  Result r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lingmt_cli_test_" + name);
  fs::remove_all(p);
  return p.string();
}

// A fast variant of the toy configuration.
std::vector<std::string> tiny(const std::string& cmd, const std::string& out, long steps = 4) {
  return {cmd,      "--config", "data/toy/toy.cfg", "--out", out,
          "--set",  "width=16", "--set",            "heads=2", "--set",
          "ffn=32", "--set",    "batch_size=4",     "--set", "steps=" + std::to_string(steps),
          "--set",  "checkpoint_every=2"};
}

std::vector<nlohmann::json> metrics(const std::string& dir) {
  std::vector<nlohmann::json> rows;
  const std::string text = read_file(dir + "/metrics.jsonl");
  for (const auto& line : split_lines(text))
    if (!trim(line).empty()) rows.push_back(nlohmann::json::parse(line));
  return rows;
}

TEST_CASE("config: round trip, unknown keys, overrides") {
  RunConfig c = RunConfig::load(std::string(LINGMT_SOURCE_DIR) + "/data/toy/toy.cfg");
  CHECK(c.encoder.width == 64);
  CHECK(c.gold_probability == 1.0);
  CHECK(RunConfig::parse(c.serialize()) == c);
  RunConfig d;
  CHECK(d.gold_probability == 0.10);
  CHECK(d.lambda == 50.0);
  CHECK(RunConfig::parse(d.serialize()) == d);
  CHECK_THROWS_AS(RunConfig::parse("no_such_key = 1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("width = wide\n"), ConfigError);
  CHECK_THROWS_AS(d.set("electra", "maybe"), ConfigError);
  RunConfig e;
  e.tasks.mlm = false;
  CHECK_THROWS_AS(e.validate(), ConfigError);
}

TEST_CASE("cli: error prefix and exit codes") {
  Result r = run({"train", "--config", "data/toy/toy.cfg", "--set", "bogus=1"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("lingmt-error: config: ", 0) == 0);
  r = run({"train", "--config", "/nonexistent/file.cfg"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("lingmt-error: io: ", 0) == 0);
  r = run({"frobnicate"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("lingmt-error: config: ", 0) == 0);
  r = run({"train", "--config", "data/toy/toy.cfg", "--set", "mlm=false"});
  CHECK(r.code == 2);
  CHECK(r.err.find("electra requires mlm") != std::string::npos);
  r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("mask-preview") != std::string::npos);
}

TEST_CASE("cli: vocab-build") {
  const std::string out = scratch("vocab");
  Result r = run({"vocab-build", "--config", "data/toy/toy.cfg", "--out", out});
  REQUIRE(r.code == 0);
  auto j = nlohmann::json::parse(r.out.substr(0, r.out.find('\n')));
  CHECK(j["size"].get<int>() <= 400);
  CHECK(j["unknown_words"].get<long>() == 0);
  CHECK(j["pieces_per_word"].get<double>() >= 1.0);
  CHECK(fs::exists(out + "/vocab.txt"));
  Result again = run({"vocab-build", "--config", "data/toy/toy.cfg", "--out", out});
  CHECK(again.out == r.out);
}

TEST_CASE("cli: train, eval, annotate, retrain on silver") {
  const std::string out = scratch("pipeline");
  Result r = run(tiny("train", out));
  REQUIRE_MESSAGE(r.code == 0, r.err);
  CHECK(r.out.find("trained 4 steps") != std::string::npos);
  for (const char* f : {"config.txt", "vocab.txt", "metrics.jsonl", "checkpoint-2.ckpt", "model.ckpt"})
    CHECK(fs::exists(out + "/" + f));
  CHECK_FALSE(fs::exists(out + "/checkpoint-4.ckpt"));
  RunConfig saved = RunConfig::load(out + "/config.txt");
  CHECK(saved.steps == 4);
  CHECK(saved.encoder.width == 16);

  const auto rows = metrics(out);
  REQUIRE(rows.size() == 4);
  for (size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i]["step"].get<long>() == static_cast<long>(i + 1));
    for (const char* k : {"J_G", "J_D", "J_lm", "J_1", "J_2", "J_3", "J_4", "J_lt", "J_overall", "source"})
      CHECK(rows[i].contains(k));
    CHECK(rows[i]["source"] == "gold");
  }

  Result ev = run({"eval", "--out", out, "--config", "data/toy/toy.cfg"});
  REQUIRE_MESSAGE(ev.code == 0, ev.err);
  auto report = nlohmann::json::parse(read_file(out + "/eval.json"));
  CHECK(report == nlohmann::json::parse(ev.out));
  CHECK(report["sentences"] == 50);
  for (const char* k : {"pos", "constituent", "dependency", "srl_span", "srl_dep"}) {
    REQUIRE(report.contains(k));
    CHECK(report[k]["sentences"] == 50);
  }
  for (const char* k : {"precision", "recall", "f1", "exact"}) CHECK(report["constituent"].contains(k));
  for (const char* k : {"uas", "las"}) CHECK(report["dependency"].contains(k));
  CHECK(report["pos"].contains("accuracy"));

  // Empty evaluation set.
  const std::string empty = scratch("empty.mrg");
  write_file(empty, "");
  Result none = run({"eval", "--out", out, "--set", "gold_ptb=" + empty});
  CHECK(none.code == 2);
  CHECK(none.err.find("empty evaluation set") != std::string::npos);

  // Annotate: every input line is either a record or a skip.
  const std::string raw = scratch("raw.txt");
  std::string text = read_file("data/toy/toy.txt");
  std::string long_line;
  for (int i = 0; i < 80; ++i) long_line += "market ";
  text += long_line + "\n";
  write_file(raw, text);
  const auto lines = read_raw_text(text);
  const std::string silver = out + "/silver.txt";
  Result an = run({"annotate", "--out", out, "--input", raw});
  REQUIRE_MESSAGE(an.code == 0, an.err);
  const auto records = read_silver(read_file(silver));
  CHECK(records.size() + 1 == lines.size());
  CHECK(an.out.find("annotated " + std::to_string(records.size()) + " sentence(s), skipped 1") == 0);
  for (const auto& s : records) {
    CHECK(s.provenance == Provenance::kSilver);
    CHECK_NOTHROW(s.validate());
  }

  // Retrain with the silver corpus mixed in.
  const std::string out2 = scratch("pipeline2");
  auto args = tiny("train", out2);
  for (const std::string kv : {"silver=" + silver, std::string("gold_probability=0.1")}) {
    args.push_back("--set");
    args.push_back(kv);
  }
  Result re = run(args);
  REQUIRE_MESSAGE(re.code == 0, re.err);
  bool saw_silver = false;
  for (const auto& row : metrics(out2)) saw_silver |= row["source"] == "silver";
  CHECK(saw_silver);
}

TEST_CASE("cli: mask-preview is deterministic and follows the strategy weights") {
  auto args = std::vector<std::string>{"mask-preview", "--config", "data/toy/toy.cfg", "--limit", "5"};
  Result a = run(args), b = run(args);
  REQUIRE_MESSAGE(a.code == 0, a.err);
  CHECK(a.out == b.out);
  CHECK(a.out.find("sentence 4:") != std::string::npos);
  CHECK(a.out.find("sentence 5:") == std::string::npos);
  Result other = run({"mask-preview", "--config", "data/toy/toy.cfg", "--limit", "5", "--seed", "8"});
  CHECK(other.out != a.out);

  Result w = run({"mask-preview", "--config", "data/toy/toy.cfg", "--limit", "20", "--set",
                  "weight_syn_phrase=0", "--set", "weight_sem_phrase=0", "--set", "weight_whole_word=1"});
  REQUIRE(w.code == 0);
  CHECK(w.out.find("SYN_PHRASE") == std::string::npos);
  CHECK(w.out.find("SEM_PHRASE") == std::string::npos);
  for (const auto& line : split_lines(w.out)) {
    if (line.rfind("  units:", 0) != 0) continue;
    std::string rest(line.substr(8));
    size_t pos = 0;
    while ((pos = rest.find('[', pos)) != std::string::npos) {
      CHECK(rest.compare(pos, 6, "[word ") == 0);
      ++pos;
    }
  }
}

TEST_CASE("train: linguistic-task-free run has an MLM-only ledger") {
  const std::string out = scratch("mlm_only");
  auto args = tiny("train", out, 6);
  for (const char* kv : {"pos=false", "constituent=false", "dependency=false", "srl_span=false",
                         "srl_dep=false", "electra=false"}) {
    args.push_back("--set");
    args.push_back(kv);
  }
  Result r = run(args);
  REQUIRE_MESSAGE(r.code == 0, r.err);
  for (const auto& row : metrics(out)) {
    CHECK(row["J_D"].get<double>() == 0.0);
    CHECK(row["J_lt"].get<double>() == 0.0);
    for (const char* k : {"J_1", "J_2", "J_3", "J_4"}) CHECK(row[k].get<double>() == 0.0);
    CHECK(row["J_G"].get<double>() > 0.0);
    CHECK(row["J_overall"].get<double>() == row["J_G"].get<double>());
  }
}

TEST_CASE("train: windowed loss decreases early on the toy configuration") {
  const std::string out = scratch("windows");
  Result r = run({"train", "--config", "data/toy/toy.cfg", "--out", out, "--set", "steps=250",
                  "--set", "checkpoint_every=1000"});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  const auto rows = metrics(out);
  REQUIRE(rows.size() == 250);
  double previous = 1e300;
  for (int w = 0; w < 5; ++w) {
    double sum = 0.0;
    for (int i = 0; i < 50; ++i) sum += rows[static_cast<size_t>(w * 50 + i)]["J_overall"].get<double>();
    INFO("window " << w << " mean " << sum / 50);
    CHECK(sum / 50 < previous);
    previous = sum / 50;
  }
}

}  // namespace
}  // namespace lingmt
