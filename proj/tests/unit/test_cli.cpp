// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include <sys/wait.h>

#include <cstdlib>
#include <sstream>

#include <doctest.h>

#include "ctxbias/commands.hpp"
#include "ctxbias/error.hpp"
#include "ctxbias/fileutil.hpp"
#include "ctxbias/matrix_io.hpp"
#include "ctxbias/serialize.hpp"
#include "ctxbias/stub_server.hpp"
#include "oracles.hpp"

using namespace ctxbias;
using namespace ctxbias::cli;
namespace fs = std::filesystem;

namespace {

fs::path corpus_dir() { return testing::source_dir() / "fixtures" / "corpus"; }
fs::path fixture_manifest() { return corpus_dir() / "manifest.jsonl"; }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CTXBIAS_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path head_manifest(const fs::path& dir, std::size_t n) {
  auto utts = load_manifest(fixture_manifest());
  utts.resize(n);
  const fs::path p = dir / "head.jsonl";
  write_file_atomic(p, dump_manifest(utts));
  return p;
}

}  // namespace

TEST_CASE("parallel_for visits every index and rethrows failures") {
  std::vector<int> seen(100, 0);
  parallel_for(seen.size(), 4, [&](std::size_t i) { seen[i] += 1; });
  for (int v : seen) CHECK(v == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 7) throw ArgumentError("boom");
                  }),
                  ArgumentError);
}

TEST_CASE("file stems are filesystem safe") {
  CHECK(file_stem_for("eye-01") == "eye-01");
  CHECK(file_stem_for("a/b c") == "a_b_c");
  CHECK(file_stem_for("..") == "_..");
}

TEST_CASE("bias-list writes one list per utterance and is reproducible") {
  const auto dir = testing::fresh_dir("cli-bias");
  std::ostringstream log;
  BiasListOptions o;
  o.manifest = head_manifest(dir, 3);
  o.common_vocab = corpus_dir() / "common_vocab.txt";
  o.rare_pool = corpus_dir() / "rare_pool.txt";
  o.distractors = 100;
  o.seed = 7;
  o.out_dir = dir / "a";
  o.workers = 2;
  CHECK(run_bias_list(o, log) == 3);
  const auto vocab = corpus::VocabResources::load(o.common_vocab, o.rare_pool);
  for (const auto& u : load_manifest(o.manifest)) {
    const auto list = bias_list_from_json(load_json(o.out_dir / (u.id + ".json")));
    const auto core = build_bias_list(u.transcript_tokens(), vocab, 0, 1).size();
    CHECK(list.size() == core + 100);
  }
  o.out_dir = dir / "b";
  o.workers = 1;
  run_bias_list(o, log);
  for (const auto& e : fs::directory_iterator(dir / "a")) {
    CHECK(read_file(e.path()) == read_file(dir / "b" / e.path().filename()));
  }

  o.out_dir = dir / "core";
  o.distractors = 0;
  run_bias_list(o, log);
  const auto first = bias_list_from_json(load_json(o.out_dir / "eye-01.json"));
  CHECK(first.keywords() == first.core());

  o.out_dir = dir / "train";
  o.train_range = true;
  run_bias_list(o, log);
  for (const auto& e : fs::directory_iterator(o.out_dir)) {
    const auto n = bias_list_from_json(load_json(e.path())).size();
    CHECK(n >= 400);
    CHECK(n <= 800 + 10);
  }
}

TEST_CASE("cluster window 1 keeps slide contexts and wider windows are supersets") {
  const auto utts = load_manifest(fixture_manifest());
  const auto w1 = cluster_manifest(utts, corpus::ClusterMode::window(1));
  const auto w5 = cluster_manifest(utts, corpus::ClusterMode::window(5));
  const auto w25 = cluster_manifest(utts, corpus::ClusterMode::window(25));
  for (std::size_t i = 0; i < utts.size(); ++i) {
    CHECK(*w1[i].context == corpus::resolve_context(utts[i]));
    for (const auto& kw : *w5[i].context) {
      CHECK(std::find(w25[i].context->begin(), w25[i].context->end(), kw) != w25[i].context->end());
    }
    CHECK(w25[i].context->size() > w5[i].context->size());
  }
}

TEST_CASE("cluster sweep writes one manifest and stats per width") {
  const auto dir = testing::fresh_dir("cli-sweep");
  std::ostringstream log;
  ClusterOptions o;
  o.manifest = fixture_manifest();
  o.out = dir / "sweep";
  o.sweep = {1, 3, 5, 7, 9, 15, 25};
  run_cluster(o, log);
  double last_mean = 0.0;
  for (std::size_t k : o.sweep) {
    CHECK(fs::exists(o.out / ("window_k" + std::to_string(k) + ".jsonl")));
    const auto stats = load_json(o.out / ("window_k" + std::to_string(k) + ".stats.json"));
    CHECK(stats["token_length_mean"].get<double>() >= last_mean);
    CHECK(stats.contains("token_length_median"));
    last_mean = stats["token_length_mean"].get<double>();
  }
  CHECK(fs::exists(o.out / "sweep.json"));
}

TEST_CASE("oracle prune reports F1 100 and similarity kept sets shrink with threshold") {
  const auto dir = testing::fresh_dir("cli-prune");
  std::ostringstream log;
  PruneOptions o;
  o.manifest = fixture_manifest();
  o.out_dir = dir / "oracle";
  const PruneSummary s = run_prune(o, log);
  CHECK(s.utterances == 20);
  REQUIRE(s.f1);
  CHECK(*s.f1 == 100.0);
  CHECK(log.str().find("prune F1 100.00") != std::string::npos);

  o.pruner = PrunerKind::kSimilarity;
  std::map<std::string, std::size_t> previous;
  for (double th : {0.6, 0.7, 0.8, 0.9, 1.0}) {
    o.threshold = th;
    o.out_dir = dir / ("sim" + std::to_string(th));
    run_prune(o, log);
    for (const auto& e : fs::directory_iterator(o.out_dir)) {
      const std::size_t kept = load_json(e.path())["kept"].size();
      const std::string id = e.path().stem().string();
      if (previous.contains(id)) CHECK(kept <= previous[id]);
      previous[id] = kept;
    }
  }
}

TEST_CASE("model prune against the stub matches its script") {
  const auto dir = testing::fresh_dir("cli-model");
  const auto utts = load_manifest(fixture_manifest());
  nlohmann::json script = nlohmann::json::object();
  for (const auto& u : utts) {
    const auto ctx = corpus::resolve_context(u);
    script[*u.embedding_path] = ctx.empty() ? "" : ctx.front();
  }
  StubServer stub(script);
  stub.start();
  std::ostringstream log;
  PruneOptions o;
  o.manifest = fixture_manifest();
  o.pruner = PrunerKind::kModel;
  o.endpoint.base_url = stub.base_url();
  o.out_dir = dir / "model";
  o.workers = 3;
  run_prune(o, log);
  for (const auto& u : utts) {
    const auto j = load_json(o.out_dir / (u.id + ".json"));
    CHECK(j["source"] == "model");
    CHECK(j["kept"] == nlohmann::json::array({corpus::resolve_context(u).front()}));
  }
}

TEST_CASE("pool writes rows ceil(C/n), n = 1 reproduces h_z, sweep emits every n") {
  const auto dir = testing::fresh_dir("cli-pool");
  save_matrix(dir / "hx.sapm", random_init(12, 8, 1, 1.0));
  const Matrix hz = random_init(332, 8, 2, 1.0);
  save_matrix(dir / "hz.sapm", hz);
  std::ostringstream log;
  PoolOptions o;
  o.h_x = dir / "hx.sapm";
  o.h_z = dir / "hz.sapm";
  o.heads = 2;
  o.seed = 3;
  o.out = dir / "pooled.sapm";
  run_pool(o, log);
  CHECK(load_matrix(o.out).rows() == 166);
  CHECK(fs::exists(dir / "pooled.sapm.weights.json"));

  o.window = 1;
  o.out = dir / "ident.sapm";
  run_pool(o, log);
  CHECK(load_matrix(o.out) == load_matrix(dir / "hz.sapm"));

  o.sweep = {1, 2, 4, 8};
  o.out = dir / "sweep.sapm";
  const auto paths = run_pool(o, log);
  REQUIRE(paths.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t n = o.sweep[i];
    CHECK(load_matrix(paths[i]).rows() == (332 + n - 1) / n);
  }

  save_matrix(dir / "bad.sapm", Matrix(4, 5));
  o.sweep.clear();
  o.w_q = dir / "bad.sapm";
  try {
    run_pool(o, log);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("bad.sapm") != std::string::npos);
    CHECK(std::string(e.what()).find("4x5") != std::string::npos);
  }
}

TEST_CASE("score: perfect hypotheses, skips, and bias source never changes WER") {
  const auto dir = testing::fresh_dir("cli-score");
  auto utts = load_manifest(fixture_manifest());
  auto perfect = utts;
  for (auto& u : perfect) u.hypothesis = u.transcript;
  perfect[0].hypothesis.reset();
  write_file_atomic(dir / "perfect.jsonl", dump_manifest(perfect));

  std::ostringstream out, log;
  ScoreOptions o;
  o.manifest = dir / "perfect.jsonl";
  o.tsv = dir / "perfect.tsv";
  const ScoreSummary s = run_score(o, out, log);
  CHECK(s.skipped == 1);
  CHECK(s.scored == 19);
  CHECK(*s.report.wer == 0.0);
  CHECK(log.str().find("skipped 1") != std::string::npos);
  CHECK(read_file(dir / "perfect.tsv").rfind("id\twer\tuwer\tbwer\trecall\n", 0) == 0);

  PruneOptions p;
  p.manifest = fixture_manifest();
  p.out_dir = dir / "pruned";
  run_prune(p, log);
  ScoreOptions full;
  full.manifest = fixture_manifest();
  ScoreOptions pruned = full;
  pruned.bias = BiasSource::kPruned;
  pruned.pruned_dir = p.out_dir;
  const auto a = run_score(full, out, log).report;
  const auto b = run_score(pruned, out, log).report;
  CHECK(a.counts.errors() == b.counts.errors());
  CHECK(*a.wer == *b.wer);
}

TEST_CASE("prompt command renders single and per-utterance prompts") {
  std::ostringstream out, log;
  PromptOptions o;
  o.mode = pruning::PromptMode::kTpiPrune;
  o.keywords = {"a", "b"};
  o.markers = true;
  run_prompt(o, out, log);
  const auto j = nlohmann::json::parse(out.str());
  CHECK(j["text"] == "Select keywords that may appear in the speech from the following keywords list: "
                     "<|startofcontext|>a, b<|endofcontext|>");

  std::ostringstream lines;
  o.manifest = fixture_manifest();
  run_prompt(o, lines, log);
  std::istringstream in(lines.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(in, line)) ++count;
  CHECK(count == 20);
}

TEST_CASE("executable exit codes") {
  const auto dir = testing::fresh_dir("cli-exit");
  const std::string m = fixture_manifest().string();
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("stats --manifest " + m) == 0);
  CHECK(run_cli("no-such-command") == 1);
  CHECK(run_cli("cluster --manifest " + m + " -k 0 --out " + (dir / "c.jsonl").string()) == 1);
  CHECK(run_cli("stats --manifest " + (dir / "missing.jsonl").string()) == 2);
  write_file_atomic(dir / "broken.jsonl", "{\"id\":\"a\",\"transcript\":\"x\"}\n{not json\n");
  CHECK(run_cli("stats --manifest " + (dir / "broken.jsonl").string()) == 2);
  CHECK_THROWS_WITH_AS(load_manifest(dir / "broken.jsonl"), doctest::Contains(":2:"), ParseError);

  int port = 0;
  {
    StubServer stub(nlohmann::json::object());
    port = stub.start();
  }
  CHECK(run_cli("prune --manifest " + m + " --pruner model --max-retries 1 --endpoint http://127.0.0.1:" +
                std::to_string(port) + " --out " + (dir / "m").string()) == 3);
}

TEST_CASE("the CLI pipeline is byte-identical across runs") {
  const auto dir = testing::fresh_dir("cli-determinism");
  const std::string m = fixture_manifest().string();
  for (const std::string run : {"r1", "r2"}) {
    const auto d = (dir / run).string();
    REQUIRE(run_cli("cluster --manifest " + m + " -k 3 --out " + d + "/c.jsonl") == 0);
    REQUIRE(run_cli("bias-list --manifest " + m + " --common-vocab " + (corpus_dir() / "common_vocab.txt").string() +
                    " --rare-pool " + (corpus_dir() / "rare_pool.txt").string() + " -N 100 --seed 5 --workers 3 --out " +
                    d + "/bias") == 0);
    REQUIRE(run_cli("prune --manifest " + d + "/c.jsonl --pruner oracle --workers 2 --out " + d + "/pr") == 0);
    REQUIRE(run_cli("score --manifest " + d + "/c.jsonl --bias pruned --pruned-dir " + d + "/pr --out " + d +
                    "/r.json --tsv " + d + "/r.tsv") == 0);
  }
  for (const auto& e : fs::recursive_directory_iterator(dir / "r1")) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir / "r1");
    CHECK(read_file(e.path()) == read_file(dir / "r2" / rel));
  }
}
