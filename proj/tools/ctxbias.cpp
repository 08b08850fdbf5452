// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ctxbias/commands.hpp"
#include "ctxbias/error.hpp"

namespace cli = ctxbias::cli;

namespace {

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw ctxbias::ArgumentError("expected a comma-separated list of positive integers, got '" + s + "'");
    }
  }
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(' ') - b + 1));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ctxbias: contextual-biasing ASR toolkit (corpus building, pruning, pooling, scoring)"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::size_t workers = 1;

  // bias-list
  cli::BiasListOptions bl;
  std::string bl_out;
  auto* c_bias = app.add_subcommand("bias-list", "Build per-utterance biasing lists (rare words + distractors)");
  c_bias->add_option("--manifest", bl.manifest, "Utterance manifest (JSONL)")->required();
  c_bias->add_option("--common-vocab", bl.common_vocab, "Common vocabulary, one word per line")->required();
  c_bias->add_option("--rare-pool", bl.rare_pool, "Rare-word pool, one word per line")->required();
  c_bias->add_option("-N,--distractors", bl.distractors, "Distractors per list")->capture_default_str();
  c_bias->add_flag("--train-range", bl.train_range, "Draw N uniformly from [400, 800] per utterance");
  c_bias->add_option("--out", bl_out, "Output directory")->required();
  c_bias->add_option("--seed", seed, "Random seed")->capture_default_str();
  c_bias->add_option("--workers", workers, "Worker threads")->capture_default_str();

  // cluster
  cli::ClusterOptions cl;
  std::string cl_mode = "window";
  std::size_t cl_k = 1;
  double cl_theta = 0.5;
  std::string cl_sweep;
  auto* c_cluster = app.add_subcommand("cluster", "Merge slide keywords into per-utterance contexts");
  c_cluster->add_option("--manifest", cl.manifest, "Utterance manifest (JSONL)")->required();
  c_cluster->add_option("--mode", cl_mode, "window | jaccard")->check(CLI::IsMember({"window", "jaccard"}))->capture_default_str();
  c_cluster->add_option("-k,--window", cl_k, "Slides per window (window mode)")->capture_default_str();
  c_cluster->add_option("--theta", cl_theta, "Jaccard merge threshold (jaccard mode)")->capture_default_str();
  c_cluster->add_option("--sweep", cl_sweep, "Comma-separated window widths, e.g. 1,3,5,7,9,15,25; --out is a directory");
  c_cluster->add_option("--out", cl.out, "Output manifest (or directory with --sweep)")->required();
  c_cluster->add_option("--seed", seed, "Unused; accepted for uniformity");
  c_cluster->add_option("--workers", workers, "Unused; accepted for uniformity");

  // stats
  cli::StatsOptions st;
  std::string st_out;
  auto* c_stats = app.add_subcommand("stats", "Keyword coverage / information rate and context length statistics");
  c_stats->add_option("--manifest", st.manifest, "Utterance manifest (JSONL)")->required();
  c_stats->add_option("--out", st_out, "Output JSON (default stdout)");

  // prune
  cli::PruneOptions pr;
  std::string pr_kind = "oracle";
  std::string pr_bias_dir;
  long long pr_top_k = -1;
  std::string pr_reference = "hypothesis";
  std::string pr_endpoint;
  long long pr_timeout_ms = 10000;
  std::string pr_out;
  auto* c_prune = app.add_subcommand("prune", "Prune keyword contexts (oracle, similarity or model)");
  c_prune->add_option("--manifest", pr.manifest, "Utterance manifest (JSONL)")->required();
  c_prune->add_option("--pruner", pr_kind, "oracle | similarity | model")
      ->check(CLI::IsMember({"oracle", "similarity", "model"}))
      ->capture_default_str();
  c_prune->add_option("--bias-dir", pr_bias_dir, "Biasing lists from bias-list (default: inline bias or context)");
  c_prune->add_option("--top-k", pr_top_k, "Similarity: keep at most this many (default unlimited)");
  c_prune->add_option("--threshold", pr.threshold, "Similarity: minimum score in [0, 1]")->capture_default_str();
  c_prune->add_option("--reference", pr_reference, "Similarity reference: hypothesis | transcript")
      ->check(CLI::IsMember({"hypothesis", "transcript"}))
      ->capture_default_str();
  c_prune->add_option("--endpoint", pr_endpoint, "Model: base URL (default $CTXBIAS_ENDPOINT)");
  c_prune->add_option("--endpoint-path", pr.endpoint.path, "Model: request path")->capture_default_str();
  c_prune->add_option("--timeout-ms", pr_timeout_ms, "Model: per-attempt timeout")->capture_default_str();
  c_prune->add_option("--max-retries", pr.endpoint.max_retries, "Model: retries after the first attempt")->capture_default_str();
  c_prune->add_option("--max-in-flight", pr.endpoint.max_in_flight, "Model: concurrent request cap")->capture_default_str();
  c_prune->add_flag("--markers", pr.markers, "Wrap keywords in <|startofcontext|>/<|endofcontext|>");
  c_prune->add_option("--out", pr_out, "Output directory")->required();
  c_prune->add_option("--seed", seed, "Unused; accepted for uniformity");
  c_prune->add_option("--workers", workers, "Worker threads")->capture_default_str();

  // pool
  cli::PoolOptions po;
  std::string po_wq, po_wk, po_mode = "per-head", po_sweep;
  auto* c_pool = app.add_subcommand("pool", "Speech-driven attention pooling of context embeddings");
  c_pool->add_option("--hx", po.h_x, "Speech embeddings T x d (SAPM or JSON)")->required();
  c_pool->add_option("--hz", po.h_z, "Context embeddings C x d (SAPM or JSON)")->required();
  c_pool->add_option("--wq", po_wq, "W_Q d x d (default: seeded random)");
  c_pool->add_option("--wk", po_wk, "W_K d x d (default: seeded random)");
  c_pool->add_option("-n,--window", po.window, "Pooling window size")->capture_default_str();
  c_pool->add_option("--heads", po.heads, "Attention heads")->capture_default_str();
  c_pool->add_option("--mode", po_mode, "per-head | averaged")->check(CLI::IsMember({"per-head", "averaged"}))->capture_default_str();
  c_pool->add_option("--sweep", po_sweep, "Comma-separated window sizes, e.g. 1,2,4,8");
  c_pool->add_option("--out", po.out, "Pooled matrix (.json for JSON, SAPM otherwise)")->required();
  c_pool->add_option("--seed", seed, "Seed for random projections")->capture_default_str();

  // prompt
  cli::PromptOptions pp;
  std::string pp_mode = "pc", pp_keywords, pp_manifest, pp_pruned, pp_out;
  auto* c_prompt = app.add_subcommand("prompt", "Render instruction prompts");
  c_prompt->add_option("--mode", pp_mode, "pc | pc-none | tpi-prune | tpi-recognize | jpi")->capture_default_str();
  c_prompt->add_option("--keywords", pp_keywords, "Comma-separated keywords");
  c_prompt->add_option("--manifest", pp_manifest, "Render one prompt per utterance");
  c_prompt->add_option("--pruned-dir", pp_pruned, "Use pruned keywords from prune output");
  c_prompt->add_flag("--markers", pp.markers, "Wrap keywords in <|startofcontext|>/<|endofcontext|>");
  c_prompt->add_option("--out", pp_out, "Output file (default stdout)");

  // score
  cli::ScoreOptions sc;
  std::string sc_bias = "full", sc_bias_dir, sc_pruned, sc_ins = "by-word", sc_out, sc_tsv;
  auto* c_score = app.add_subcommand("score", "WER / U-WER / B-WER / Recall");
  c_score->add_option("--manifest", sc.manifest, "Manifest with transcripts and hypotheses")->required();
  c_score->add_option("--bias", sc_bias, "full | pruned")->check(CLI::IsMember({"full", "pruned"}))->capture_default_str();
  c_score->add_option("--bias-dir", sc_bias_dir, "Biasing lists from bias-list (full mode)");
  c_score->add_option("--pruned-dir", sc_pruned, "Prune results (pruned mode)");
  c_score->add_option("--insertions", sc_ins, "by-word | unbiased")->check(CLI::IsMember({"by-word", "unbiased"}))->capture_default_str();
  c_score->add_option("--out", sc_out, "Report JSON (default stdout)");
  c_score->add_option("--tsv", sc_tsv, "Per-utterance TSV");
  c_score->add_option("--workers", workers, "Worker threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(ctxbias::ExitCode::kUsage);
  }

  try {
    if (*c_bias) {
      bl.out_dir = bl_out;
      bl.seed = seed;
      bl.workers = workers;
      cli::run_bias_list(bl, std::cerr);
    } else if (*c_cluster) {
      cl.mode = cl_mode == "window" ? ctxbias::corpus::ClusterMode::window(cl_k)
                                    : ctxbias::corpus::ClusterMode::jaccard(cl_theta);
      if (!cl_sweep.empty()) cl.sweep = parse_size_list(cl_sweep);
      cli::run_cluster(cl, std::cerr);
    } else if (*c_stats) {
      if (!st_out.empty()) st.out = st_out;
      cli::run_stats(st, std::cout, std::cerr);
    } else if (*c_prune) {
      pr.pruner = pr_kind == "oracle" ? cli::PrunerKind::kOracle
                  : pr_kind == "similarity" ? cli::PrunerKind::kSimilarity
                                            : cli::PrunerKind::kModel;
      if (!pr_bias_dir.empty()) pr.bias_dir = pr_bias_dir;
      if (pr_top_k >= 0) pr.top_k = static_cast<std::size_t>(pr_top_k);
      pr.use_hypothesis = pr_reference == "hypothesis";
      const auto env = ctxbias::pruning::EndpointConfig::from_env();
      pr.endpoint.base_url = pr_endpoint.empty() ? env.base_url : pr_endpoint;
      pr.endpoint.timeout = std::chrono::milliseconds(pr_timeout_ms);
      pr.out_dir = pr_out;
      pr.workers = workers;
      cli::run_prune(pr, std::cerr);
    } else if (*c_pool) {
      if (!po_wq.empty()) po.w_q = po_wq;
      if (!po_wk.empty()) po.w_k = po_wk;
      po.head_mode = po_mode == "per-head" ? ctxbias::pooling::HeadMode::kPerHeadSlice
                                           : ctxbias::pooling::HeadMode::kHeadAveraged;
      if (!po_sweep.empty()) po.sweep = parse_size_list(po_sweep);
      po.seed = seed;
      cli::run_pool(po, std::cerr);
    } else if (*c_prompt) {
      pp.mode = ctxbias::pruning::parse_mode(pp_mode);
      pp.keywords = split_commas(pp_keywords);
      if (!pp_manifest.empty()) pp.manifest = pp_manifest;
      if (!pp_pruned.empty()) pp.pruned_dir = pp_pruned;
      if (!pp_out.empty()) pp.out = pp_out;
      cli::run_prompt(pp, std::cout, std::cerr);
    } else if (*c_score) {
      sc.bias = sc_bias == "full" ? cli::BiasSource::kFull : cli::BiasSource::kPruned;
      if (!sc_bias_dir.empty()) sc.bias_dir = sc_bias_dir;
      if (!sc_pruned.empty()) sc.pruned_dir = sc_pruned;
      sc.insertions = sc_ins == "by-word" ? ctxbias::scoring::InsertionPolicy::kByInsertedWord
                                          : ctxbias::scoring::InsertionPolicy::kAllUnbiased;
      if (!sc_out.empty()) sc.out = sc_out;
      if (!sc_tsv.empty()) sc.tsv = sc_tsv;
      sc.workers = workers;
      cli::run_score(sc, std::cout, std::cerr);
    }
  } catch (const ctxbias::ProtocolError& e) {
    std::cerr << "error: " << e.what() << "\nraw body: " << e.raw_body() << "\n";
    return static_cast<int>(e.code());
  } catch (const ctxbias::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(ctxbias::ExitCode::kIo);
  }
  return 0;
}
