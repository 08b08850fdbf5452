// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// Subcommand bodies behind the `ctxbias` executable. Each takes a plain
// options struct, writes its outputs atomically, logs human-readable lines to
// `log`, and throws ctxbias::Error subclasses whose code() is the exit code.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ctxbias/corpus.hpp"
#include "ctxbias/model_client.hpp"
#include "ctxbias/pooling.hpp"
#include "ctxbias/pruning.hpp"
#include "ctxbias/scoring.hpp"

namespace ctxbias::cli {

namespace fs = std::filesystem;

/// Runs fn(0..count-1) on up to `workers` threads; rethrows the first failure.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn);

/// Utterance id made safe for use as a file stem.
std::string file_stem_for(const std::string& id);

struct BiasListOptions {
  fs::path manifest;
  fs::path common_vocab;
  fs::path rare_pool;
  std::size_t distractors = 100;
  /// Draw each utterance's distractor count uniformly from [400, 800].
  bool train_range = false;
  std::uint64_t seed = 0;
  fs::path out_dir;
  std::size_t workers = 1;
};
/// Writes <out_dir>/<id>.json per utterance. Returns the number written.
std::size_t run_bias_list(const BiasListOptions& opt, std::ostream& log);

struct ClusterOptions {
  fs::path manifest;
  corpus::ClusterMode mode;
  /// Single run: augmented manifest path (stats go to <out>.stats.json).
  /// Sweep: output directory.
  fs::path out;
  /// Window widths for a context-length sweep; empty for a single run.
  std::vector<std::size_t> sweep;
};
void run_cluster(const ClusterOptions& opt, std::ostream& log);

/// Applies `mode` to every utterance, setting `context` to the merged
/// keywords around its current slide.
std::vector<corpus::Utterance> cluster_manifest(std::vector<corpus::Utterance> utterances,
                                                const corpus::ClusterMode& mode);

corpus::ContextStats manifest_stats(const std::vector<corpus::Utterance>& utterances);

struct StatsOptions {
  fs::path manifest;
  std::optional<fs::path> out;  // stdout when unset
};
void run_stats(const StatsOptions& opt, std::ostream& out, std::ostream& log);

enum class PrunerKind { kOracle, kSimilarity, kModel };

struct PruneOptions {
  fs::path manifest;
  PrunerKind pruner = PrunerKind::kOracle;
  /// Per-utterance biasing lists from bias-list; otherwise inline `bias`,
  /// otherwise the utterance context.
  std::optional<fs::path> bias_dir;
  // similarity
  std::optional<std::size_t> top_k;
  double threshold = 0.8;
  bool use_hypothesis = true;  // similarity reference: hypothesis when present
  // model
  pruning::EndpointConfig endpoint;
  bool markers = false;
  fs::path out_dir;
  std::size_t workers = 1;
};

struct PruneSummary {
  std::size_t utterances = 0;
  /// Micro F1 (percent) against the oracle, over utterances with transcripts.
  std::optional<double> f1;
  std::size_t dropped = 0;
};
PruneSummary run_prune(const PruneOptions& opt, std::ostream& log);

struct PoolOptions {
  fs::path h_x;
  fs::path h_z;
  std::optional<fs::path> w_q;
  std::optional<fs::path> w_k;
  /// Seeds W_Q / W_K when their files are not given.
  std::uint64_t seed = 0;
  std::size_t heads = 1;
  std::size_t window = 2;
  pooling::HeadMode head_mode = pooling::HeadMode::kPerHeadSlice;
  std::vector<std::size_t> sweep;
  fs::path out;
};
/// Returns the pooled matrix paths written (one per window size).
std::vector<fs::path> run_pool(const PoolOptions& opt, std::ostream& log);

struct PromptOptions {
  pruning::PromptMode mode = pruning::PromptMode::kPcWithKeywords;
  std::vector<std::string> keywords;
  /// When set, one prompt per utterance (JSONL) from its keywords.
  std::optional<fs::path> manifest;
  std::optional<fs::path> pruned_dir;
  bool markers = false;
  std::optional<fs::path> out;
};
void run_prompt(const PromptOptions& opt, std::ostream& out, std::ostream& log);

enum class BiasSource { kFull, kPruned };

struct ScoreOptions {
  fs::path manifest;
  BiasSource bias = BiasSource::kFull;
  std::optional<fs::path> bias_dir;
  std::optional<fs::path> pruned_dir;
  scoring::InsertionPolicy insertions = scoring::InsertionPolicy::kByInsertedWord;
  std::optional<fs::path> out;  // stdout when unset
  std::optional<fs::path> tsv;
  std::size_t workers = 1;
};

struct ScoreSummary {
  scoring::ScoreReport report;
  std::size_t scored = 0;
  std::size_t skipped = 0;
};
ScoreSummary run_score(const ScoreOptions& opt, std::ostream& out, std::ostream& log);

}  // namespace ctxbias::cli
