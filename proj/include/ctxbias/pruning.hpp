// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// Context pruning: oracle and similarity pruners, instruction prompts for the
// concatenation / two-stage / joint pipelines, and pruning F1.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ctxbias/text.hpp"

namespace ctxbias::pruning {

enum class PruneSource { kOracle, kSimilarity, kModel };
std::string_view source_name(PruneSource s);

struct PruneResult {
  /// Normalized, duplicate-free, a subset of the input keywords.
  std::vector<std::string> kept;
  /// Parallel to `kept` when the pruner produces relevance scores.
  std::optional<std::vector<double>> scores;
  PruneSource source = PruneSource::kOracle;
  /// Model outputs discarded because they were not among the input keywords.
  std::vector<std::string> dropped;
};

/// Keywords whose normalized token run appears in the normalized transcript,
/// in input order.
PruneResult oracle_prune(const std::vector<std::string>& keywords, const text::Tokens& transcript);

/// Code-point Levenshtein similarity 1 - dist / max(len_a, len_b); 1.0 for two
/// empty strings.
double string_similarity(std::string_view a, std::string_view b);

/// Scores each keyword by its best similarity against any reference n-gram
/// with the keyword's token count, keeps scores >= threshold, then the top_k
/// by score (ties to the earlier keyword). Output stays in input order.
PruneResult similarity_prune(const std::vector<std::string>& keywords, const text::Tokens& reference,
                             std::optional<std::size_t> top_k, double threshold);

/// Set F1 over normalized keyword types; 1.0 when both are empty, 0.0 when
/// exactly one is.
double prune_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold);

// ---------------------------------------------------------------------------
// Prompts

inline constexpr std::string_view kStartOfContext = "<|startofcontext|>";
inline constexpr std::string_view kEndOfContext = "<|endofcontext|>";

enum class PromptMode { kPcWithKeywords, kPcNoKeywords, kTpiPrune, kTpiRecognize, kJpi };
std::string_view mode_name(PromptMode m);
/// Accepts "pc", "pc-none", "tpi-prune", "tpi-recognize", "jpi".
PromptMode parse_mode(std::string_view name);

struct RenderedPrompt {
  PromptMode mode = PromptMode::kPcNoKeywords;
  std::string text;
  /// Byte range [begin, end) of the joined keywords; inside the markers when
  /// they are enabled. Empty range for the keyword-free prompt.
  std::size_t context_begin = 0;
  std::size_t context_end = 0;
};

/// Instantiates the instruction template; keywords are joined by ", ".
/// ArgumentError when a keyworded mode receives no keywords.
RenderedPrompt render_prompt(PromptMode mode, const std::vector<std::string>& keywords, bool with_markers);

struct JpiResponse {
  std::vector<std::string> selected_keywords;
  std::string transcription;
  friend bool operator==(const JpiResponse&, const JpiResponse&) = default;
};

/// "Selected keywords are: <k1, k2>. Transcription: <text>"
std::string render_jpi_response(const JpiResponse& r);
/// Inverse of render_jpi_response. ParseError quoting the text when a marker
/// phrase is missing or the transcription is empty.
JpiResponse parse_jpi(std::string_view response);

}  // namespace ctxbias::pruning
