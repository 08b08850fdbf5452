// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// Biasing-list construction, slide clustering and context statistics.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ctxbias/matrix.hpp"
#include "ctxbias/text.hpp"

namespace ctxbias::corpus {

struct Slide {
  std::int64_t index = 0;
  /// Normalized, duplicate-free, in first-appearance order.
  std::vector<std::string> keywords;
};

struct Utterance {
  std::string id;
  std::string transcript;
  std::vector<Slide> slides;
  /// `index` of the slide on screen during the utterance; first slide if unset.
  std::optional<std::int64_t> current_slide;
  std::optional<std::string> hypothesis;
  std::optional<std::string> embedding_path;
  /// Merged keyword context written by clustering.
  std::optional<std::vector<std::string>> context;
  /// Inline biasing keywords.
  std::optional<std::vector<std::string>> bias;

  text::Tokens transcript_tokens() const { return text::normalize(transcript); }
};

/// The keyword context an utterance is conditioned on: `context` when set,
/// otherwise the current slide's keywords.
std::vector<std::string> resolve_context(const Utterance& u);

enum class Provenance { kCore, kDistractor };

struct BiasEntry {
  std::string keyword;
  Provenance provenance = Provenance::kCore;
  friend bool operator==(const BiasEntry&, const BiasEntry&) = default;
};

struct BiasingList {
  std::vector<BiasEntry> entries;

  std::vector<std::string> keywords() const;
  std::vector<std::string> core() const;
  std::size_t size() const { return entries.size(); }
  friend bool operator==(const BiasingList&, const BiasingList&) = default;
};

struct VocabResources {
  std::unordered_set<std::string> common_vocab;
  /// Ordered so that seeded sampling is reproducible.
  std::vector<std::string> rare_pool;

  /// Normalizes both lists; throws ArgumentError if they overlap.
  static VocabResources from_lists(const std::vector<std::string>& common, const std::vector<std::string>& rare);
  /// One word per line, UTF-8.
  static VocabResources load(const std::filesystem::path& common_path, const std::filesystem::path& rare_path);
};

/// Core = transcript words outside the common vocabulary (first-appearance
/// order), followed by `n_distractors` words drawn without replacement from the
/// rare pool minus every transcript word. ResourceError on a short pool.
BiasingList build_bias_list(const text::Tokens& transcript, const VocabResources& vocab, std::size_t n_distractors,
                            Rng& rng);
BiasingList build_bias_list(const text::Tokens& transcript, const VocabResources& vocab, std::size_t n_distractors,
                            std::uint64_t seed);

/// Training-time list size, uniform in [400, 800].
std::size_t sample_train_n(Rng& rng);
std::size_t sample_train_n(std::uint64_t seed);

/// |a ∩ b| / |a ∪ b| over the distinct elements; 1.0 when both are empty.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

struct ClusterMode {
  enum class Kind { kWindow, kJaccard };
  Kind kind = Kind::kWindow;
  std::size_t k = 1;     // window width in slides
  double theta = 0.5;    // Jaccard merge threshold

  static ClusterMode window(std::size_t k) { return {Kind::kWindow, k, 0.5}; }
  static ClusterMode jaccard(double theta) { return {Kind::kJaccard, 1, theta}; }
  void validate() const;
};

/// Merged keyword context for every slide position.
///   window(k): union of slides [i - (k-1)/2, i + k/2], clipped to the deck.
///   jaccard(θ): adjacent slides join one cluster while jaccard(prev, next) >= θ;
///   each slide gets its cluster's union.
/// Unions run left to right, keep first appearance and drop duplicates.
std::vector<std::vector<std::string>> cluster_slides(const std::vector<Slide>& slides, const ClusterMode& mode);

struct ContextSample {
  text::Tokens transcript;
  std::vector<std::string> context;  // normalized keywords
};

struct ContextStats {
  double keyword_coverage_rate = 0.0;  // percent
  double information_rate = 0.0;       // percent
  double token_length_mean = 0.0;
  double token_length_median = 0.0;

  // Summed numerators and denominators behind the rates.
  std::size_t covered_tokens = 0;
  std::size_t transcript_tokens = 0;
  std::size_t core_keywords = 0;
  std::size_t context_keywords = 0;
  std::size_t utterances = 0;
};

/// A context keyword is core when its token run occurs in the transcript.
/// Coverage = transcript tokens inside a core-keyword occurrence / transcript
/// tokens. Information = core keyword types / context keyword types. Both are
/// pooled over the corpus. Lengths count normalized tokens per context.
ContextStats context_stats(const std::vector<ContextSample>& samples);

}  // namespace ctxbias::corpus
