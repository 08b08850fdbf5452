// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// Levenshtein alignment and the biased/unbiased error-rate family.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "ctxbias/text.hpp"

namespace ctxbias::scoring {

enum class OpKind { kMatch, kSubstitute, kDelete, kInsert };

struct EditOp {
  OpKind kind;
  std::size_t ref = 0;  // meaningful for match/substitute/delete
  std::size_t hyp = 0;  // meaningful for match/substitute/insert
  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct Alignment {
  std::vector<EditOp> ops;
  std::size_t cost = 0;
};

/// Minimum unit-cost alignment. The backtrace walks from the end and at each
/// cell prefers Match, then Substitute, then Delete, then Insert.
Alignment align(const text::Tokens& ref, const text::Tokens& hyp);

/// Edit distance only, two-row DP.
std::size_t edit_distance(const text::Tokens& ref, const text::Tokens& hyp);

enum class InsertionPolicy {
  /// An inserted word counts toward B when it is itself a bias token.
  kByInsertedWord,
  /// Every insertion counts toward U.
  kAllUnbiased,
};

struct Counts {
  std::size_t sub = 0, del = 0, ins = 0, hits = 0;
  std::size_t b_sub = 0, b_del = 0, b_ins = 0, b_hits = 0;
  std::size_t ref_len = 0, b_ref_len = 0;

  std::size_t errors() const { return sub + del + ins; }
  std::size_t b_errors() const { return b_sub + b_del + b_ins; }
  std::size_t u_errors() const { return errors() - b_errors(); }
  std::size_t u_ref_len() const { return ref_len - b_ref_len; }

  Counts& operator+=(const Counts& o);
  friend bool operator==(const Counts&, const Counts&) = default;
};

/// Rates are percentages; absent when their denominator is zero.
struct ScoreReport {
  Counts counts;
  std::optional<double> wer, uwer, bwer, recall;

  static ScoreReport from_counts(const Counts& c);
  friend bool operator==(const ScoreReport&, const ScoreReport&) = default;
};

/// Normalized single-token membership set. Multi-word keywords contribute
/// each of their tokens.
using BiasSet = std::unordered_set<std::string>;
BiasSet make_bias_set(const std::vector<std::string>& keywords);

/// Substitutions and deletions follow the reference word's membership;
/// insertions follow `policy`. Recall = biased reference words matched
/// exactly / biased reference words. ArgumentError if the alignment does not
/// describe (ref, hyp).
ScoreReport score(const Alignment& alignment, const text::Tokens& ref, const text::Tokens& hyp, const BiasSet& bias,
                  InsertionPolicy policy = InsertionPolicy::kByInsertedWord);

/// Sums counts and recomputes rates. ArgumentError on empty input.
ScoreReport aggregate(const std::vector<ScoreReport>& reports);

/// "WER a.bc (U u.vw / B x.yz) R rr.ss", with "-" for absent rates.
std::string summary_line(const ScoreReport& r);

/// "12.34" or "-".
std::string format_rate(const std::optional<double>& rate);

}  // namespace ctxbias::scoring
