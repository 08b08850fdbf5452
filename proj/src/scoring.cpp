// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/scoring.hpp"

#include <algorithm>
#include <cstdio>

#include "ctxbias/error.hpp"

namespace ctxbias::scoring {
namespace {

std::optional<double> rate(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return 100.0 * static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

Alignment align(const text::Tokens& ref, const text::Tokens& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t w = m + 1;
  std::vector<std::size_t> dp((n + 1) * w);
  for (std::size_t j = 0; j <= m; ++j) dp[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    dp[i * w] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = dp[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      dp[i * w + j] = std::min({diag, dp[(i - 1) * w + j] + 1, dp[i * w + j - 1] + 1});
    }
  }

  Alignment out;
  out.cost = dp[n * w + m];
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = dp[i * w + j];
    if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] && here == dp[(i - 1) * w + j - 1]) {
      out.ops.push_back({OpKind::kMatch, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && j > 0 && ref[i - 1] != hyp[j - 1] && here == dp[(i - 1) * w + j - 1] + 1) {
      out.ops.push_back({OpKind::kSubstitute, i - 1, j - 1});
      --i, --j;
    } else if (i > 0 && here == dp[(i - 1) * w + j] + 1) {
      out.ops.push_back({OpKind::kDelete, i - 1, 0});
      --i;
    } else {
      out.ops.push_back({OpKind::kInsert, 0, j - 1});
      --j;
    }
  }
  std::reverse(out.ops.begin(), out.ops.end());
  return out;
}

std::size_t edit_distance(const text::Tokens& ref, const text::Tokens& hyp) {
  std::vector<std::size_t> prev(hyp.size() + 1);
  std::vector<std::size_t> cur(hyp.size() + 1);
  for (std::size_t j = 0; j <= hyp.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ref.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= hyp.size(); ++j) {
      cur[j] = std::min({prev[j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1), prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[hyp.size()];
}

Counts& Counts::operator+=(const Counts& o) {
  sub += o.sub, del += o.del, ins += o.ins, hits += o.hits;
  b_sub += o.b_sub, b_del += o.b_del, b_ins += o.b_ins, b_hits += o.b_hits;
  ref_len += o.ref_len, b_ref_len += o.b_ref_len;
  return *this;
}

ScoreReport ScoreReport::from_counts(const Counts& c) {
  ScoreReport r;
  r.counts = c;
  r.wer = rate(c.errors(), c.ref_len);
  r.uwer = rate(c.u_errors(), c.u_ref_len());
  r.bwer = rate(c.b_errors(), c.b_ref_len);
  r.recall = rate(c.b_hits, c.b_ref_len);
  return r;
}

BiasSet make_bias_set(const std::vector<std::string>& keywords) {
  BiasSet set;
  for (const auto& k : keywords) {
    for (auto& tok : text::normalize(k)) set.insert(std::move(tok));
  }
  return set;
}

ScoreReport score(const Alignment& alignment, const text::Tokens& ref, const text::Tokens& hyp, const BiasSet& bias,
                  InsertionPolicy policy) {
  std::size_t next_ref = 0;
  std::size_t next_hyp = 0;
  std::size_t cost = 0;
  Counts c;
  c.ref_len = ref.size();
  for (const auto& tok : ref) c.b_ref_len += bias.contains(tok) ? 1 : 0;

  auto bad = [](const std::string& why) { throw ArgumentError("score: alignment does not match tokens: " + why); };
  for (const EditOp& op : alignment.ops) {
    const bool uses_ref = op.kind != OpKind::kInsert;
    const bool uses_hyp = op.kind != OpKind::kDelete;
    if (uses_ref && op.ref != next_ref) bad("reference index " + std::to_string(op.ref) + " out of order");
    if (uses_hyp && op.hyp != next_hyp) bad("hypothesis index " + std::to_string(op.hyp) + " out of order");
    if (uses_ref && op.ref >= ref.size()) bad("reference index past end");
    if (uses_hyp && op.hyp >= hyp.size()) bad("hypothesis index past end");
    const bool ref_biased = uses_ref && bias.contains(ref[op.ref]);
    switch (op.kind) {
      case OpKind::kMatch:
        if (ref[op.ref] != hyp[op.hyp]) bad("match of unequal words");
        ++c.hits;
        c.b_hits += ref_biased ? 1 : 0;
        break;
      case OpKind::kSubstitute:
        if (ref[op.ref] == hyp[op.hyp]) bad("substitution of equal words");
        ++c.sub, ++cost;
        c.b_sub += ref_biased ? 1 : 0;
        break;
      case OpKind::kDelete:
        ++c.del, ++cost;
        c.b_del += ref_biased ? 1 : 0;
        break;
      case OpKind::kInsert:
        ++c.ins, ++cost;
        if (policy == InsertionPolicy::kByInsertedWord && bias.contains(hyp[op.hyp])) ++c.b_ins;
        break;
    }
    next_ref += uses_ref ? 1 : 0;
    next_hyp += uses_hyp ? 1 : 0;
  }
  if (next_ref != ref.size() || next_hyp != hyp.size()) bad("not every token is covered");
  if (cost != alignment.cost) bad("stated cost differs from its operations");
  return ScoreReport::from_counts(c);
}

ScoreReport aggregate(const std::vector<ScoreReport>& reports) {
  if (reports.empty()) throw ArgumentError("aggregate: no reports");
  Counts total;
  for (const auto& r : reports) total += r.counts;
  return ScoreReport::from_counts(total);
}

std::string format_rate(const std::optional<double>& r) {
  if (!r) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", *r);
  return buf;
}

std::string summary_line(const ScoreReport& r) {
  return "WER " + format_rate(r.wer) + " (U " + format_rate(r.uwer) + " / B " + format_rate(r.bwer) + ") R " +
         format_rate(r.recall);
}

}  // namespace ctxbias::scoring
