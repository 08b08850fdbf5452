// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/pruning.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "ctxbias/error.hpp"

namespace ctxbias::pruning {
namespace {

constexpr std::string_view kPcWithKeywords =
    "Transcribe speech to text according to keywords that may appear in the utterance. Possible keywords are: ";
constexpr std::string_view kPcNoKeywords = "Transcribe speech to text.";
constexpr std::string_view kTpiPrune = "Select keywords that may appear in the speech from the following keywords list: ";
constexpr std::string_view kJpi =
    "First select keywords that may appear in the speech from given keywords list. Then transcribe speech to text "
    "according to selected keywords. Keywords are: ";

constexpr std::string_view kJpiSelected = "Selected keywords are:";
constexpr std::string_view kJpiTranscription = "Transcription:";

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::size_t levenshtein(const std::u32string& a, const std::u32string& b) {
  std::vector<std::size_t> prev(b.size() + 1);
  std::vector<std::size_t> cur(b.size() + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1), prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

}  // namespace

std::string_view source_name(PruneSource s) {
  switch (s) {
    case PruneSource::kOracle:
      return "oracle";
    case PruneSource::kSimilarity:
      return "similarity";
    case PruneSource::kModel:
      return "model";
  }
  return "unknown";
}

PruneResult oracle_prune(const std::vector<std::string>& keywords, const text::Tokens& transcript) {
  PruneResult r;
  r.source = PruneSource::kOracle;
  for (auto& k : text::normalize_keyword_list(keywords)) {
    if (text::contains_run(transcript, text::split_keyword(k))) r.kept.push_back(std::move(k));
  }
  return r;
}

double string_similarity(std::string_view a, std::string_view b) {
  const std::u32string ca = text::to_code_points(a);
  const std::u32string cb = text::to_code_points(b);
  const std::size_t longest = std::max(ca.size(), cb.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(levenshtein(ca, cb)) / static_cast<double>(longest);
}

PruneResult similarity_prune(const std::vector<std::string>& keywords, const text::Tokens& reference,
                             std::optional<std::size_t> top_k, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw ArgumentError("similarity_prune: threshold must lie in [0, 1]");
  const std::vector<std::string> candidates = text::normalize_keyword_list(keywords);
  std::vector<double> best(candidates.size(), 0.0);
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const std::size_t width = text::split_keyword(candidates[c]).size();
    for (std::size_t p = 0; p + width <= reference.size(); ++p) {
      std::vector<std::string> gram(reference.begin() + static_cast<std::ptrdiff_t>(p),
                                    reference.begin() + static_cast<std::ptrdiff_t>(p + width));
      best[c] = std::max(best[c], string_similarity(candidates[c], text::join(gram, " ")));
    }
  }

  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (best[c] >= threshold) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return best[x] > best[y]; });
  if (top_k && order.size() > *top_k) order.resize(*top_k);
  std::sort(order.begin(), order.end());

  PruneResult r;
  r.source = PruneSource::kSimilarity;
  r.scores.emplace();
  for (std::size_t c : order) {
    r.kept.push_back(candidates[c]);
    r.scores->push_back(best[c]);
  }
  return r;
}

double prune_f1(const std::vector<std::string>& predicted, const std::vector<std::string>& gold) {
  const auto p = text::normalize_keyword_list(predicted);
  const auto g = text::normalize_keyword_list(gold);
  if (p.empty() && g.empty()) return 1.0;
  if (p.empty() || g.empty()) return 0.0;
  const std::unordered_set<std::string> gs(g.begin(), g.end());
  std::size_t tp = 0;
  for (const auto& k : p) tp += gs.contains(k) ? 1 : 0;
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(p.size());
  const double recall = static_cast<double>(tp) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

std::string_view mode_name(PromptMode m) {
  switch (m) {
    case PromptMode::kPcWithKeywords:
      return "pc";
    case PromptMode::kPcNoKeywords:
      return "pc-none";
    case PromptMode::kTpiPrune:
      return "tpi-prune";
    case PromptMode::kTpiRecognize:
      return "tpi-recognize";
    case PromptMode::kJpi:
      return "jpi";
  }
  return "unknown";
}

PromptMode parse_mode(std::string_view name) {
  for (auto m : {PromptMode::kPcWithKeywords, PromptMode::kPcNoKeywords, PromptMode::kTpiPrune,
                 PromptMode::kTpiRecognize, PromptMode::kJpi}) {
    if (mode_name(m) == name) return m;
  }
  throw ArgumentError("unknown prompt mode '" + std::string(name) + "'");
}

RenderedPrompt render_prompt(PromptMode mode, const std::vector<std::string>& keywords, bool with_markers) {
  RenderedPrompt p;
  p.mode = mode;
  if (mode == PromptMode::kPcNoKeywords) {
    p.text = kPcNoKeywords;
    return p;
  }
  if (keywords.empty()) throw ArgumentError("prompt mode '" + std::string(mode_name(mode)) + "' needs keywords");

  std::string_view head;
  switch (mode) {
    case PromptMode::kPcWithKeywords:
    case PromptMode::kTpiRecognize:
      head = kPcWithKeywords;
      break;
    case PromptMode::kTpiPrune:
      head = kTpiPrune;
      break;
    default:
      head = kJpi;
      break;
  }
  p.text = head;
  if (with_markers) p.text += kStartOfContext;
  p.context_begin = p.text.size();
  p.text += text::join(keywords, ", ");
  p.context_end = p.text.size();
  if (with_markers) p.text += kEndOfContext;
  return p;
}

std::string render_jpi_response(const JpiResponse& r) {
  return std::string(kJpiSelected) + " " + text::join(r.selected_keywords, ", ") + ". " +
         std::string(kJpiTranscription) + " " + r.transcription;
}

JpiResponse parse_jpi(std::string_view response) {
  const auto sel = response.find(kJpiSelected);
  if (sel == std::string_view::npos) {
    throw ParseError("joint response lacks '" + std::string(kJpiSelected) + "': " + std::string(response));
  }
  const std::size_t list_begin = sel + kJpiSelected.size();
  const auto tr = response.find(kJpiTranscription, list_begin);
  if (tr == std::string_view::npos) {
    throw ParseError("joint response lacks '" + std::string(kJpiTranscription) + "': " + std::string(response));
  }

  std::string_view list = trim(response.substr(list_begin, tr - list_begin));
  if (!list.empty() && list.back() == '.') list.remove_suffix(1);

  JpiResponse out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = std::min(list.find(',', start), list.size());
    const std::string_view item = trim(list.substr(start, comma - start));
    if (!item.empty()) out.selected_keywords.emplace_back(item);
    start = comma + 1;
  }
  out.transcription = std::string(trim(response.substr(tr + kJpiTranscription.size())));
  if (out.transcription.empty()) throw ParseError("joint response has an empty transcription: " + std::string(response));
  return out;
}

}  // namespace ctxbias::pruning
