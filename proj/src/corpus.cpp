// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "ctxbias/error.hpp"
#include "ctxbias/fileutil.hpp"

namespace ctxbias::corpus {
namespace {

std::vector<std::string> read_word_list(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) words.push_back(line);
  }
  return words;
}

/// Appends keywords not yet seen.
void merge_into(std::vector<std::string>& out, std::unordered_set<std::string>& seen,
                const std::vector<std::string>& keywords) {
  for (const auto& k : keywords) {
    if (seen.insert(k).second) out.push_back(k);
  }
}

}  // namespace

std::vector<std::string> resolve_context(const Utterance& u) {
  if (u.context) return *u.context;
  if (u.slides.empty()) return {};
  if (u.current_slide) {
    for (const Slide& s : u.slides) {
      if (s.index == *u.current_slide) return s.keywords;
    }
    throw ArgumentError("utterance '" + u.id + "': current_slide " + std::to_string(*u.current_slide) +
                        " not among its slides");
  }
  return u.slides.front().keywords;
}

std::vector<std::string> BiasingList::keywords() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.keyword);
  return out;
}

std::vector<std::string> BiasingList::core() const {
  std::vector<std::string> out;
  for (const auto& e : entries) {
    if (e.provenance == Provenance::kCore) out.push_back(e.keyword);
  }
  return out;
}

VocabResources VocabResources::from_lists(const std::vector<std::string>& common, const std::vector<std::string>& rare) {
  VocabResources v;
  for (const auto& w : text::normalize_keyword_list(common)) v.common_vocab.insert(w);
  v.rare_pool = text::normalize_keyword_list(rare);
  for (const auto& w : v.rare_pool) {
    if (v.common_vocab.contains(w)) throw ArgumentError("vocab: '" + w + "' is in both the common vocabulary and the rare pool");
  }
  return v;
}

VocabResources VocabResources::load(const std::filesystem::path& common_path, const std::filesystem::path& rare_path) {
  return from_lists(read_word_list(common_path), read_word_list(rare_path));
}

BiasingList build_bias_list(const text::Tokens& transcript, const VocabResources& vocab, std::size_t n_distractors,
                            Rng& rng) {
  BiasingList list;
  std::unordered_set<std::string> in_transcript(transcript.begin(), transcript.end());
  std::unordered_set<std::string> seen;
  for (const auto& tok : transcript) {
    if (!vocab.common_vocab.contains(tok) && seen.insert(tok).second) list.entries.push_back({tok, Provenance::kCore});
  }

  std::vector<const std::string*> candidates;
  candidates.reserve(vocab.rare_pool.size());
  for (const auto& w : vocab.rare_pool) {
    if (!in_transcript.contains(w)) candidates.push_back(&w);
  }
  if (candidates.size() < n_distractors) {
    throw ResourceError("rare pool offers " + std::to_string(candidates.size()) + " eligible distractors, " +
                        std::to_string(n_distractors) + " requested (short by " +
                        std::to_string(n_distractors - candidates.size()) + ")");
  }
  // Partial Fisher-Yates: the first n slots become the sample, in draw order.
  for (std::size_t k = 0; k < n_distractors; ++k) {
    const std::size_t j = k + rng.below(candidates.size() - k);
    std::swap(candidates[k], candidates[j]);
    list.entries.push_back({*candidates[k], Provenance::kDistractor});
  }
  return list;
}

BiasingList build_bias_list(const text::Tokens& transcript, const VocabResources& vocab, std::size_t n_distractors,
                            std::uint64_t seed) {
  Rng rng(seed);
  return build_bias_list(transcript, vocab, n_distractors, rng);
}

std::size_t sample_train_n(Rng& rng) { return rng.between(400, 800); }

std::size_t sample_train_n(std::uint64_t seed) {
  Rng rng(seed);
  return sample_train_n(rng);
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const std::unordered_set<std::string> sa(a.begin(), a.end());
  const std::unordered_set<std::string> sb(b.begin(), b.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t both = 0;
  for (const auto& x : sa) both += sb.contains(x) ? 1 : 0;
  return static_cast<double>(both) / static_cast<double>(sa.size() + sb.size() - both);
}

void ClusterMode::validate() const {
  if (kind == Kind::kWindow && k < 1) throw ArgumentError("cluster: window k must be >= 1");
  if (kind == Kind::kJaccard && !(theta >= 0.0 && theta <= 1.0)) {
    throw ArgumentError("cluster: jaccard threshold must lie in [0, 1]");
  }
}

std::vector<std::vector<std::string>> cluster_slides(const std::vector<Slide>& slides, const ClusterMode& mode) {
  mode.validate();
  for (std::size_t i = 1; i < slides.size(); ++i) {
    if (slides[i].index <= slides[i - 1].index) throw ArgumentError("cluster: slides must be ordered by index");
  }
  const std::size_t count = slides.size();
  std::vector<std::vector<std::string>> out(count);

  if (mode.kind == ClusterMode::Kind::kWindow) {
    const std::size_t left = (mode.k - 1) / 2;
    const std::size_t right = mode.k / 2;
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t lo = i >= left ? i - left : 0;
      const std::size_t hi = std::min(count - 1, i + right);
      std::unordered_set<std::string> seen;
      for (std::size_t s = lo; s <= hi; ++s) merge_into(out[i], seen, slides[s].keywords);
    }
    return out;
  }

  std::size_t start = 0;
  while (start < count) {
    std::size_t end = start + 1;
    while (end < count && jaccard(slides[end - 1].keywords, slides[end].keywords) >= mode.theta) ++end;
    std::vector<std::string> merged;
    std::unordered_set<std::string> seen;
    for (std::size_t s = start; s < end; ++s) merge_into(merged, seen, slides[s].keywords);
    for (std::size_t s = start; s < end; ++s) out[s] = merged;
    start = end;
  }
  return out;
}

ContextStats context_stats(const std::vector<ContextSample>& samples) {
  if (samples.empty()) throw ArgumentError("context_stats: empty corpus");
  ContextStats st;
  std::vector<double> lengths;
  lengths.reserve(samples.size());
  for (const auto& s : samples) {
    std::vector<bool> covered(s.transcript.size(), false);
    std::unordered_set<std::string> types;
    std::size_t length = 0;
    for (const auto& kw : s.context) {
      const text::Tokens run = text::split_keyword(kw);
      length += run.size();
      if (run.empty() || !types.insert(kw).second) continue;
      bool core = false;
      for (std::size_t p = 0; p + run.size() <= s.transcript.size(); ++p) {
        if (std::equal(run.begin(), run.end(), s.transcript.begin() + static_cast<std::ptrdiff_t>(p))) {
          core = true;
          std::fill(covered.begin() + static_cast<std::ptrdiff_t>(p),
                    covered.begin() + static_cast<std::ptrdiff_t>(p + run.size()), true);
        }
      }
      st.core_keywords += core ? 1 : 0;
    }
    st.context_keywords += types.size();
    st.covered_tokens += static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
    st.transcript_tokens += s.transcript.size();
    lengths.push_back(static_cast<double>(length));
  }
  st.utterances = samples.size();
  st.keyword_coverage_rate =
      st.transcript_tokens == 0 ? 0.0 : 100.0 * static_cast<double>(st.covered_tokens) / static_cast<double>(st.transcript_tokens);
  st.information_rate =
      st.context_keywords == 0 ? 0.0 : 100.0 * static_cast<double>(st.core_keywords) / static_cast<double>(st.context_keywords);

  double total = 0.0;
  for (double l : lengths) total += l;
  st.token_length_mean = total / static_cast<double>(lengths.size());
  std::sort(lengths.begin(), lengths.end());
  const std::size_t mid = lengths.size() / 2;
  st.token_length_median = lengths.size() % 2 == 1 ? lengths[mid] : 0.5 * (lengths[mid - 1] + lengths[mid]);
  return st;
}

}  // namespace ctxbias::corpus
