// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/commands.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_set>

#include "ctxbias/error.hpp"
#include "ctxbias/fileutil.hpp"
#include "ctxbias/matrix_io.hpp"
#include "ctxbias/serialize.hpp"

namespace ctxbias::cli {
namespace {

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void check_unique_stems(const std::vector<corpus::Utterance>& utts) {
  std::unordered_set<std::string> stems;
  for (const auto& u : utts) {
    if (!stems.insert(file_stem_for(u.id)).second) {
      throw ArgumentError("utterance id '" + u.id + "' collides with another id after file-name sanitizing");
    }
  }
}

fs::path per_utterance_file(const fs::path& dir, const std::string& id) { return dir / (file_stem_for(id) + ".json"); }

/// Keywords an utterance is biased with before pruning.
std::vector<std::string> full_keywords(const corpus::Utterance& u, const std::optional<fs::path>& bias_dir) {
  if (bias_dir) return bias_list_from_json(load_json(per_utterance_file(*bias_dir, u.id))).keywords();
  if (u.bias) return *u.bias;
  return corpus::resolve_context(u);
}

std::vector<std::string> pruned_keywords(const corpus::Utterance& u, const fs::path& pruned_dir) {
  return prune_result_from_json(load_json(per_utterance_file(pruned_dir, u.id))).kept;
}

void emit(const std::optional<fs::path>& path, const std::string& body, std::ostream& out) {
  if (path) {
    write_file_atomic(*path, body);
  } else {
    out << body;
  }
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path r = p;
  r += suffix;
  return r;
}

/// "dir/pooled.sapm" + 4 -> "dir/pooled.n4.sapm"
fs::path sweep_path(const fs::path& out, std::size_t n) {
  return out.parent_path() / (out.stem().string() + ".n" + std::to_string(n) + out.extension().string());
}

}  // namespace

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= count) return;
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
            next.store(count);
            return;
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::string file_stem_for(const std::string& id) {
  std::string out = id;
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) c = '_';
  }
  if (out == "." || out == "..") out = "_" + out;
  return out;
}

// ---------------------------------------------------------------------------

std::size_t run_bias_list(const BiasListOptions& opt, std::ostream& log) {
  const auto utts = load_manifest(opt.manifest);
  check_unique_stems(utts);
  const auto vocab = corpus::VocabResources::load(opt.common_vocab, opt.rare_pool);

  // One generator, consumed in manifest order, so worker count never matters.
  Rng rng(opt.seed);
  std::vector<std::uint64_t> seeds(utts.size());
  std::vector<std::size_t> sizes(utts.size());
  for (std::size_t i = 0; i < utts.size(); ++i) {
    sizes[i] = opt.train_range ? corpus::sample_train_n(rng) : opt.distractors;
    seeds[i] = rng.next();
  }

  parallel_for(utts.size(), opt.workers, [&](std::size_t i) {
    const auto list = corpus::build_bias_list(utts[i].transcript_tokens(), vocab, sizes[i], seeds[i]);
    write_file_atomic(per_utterance_file(opt.out_dir, utts[i].id), dump(to_json(utts[i].id, list)));
  });
  log << "bias-list: wrote " << utts.size() << " lists to " << opt.out_dir.string() << "\n";
  return utts.size();
}

std::vector<corpus::Utterance> cluster_manifest(std::vector<corpus::Utterance> utterances,
                                                const corpus::ClusterMode& mode) {
  mode.validate();
  for (auto& u : utterances) {
    if (u.slides.empty()) {
      u.context = std::vector<std::string>{};
      continue;
    }
    const auto merged = corpus::cluster_slides(u.slides, mode);
    std::size_t pos = 0;
    if (u.current_slide) {
      pos = u.slides.size();
      for (std::size_t s = 0; s < u.slides.size(); ++s) {
        if (u.slides[s].index == *u.current_slide) pos = s;
      }
      if (pos == u.slides.size()) {
        throw ArgumentError("utterance '" + u.id + "': current_slide " + std::to_string(*u.current_slide) +
                            " not among its slides");
      }
    }
    u.context = merged[pos];
  }
  return utterances;
}

corpus::ContextStats manifest_stats(const std::vector<corpus::Utterance>& utterances) {
  std::vector<corpus::ContextSample> samples;
  samples.reserve(utterances.size());
  for (const auto& u : utterances) samples.push_back({u.transcript_tokens(), corpus::resolve_context(u)});
  return corpus::context_stats(samples);
}

void run_cluster(const ClusterOptions& opt, std::ostream& log) {
  const auto utts = load_manifest(opt.manifest);
  if (opt.sweep.empty()) {
    const auto merged = cluster_manifest(utts, opt.mode);
    const auto stats = manifest_stats(merged);
    write_file_atomic(opt.out, dump_manifest(merged));
    write_file_atomic(with_suffix(opt.out, ".stats.json"), dump(to_json(stats)));
    log << "cluster: " << merged.size() << " utterances, mean/median context tokens "
        << fixed2(stats.token_length_mean) << "/" << fixed2(stats.token_length_median) << ", coverage "
        << fixed2(stats.keyword_coverage_rate) << "%, information " << fixed2(stats.information_rate) << "%\n";
    return;
  }

  Json table = Json::array();
  for (std::size_t k : opt.sweep) {
    const auto merged = cluster_manifest(utts, corpus::ClusterMode::window(k));
    const auto stats = manifest_stats(merged);
    const std::string stem = "window_k" + std::to_string(k);
    write_file_atomic(opt.out / (stem + ".jsonl"), dump_manifest(merged));
    write_file_atomic(opt.out / (stem + ".stats.json"), dump(to_json(stats)));
    Json row;
    row["k"] = k;
    row["stats"] = to_json(stats);
    table.push_back(std::move(row));
    log << "cluster: k=" << k << " mean/median " << fixed2(stats.token_length_mean) << "/"
        << fixed2(stats.token_length_median) << " coverage " << fixed2(stats.keyword_coverage_rate)
        << "% information " << fixed2(stats.information_rate) << "%\n";
  }
  write_file_atomic(opt.out / "sweep.json", dump(table));
}

void run_stats(const StatsOptions& opt, std::ostream& out, std::ostream& log) {
  const auto stats = manifest_stats(load_manifest(opt.manifest));
  emit(opt.out, dump(to_json(stats)), out);
  log << "stats: coverage " << fixed2(stats.keyword_coverage_rate) << "%, information "
      << fixed2(stats.information_rate) << "%\n";
}

PruneSummary run_prune(const PruneOptions& opt, std::ostream& log) {
  const auto utts = load_manifest(opt.manifest);
  check_unique_stems(utts);
  std::unique_ptr<pruning::ModelPruner> model;
  if (opt.pruner == PrunerKind::kModel) model = std::make_unique<pruning::ModelPruner>(opt.endpoint);

  struct Row {
    pruning::PruneResult result;
    std::optional<std::vector<std::string>> gold;
  };
  std::vector<Row> rows(utts.size());

  parallel_for(utts.size(), opt.workers, [&](std::size_t i) {
    const auto& u = utts[i];
    const auto keywords = full_keywords(u, opt.bias_dir);
    const auto transcript = u.transcript_tokens();
    Row row;
    switch (opt.pruner) {
      case PrunerKind::kOracle:
        if (transcript.empty()) throw ArgumentError("oracle pruner: utterance '" + u.id + "' has no transcript");
        row.result = pruning::oracle_prune(keywords, transcript);
        break;
      case PrunerKind::kSimilarity: {
        const auto reference = (opt.use_hypothesis && u.hypothesis) ? text::normalize(*u.hypothesis) : transcript;
        row.result = pruning::similarity_prune(keywords, reference, opt.top_k, opt.threshold);
        break;
      }
      case PrunerKind::kModel:
        if (text::normalize_keyword_list(keywords).empty()) {
          row.result.source = pruning::PruneSource::kModel;
        } else {
          row.result = model->prune({u.embedding_path.value_or(u.id), keywords, pruning::PromptMode::kTpiPrune, opt.markers});
        }
        break;
    }
    if (!transcript.empty()) row.gold = pruning::oracle_prune(keywords, transcript).kept;
    rows[i] = std::move(row);
  });

  PruneSummary summary;
  summary.utterances = utts.size();
  std::size_t tp = 0, predicted = 0, gold = 0, graded = 0;
  for (std::size_t i = 0; i < utts.size(); ++i) {
    const auto& r = rows[i];
    for (const auto& d : r.result.dropped) {
      log << "warning: " << utts[i].id << ": model returned '" << d << "', not in the keyword list; dropped\n";
    }
    summary.dropped += r.result.dropped.size();
    write_file_atomic(per_utterance_file(opt.out_dir, utts[i].id), dump(to_json(utts[i].id, r.result)));
    if (!r.gold) continue;
    ++graded;
    const std::unordered_set<std::string> g(r.gold->begin(), r.gold->end());
    for (const auto& k : r.result.kept) tp += g.contains(k) ? 1 : 0;
    predicted += r.result.kept.size();
    gold += r.gold->size();
  }
  if (graded > 0) {
    if (predicted == 0 && gold == 0) {
      summary.f1 = 100.0;
    } else {
      summary.f1 = 100.0 * 2.0 * static_cast<double>(tp) / static_cast<double>(predicted + gold);
    }
    log << "prune F1 " << fixed2(*summary.f1) << " over " << graded << " utterances\n";
  }
  log << "prune: wrote " << utts.size() << " results to " << opt.out_dir.string() << "\n";
  return summary;
}

std::vector<fs::path> run_pool(const PoolOptions& opt, std::ostream& log) {
  const Matrix h_x = load_matrix(opt.h_x);
  const Matrix h_z = load_matrix(opt.h_z);
  if (h_x.cols() != h_z.cols()) {
    throw ShapeError("h_x '" + opt.h_x.string() + "' is " + h_x.shape() + " but h_z '" + opt.h_z.string() + "' is " +
                     h_z.shape() + "; hidden sizes differ");
  }
  const std::size_t d = h_x.cols();
  Rng rng(opt.seed);
  const double amp = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(d, 1)));
  const std::uint64_t seed_q = rng.next();
  const std::uint64_t seed_k = rng.next();
  pooling::ProjectionParams params{opt.w_q ? load_matrix(*opt.w_q) : random_init(d, d, seed_q, amp),
                                   opt.w_k ? load_matrix(*opt.w_k) : random_init(d, d, seed_k, amp)};
  auto check_square = [&](const Matrix& m, const std::optional<fs::path>& p, const char* name) {
    if (m.rows() != d || m.cols() != d) {
      throw ShapeError(std::string(name) + " '" + (p ? p->string() : "<random>") + "' is " + m.shape() +
                       ", expected " + std::to_string(d) + "x" + std::to_string(d) + " to match h_x '" +
                       opt.h_x.string() + "'");
    }
  };
  check_square(params.w_q, opt.w_q, "W_Q");
  check_square(params.w_k, opt.w_k, "W_K");

  const std::vector<std::size_t> windows = opt.sweep.empty() ? std::vector<std::size_t>{opt.window} : opt.sweep;
  std::vector<fs::path> written;
  for (std::size_t n : windows) {
    pooling::PoolingConfig config{d, opt.heads, n, opt.head_mode};
    const auto pooled = pooling::pool_forward(h_x, h_z, params, config);
    const fs::path path = opt.sweep.empty() ? opt.out : sweep_path(opt.out, n);
    save_matrix(path, pooled.pooled);
    write_file_atomic(with_suffix(path, ".weights.json"), dump(to_json(pooled)));
    log << "pool: n=" << n << " " << h_z.rows() << " context tokens -> " << pooled.pooled.rows() << " rows, wrote "
        << path.string() << "\n";
    written.push_back(path);
  }
  return written;
}

void run_prompt(const PromptOptions& opt, std::ostream& out, std::ostream& log) {
  auto encode = [&](const std::optional<std::string>& id, const pruning::RenderedPrompt& p) {
    Json j;
    if (id) j["id"] = *id;
    j["mode"] = std::string(pruning::mode_name(p.mode));
    j["text"] = p.text;
    j["context_span"] = {p.context_begin, p.context_end};
    return j;
  };
  if (!opt.manifest) {
    emit(opt.out, dump(encode(std::nullopt, pruning::render_prompt(opt.mode, opt.keywords, opt.markers))), out);
    return;
  }
  const auto utts = load_manifest(*opt.manifest);
  std::string body;
  for (const auto& u : utts) {
    const auto keywords = opt.pruned_dir ? pruned_keywords(u, *opt.pruned_dir) : full_keywords(u, std::nullopt);
    // Keyworded modes fall back to the bare instruction when pruning left nothing.
    const auto mode = keywords.empty() ? pruning::PromptMode::kPcNoKeywords : opt.mode;
    body += encode(u.id, pruning::render_prompt(mode, keywords, opt.markers)).dump() + "\n";
  }
  emit(opt.out, body, out);
  log << "prompt: rendered " << utts.size() << " prompts\n";
}

ScoreSummary run_score(const ScoreOptions& opt, std::ostream& out, std::ostream& log) {
  const auto utts = load_manifest(opt.manifest);
  if (opt.bias == BiasSource::kPruned && !opt.pruned_dir) throw ArgumentError("score: pruned bias needs --pruned-dir");

  std::vector<std::optional<scoring::ScoreReport>> reports(utts.size());
  parallel_for(utts.size(), opt.workers, [&](std::size_t i) {
    const auto& u = utts[i];
    if (!u.hypothesis) return;
    const auto keywords = opt.bias == BiasSource::kPruned ? pruned_keywords(u, *opt.pruned_dir)
                                                           : full_keywords(u, opt.bias_dir);
    const auto ref = u.transcript_tokens();
    const auto hyp = text::normalize(*u.hypothesis);
    reports[i] = scoring::score(scoring::align(ref, hyp), ref, hyp, scoring::make_bias_set(keywords), opt.insertions);
  });

  ScoreSummary summary;
  std::vector<scoring::ScoreReport> scored;
  std::string tsv = "id\twer\tuwer\tbwer\trecall\n";
  for (std::size_t i = 0; i < utts.size(); ++i) {
    if (!reports[i]) {
      log << "warning: " << utts[i].id << ": no hypothesis; skipped\n";
      ++summary.skipped;
      continue;
    }
    const auto& r = *reports[i];
    scored.push_back(r);
    tsv += utts[i].id + "\t" + scoring::format_rate(r.wer) + "\t" + scoring::format_rate(r.uwer) + "\t" +
           scoring::format_rate(r.bwer) + "\t" + scoring::format_rate(r.recall) + "\n";
  }
  if (scored.empty()) throw ArgumentError("score: no utterance has a hypothesis");
  summary.report = scoring::aggregate(scored);
  summary.scored = scored.size();

  Json j = to_json(summary.report);
  j["utterances"] = summary.scored;
  j["skipped"] = summary.skipped;
  emit(opt.out, dump(j), out);
  if (opt.tsv) write_file_atomic(*opt.tsv, tsv);
  log << scoring::summary_line(summary.report) << "\n";
  if (summary.skipped > 0) log << "score: skipped " << summary.skipped << " utterances without hypotheses\n";
  return summary;
}

}  // namespace ctxbias::cli
