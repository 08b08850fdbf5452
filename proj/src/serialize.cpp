// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/serialize.hpp"

#include <unordered_set>

#include "ctxbias/error.hpp"
#include "ctxbias/fileutil.hpp"

namespace ctxbias {
namespace {

Json rate_json(const std::optional<double>& r) { return r ? Json(*r) : Json(nullptr); }

std::vector<std::string> string_list(const nlohmann::json& j, const char* field) {
  if (!j.is_array()) throw ParseError(std::string("'") + field + "' must be an array of strings");
  std::vector<std::string> out;
  for (const auto& v : j) {
    if (!v.is_string()) throw ParseError(std::string("'") + field + "' must be an array of strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

}  // namespace

corpus::Utterance utterance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("utterance must be a JSON object");
  corpus::Utterance u;
  try {
    u.id = j.at("id").get<std::string>();
    u.transcript = j.value("transcript", std::string());
    if (j.contains("slides")) {
      for (const auto& s : j.at("slides")) {
        corpus::Slide slide;
        slide.index = s.at("index").get<std::int64_t>();
        slide.keywords = text::normalize_keyword_list(string_list(s.at("keywords"), "keywords"));
        u.slides.push_back(std::move(slide));
      }
    }
    if (j.contains("current_slide") && !j["current_slide"].is_null()) u.current_slide = j["current_slide"].get<std::int64_t>();
    if (j.contains("hypothesis") && !j["hypothesis"].is_null()) u.hypothesis = j["hypothesis"].get<std::string>();
    if (j.contains("embedding_path") && !j["embedding_path"].is_null()) {
      u.embedding_path = j["embedding_path"].get<std::string>();
    }
    if (j.contains("context") && !j["context"].is_null()) {
      u.context = text::normalize_keyword_list(string_list(j["context"], "context"));
    }
    if (j.contains("bias") && !j["bias"].is_null()) u.bias = string_list(j["bias"], "bias");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(e.what());
  }
  if (u.id.empty()) throw ParseError("utterance id must be non-empty");
  return u;
}

std::vector<corpus::Utterance> parse_manifest(std::string_view jsonl, std::string_view source) {
  std::vector<corpus::Utterance> out;
  std::unordered_set<std::string> ids;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < jsonl.size()) {
    std::size_t end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = std::string(source) + ":" + std::to_string(line_no) + ": ";
    try {
      corpus::Utterance u = utterance_from_json(nlohmann::json::parse(line));
      if (!ids.insert(u.id).second) throw ParseError("duplicate utterance id '" + u.id + "'");
      out.push_back(std::move(u));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + e.what());
    } catch (const Error& e) {
      throw ParseError(where + e.what());
    }
  }
  return out;
}

std::vector<corpus::Utterance> load_manifest(const std::filesystem::path& path) {
  return parse_manifest(read_file(path), path.string());
}

Json to_json(const corpus::Utterance& u) {
  Json j;
  j["id"] = u.id;
  j["transcript"] = u.transcript;
  if (u.hypothesis) j["hypothesis"] = *u.hypothesis;
  if (u.embedding_path) j["embedding_path"] = *u.embedding_path;
  if (u.current_slide) j["current_slide"] = *u.current_slide;
  Json slides = Json::array();
  for (const auto& s : u.slides) {
    Json js;
    js["index"] = s.index;
    js["keywords"] = s.keywords;
    slides.push_back(std::move(js));
  }
  j["slides"] = std::move(slides);
  if (u.context) j["context"] = *u.context;
  if (u.bias) j["bias"] = *u.bias;
  return j;
}

std::string dump_manifest(const std::vector<corpus::Utterance>& utterances) {
  std::string out;
  for (const auto& u : utterances) {
    out += to_json(u).dump();
    out += '\n';
  }
  return out;
}

Json to_json(const std::string& id, const corpus::BiasingList& list) {
  Json j;
  j["id"] = id;
  Json entries = Json::array();
  for (const auto& e : list.entries) {
    Json je;
    je["keyword"] = e.keyword;
    je["provenance"] = e.provenance == corpus::Provenance::kCore ? "core" : "distractor";
    entries.push_back(std::move(je));
  }
  j["entries"] = std::move(entries);
  return j;
}

corpus::BiasingList bias_list_from_json(const nlohmann::json& j) {
  corpus::BiasingList list;
  try {
    for (const auto& e : j.at("entries")) {
      const std::string prov = e.at("provenance").get<std::string>();
      if (prov != "core" && prov != "distractor") throw ParseError("unknown provenance '" + prov + "'");
      list.entries.push_back(
          {e.at("keyword").get<std::string>(), prov == "core" ? corpus::Provenance::kCore : corpus::Provenance::kDistractor});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("biasing list: ") + e.what());
  }
  return list;
}

Json to_json(const corpus::ContextStats& s) {
  Json j;
  j["keyword_coverage_rate"] = s.keyword_coverage_rate;
  j["information_rate"] = s.information_rate;
  j["token_length_mean"] = s.token_length_mean;
  j["token_length_median"] = s.token_length_median;
  j["utterances"] = s.utterances;
  j["covered_tokens"] = s.covered_tokens;
  j["transcript_tokens"] = s.transcript_tokens;
  j["core_keywords"] = s.core_keywords;
  j["context_keywords"] = s.context_keywords;
  return j;
}

Json to_json(const std::string& id, const pruning::PruneResult& r) {
  Json j;
  j["id"] = id;
  j["kept"] = r.kept;
  j["source"] = std::string(pruning::source_name(r.source));
  if (r.scores) j["scores"] = *r.scores;
  if (!r.dropped.empty()) j["dropped"] = r.dropped;
  return j;
}

pruning::PruneResult prune_result_from_json(const nlohmann::json& j) {
  pruning::PruneResult r;
  try {
    r.kept = text::normalize_keyword_list(string_list(j.at("kept"), "kept"));
    const std::string src = j.value("source", std::string("oracle"));
    if (src == "oracle") {
      r.source = pruning::PruneSource::kOracle;
    } else if (src == "similarity") {
      r.source = pruning::PruneSource::kSimilarity;
    } else if (src == "model") {
      r.source = pruning::PruneSource::kModel;
    } else {
      throw ParseError("unknown prune source '" + src + "'");
    }
    if (j.contains("scores")) r.scores = j["scores"].get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("prune result: ") + e.what());
  }
  return r;
}

Json to_json(const scoring::ScoreReport& r) {
  Json j;
  j["wer"] = rate_json(r.wer);
  j["uwer"] = rate_json(r.uwer);
  j["bwer"] = rate_json(r.bwer);
  j["recall"] = rate_json(r.recall);
  const auto& c = r.counts;
  Json counts;
  counts["sub"] = c.sub;
  counts["del"] = c.del;
  counts["ins"] = c.ins;
  counts["hits"] = c.hits;
  counts["b_sub"] = c.b_sub;
  counts["b_del"] = c.b_del;
  counts["b_ins"] = c.b_ins;
  counts["b_hits"] = c.b_hits;
  counts["ref_len"] = c.ref_len;
  counts["b_ref_len"] = c.b_ref_len;
  j["counts"] = std::move(counts);
  return j;
}

Json to_json(const pooling::PooledContext& p) {
  Json j;
  j["rows"] = p.pooled.rows();
  j["cols"] = p.pooled.cols();
  Json windows = Json::array();
  for (std::size_t w = 0; w < p.windows.size(); ++w) {
    const auto& win = p.windows[w];
    Json jw;
    jw["begin"] = win.begin;
    jw["end"] = win.end;
    Json per_head = Json::array();
    for (std::size_t h = 0; h < p.window_weights.rows(); ++h) {
      Json weights = Json::array();
      for (std::size_t i = win.begin; i < win.end; ++i) weights.push_back(p.window_weights(h, i));
      per_head.push_back(std::move(weights));
    }
    jw["weights"] = std::move(per_head);
    windows.push_back(std::move(jw));
  }
  j["windows"] = std::move(windows);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

nlohmann::json load_json(const std::filesystem::path& path) {
  const std::string body = read_file(path);
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

}  // namespace ctxbias
