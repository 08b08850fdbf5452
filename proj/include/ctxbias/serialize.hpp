// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// JSON / JSONL encodings of the corpus, pruning and scoring records.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ctxbias/corpus.hpp"
#include "ctxbias/pooling.hpp"
#include "ctxbias/pruning.hpp"
#include "ctxbias/scoring.hpp"

namespace ctxbias {

using Json = nlohmann::ordered_json;

/// One utterance per line. Errors carry "<source>:<line>:".
std::vector<corpus::Utterance> parse_manifest(std::string_view jsonl, std::string_view source = "<manifest>");
std::vector<corpus::Utterance> load_manifest(const std::filesystem::path& path);
std::string dump_manifest(const std::vector<corpus::Utterance>& utterances);

Json to_json(const corpus::Utterance& u);
corpus::Utterance utterance_from_json(const nlohmann::json& j);

/// {"id": ..., "entries": [{"keyword": ..., "provenance": "core"|"distractor"}]}
Json to_json(const std::string& id, const corpus::BiasingList& list);
corpus::BiasingList bias_list_from_json(const nlohmann::json& j);

Json to_json(const corpus::ContextStats& s);

/// {"id": ..., "kept": [...], "source": ..., "scores"?: [...], "dropped"?: [...]}
Json to_json(const std::string& id, const pruning::PruneResult& r);
pruning::PruneResult prune_result_from_json(const nlohmann::json& j);

/// Rates are null when undefined.
Json to_json(const scoring::ScoreReport& r);

Json to_json(const pooling::PooledContext& p);

/// Pretty JSON with a trailing newline.
std::string dump(const Json& j);

/// Reads and parses a JSON file; ParseError naming the path on failure.
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace ctxbias
