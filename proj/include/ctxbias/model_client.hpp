// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// Model-backed pruning over a minimal HTTP inference protocol:
//
//   POST <base_url><path>   {"prompt": "...", "payload_ref": "..."}
//   200                     {"text": "kw1, kw2\nkw3"}
//
// Transport failures and 5xx answers are retried with exponential backoff.
// Anything else that is not the expected JSON is a ProtocolError.

#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ctxbias/pruning.hpp"

namespace ctxbias::pruning {

struct EndpointConfig {
  std::string base_url;  // "http://host:port"
  std::string path = "/generate";
  std::chrono::milliseconds timeout{10'000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{100};
  std::size_t max_in_flight = 4;

  /// base_url from CTXBIAS_ENDPOINT; everything else default.
  static EndpointConfig from_env();
};

struct ModelRequest {
  /// Opaque reference to the speech (embedding path or utterance id).
  std::string payload_ref;
  std::vector<std::string> keywords;
  PromptMode mode = PromptMode::kTpiPrune;
  bool with_markers = false;
};

/// Splits on commas and newlines, trims, strips a trailing period, normalizes
/// and deduplicates.
std::vector<std::string> parse_keyword_response(std::string_view text);

class ModelPruner {
 public:
  explicit ModelPruner(EndpointConfig config);
  ~ModelPruner();
  ModelPruner(const ModelPruner&) = delete;
  ModelPruner& operator=(const ModelPruner&) = delete;

  /// Thread-safe; at most `max_in_flight` requests are outstanding at once.
  /// Keywords the model returns that are not in the request are moved to
  /// `dropped`. ArgumentError when keywords are empty.
  PruneResult prune(const ModelRequest& request) const;

  const EndpointConfig& config() const { return config_; }

 private:
  std::string post_with_retry(const std::string& body) const;

  EndpointConfig config_;
  struct Gate;
  std::unique_ptr<Gate> gate_;
};

}  // namespace ctxbias::pruning
