// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/model_client.hpp"

#include <cstdlib>
#include <semaphore>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "ctxbias/error.hpp"

namespace ctxbias::pruning {
namespace {

constexpr std::ptrdiff_t kMaxGate = 1024;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

struct ModelPruner::Gate {
  explicit Gate(std::ptrdiff_t n) : slots(n) {}
  std::counting_semaphore<kMaxGate> slots;
};

EndpointConfig EndpointConfig::from_env() {
  EndpointConfig c;
  if (const char* url = std::getenv("CTXBIAS_ENDPOINT")) c.base_url = url;
  return c;
}

std::vector<std::string> parse_keyword_response(std::string_view body) {
  std::vector<std::string> raw;
  std::size_t start = 0;
  while (start <= body.size()) {
    std::size_t end = body.find_first_of(",\n", start);
    if (end == std::string_view::npos) end = body.size();
    std::string_view item = trim(body.substr(start, end - start));
    if (!item.empty() && item.back() == '.') item.remove_suffix(1);
    if (!item.empty()) raw.emplace_back(item);
    start = end + 1;
  }
  return text::normalize_keyword_list(raw);
}

ModelPruner::ModelPruner(EndpointConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw ArgumentError("model pruner: no endpoint URL (set CTXBIAS_ENDPOINT or --endpoint)");
  if (config_.max_in_flight == 0 || config_.max_in_flight > static_cast<std::size_t>(kMaxGate)) {
    throw ArgumentError("model pruner: concurrency cap must lie in [1, " + std::to_string(kMaxGate) + "]");
  }
  if (config_.max_retries < 0) throw ArgumentError("model pruner: max retries must be >= 0");
  gate_ = std::make_unique<Gate>(static_cast<std::ptrdiff_t>(config_.max_in_flight));
}

ModelPruner::~ModelPruner() = default;

std::string ModelPruner::post_with_retry(const std::string& body) const {
  std::string last_failure;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.initial_backoff * (1 << (attempt - 1)));

    httplib::Client client(config_.base_url);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(config_.path, body, "application/json");
    if (!res) {
      last_failure = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ProtocolError("endpoint answered HTTP " + std::to_string(res->status), res->body);
    }
    return res->body;
  }
  throw TransportError("endpoint " + config_.base_url + config_.path + " failed after " +
                       std::to_string(config_.max_retries + 1) + " attempts: " + last_failure);
}

PruneResult ModelPruner::prune(const ModelRequest& request) const {
  const std::vector<std::string> input = text::normalize_keyword_list(request.keywords);
  if (input.empty()) throw ArgumentError("model pruner: request '" + request.payload_ref + "' has no keywords");

  nlohmann::ordered_json req;
  req["prompt"] = render_prompt(request.mode, request.keywords, request.with_markers).text;
  req["payload_ref"] = request.payload_ref;

  std::string raw;
  gate_->slots.acquire();
  try {
    raw = post_with_retry(req.dump());
  } catch (...) {
    gate_->slots.release();
    throw;
  }
  gate_->slots.release();

  std::string answer;
  try {
    const auto j = nlohmann::json::parse(raw);
    answer = j.at("text").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("endpoint body is not {\"text\": string}: ") + e.what(), raw);
  }

  const std::unordered_set<std::string> allowed(input.begin(), input.end());
  PruneResult r;
  r.source = PruneSource::kModel;
  for (auto& k : parse_keyword_response(answer)) {
    if (allowed.contains(k)) {
      r.kept.push_back(std::move(k));
    } else {
      r.dropped.push_back(std::move(k));
    }
  }
  return r;
}

}  // namespace ctxbias::pruning
