// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// Scripted stand-in for an inference server speaking the model-pruner
// protocol. POST <path> with {"payload_ref": ref} answers {"text": script[ref]},
// or {"text": ""} for unknown references. Malformed request bodies get 400.

#pragma once

#include <memory>
#include <string>

#include <json.hpp>

namespace ctxbias {

class StubServer {
 public:
  StubServer(nlohmann::json script, std::string path = "/generate");
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  /// Binds host on an ephemeral port and serves on a background thread.
  /// Returns the port. Throws IoError when binding fails.
  int start(const std::string& host = "127.0.0.1");
  /// Serves on host:port in the calling thread until stop(). False if binding fails.
  bool listen(const std::string& host, int port);
  void stop();
  /// "http://host:port" after start().
  std::string base_url() const;
  /// Requests answered so far.
  std::size_t requests() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ctxbias
