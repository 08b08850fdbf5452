// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/stub_server.hpp"

#include <atomic>
#include <thread>

#include <httplib.h>

#include "ctxbias/error.hpp"

namespace ctxbias {

struct StubServer::Impl {
  nlohmann::json script;
  std::string path;
  std::string host;
  int port = 0;
  httplib::Server server;
  std::thread thread;
  std::atomic<std::size_t> requests{0};
};

StubServer::StubServer(nlohmann::json script, std::string path) : impl_(std::make_unique<Impl>()) {
  if (!script.is_object()) throw ArgumentError("stub script must be a JSON object {payload_ref: text}");
  impl_->script = std::move(script);
  impl_->path = std::move(path);
  impl_->server.Post(impl_->path, [impl = impl_.get()](const httplib::Request& req, httplib::Response& res) {
    ++impl->requests;
    nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object()) {
      res.status = 400;
      return;
    }
    const std::string ref = body.value("payload_ref", std::string());
    const auto it = impl->script.find(ref);
    nlohmann::json out;
    out["text"] = it != impl->script.end() && it->is_string() ? it->get<std::string>() : std::string();
    res.set_content(out.dump(), "application/json");
  });
}

StubServer::~StubServer() { stop(); }

int StubServer::start(const std::string& host) {
  impl_->host = host;
  impl_->port = impl_->server.bind_to_any_port(host);
  if (impl_->port < 0) throw IoError("stub: cannot bind " + host);
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

bool StubServer::listen(const std::string& host, int port) {
  impl_->host = host;
  impl_->port = port;
  return impl_->server.listen(host, port);
}

void StubServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string StubServer::base_url() const { return "http://" + impl_->host + ":" + std::to_string(impl_->port); }

std::size_t StubServer::requests() const { return impl_->requests.load(); }

}  // namespace ctxbias
