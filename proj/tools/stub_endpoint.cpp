// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// Scripted stand-in for an inference server. Answers POST <path> with
// {"text": script[payload_ref]} where the script is a JSON object mapping
// payload references to response text. Unknown references get "".

#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ctxbias/error.hpp"
#include "ctxbias/fileutil.hpp"
#include "ctxbias/stub_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ctxbias-stub: scripted inference endpoint for tests and demos"};
  std::string script_path;
  std::string host = "127.0.0.1";
  int port = 8089;
  std::string path = "/generate";
  app.add_option("--script", script_path, "JSON object {payload_ref: response text}")->required();
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port)->capture_default_str();
  app.add_option("--path", path)->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    ctxbias::StubServer server(nlohmann::json::parse(ctxbias::read_file(script_path)), path);
    std::cerr << "ctxbias-stub listening on http://" << host << ":" << port << path << "\n";
    if (!server.listen(host, port)) {
      std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
      return 2;
    }
  } catch (const ctxbias::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
