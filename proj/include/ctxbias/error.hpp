// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace ctxbias {

/// Process exit codes shared by every CLI subcommand.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,      // bad arguments, shape errors, resource shortfalls
  kIo = 2,         // missing files, malformed manifests or matrices
  kTransport = 3,  // inference endpoint unreachable or speaking nonsense
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

/// Not enough material to satisfy a request (e.g. distractor pool too small).
class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& what) : Error(ExitCode::kUsage, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::kIo, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ExitCode::kIo, what) {}
};

class TransportError : public Error {
 public:
  explicit TransportError(const std::string& what) : Error(ExitCode::kTransport, what) {}
};

/// The endpoint answered, but the body could not be understood.
class ProtocolError : public Error {
 public:
  ProtocolError(const std::string& what, std::string raw_body)
      : Error(ExitCode::kTransport, what), raw_body_(std::move(raw_body)) {}
  const std::string& raw_body() const noexcept { return raw_body_; }

 private:
  std::string raw_body_;
};

}  // namespace ctxbias
