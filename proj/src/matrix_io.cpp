// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/matrix_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>

#include <json.hpp>

#include "ctxbias/error.hpp"
#include "ctxbias/fileutil.hpp"

namespace ctxbias {
namespace {

constexpr std::string_view kMagic = "SAPM";
constexpr std::size_t kHeaderBytes = 12;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

}  // namespace

std::string encode_sapm(const Matrix& m) {
  constexpr auto kMax = std::numeric_limits<std::uint32_t>::max();
  if (m.rows() > kMax || m.cols() > kMax) throw ShapeError("matrix " + m.shape() + " too large for SAPM");
  std::string out;
  out.reserve(kHeaderBytes + 4 * m.size());
  out.append(kMagic);
  put_u32(out, static_cast<std::uint32_t>(m.rows()));
  put_u32(out, static_cast<std::uint32_t>(m.cols()));
  for (double v : m.data()) {
    const auto f = static_cast<float>(v);
    if (!std::isfinite(f)) throw ArgumentError("value " + std::to_string(v) + " overflows float32");
    put_u32(out, std::bit_cast<std::uint32_t>(f));
  }
  return out;
}

Matrix decode_sapm(std::string_view bytes) {
  if (bytes.size() < kHeaderBytes || bytes.substr(0, 4) != kMagic) throw ParseError("missing SAPM header");
  const std::uint64_t rows = get_u32(bytes, 4);
  const std::uint64_t cols = get_u32(bytes, 8);
  const std::uint64_t expect = kHeaderBytes + 4 * rows * cols;
  if (bytes.size() != expect) {
    throw ParseError("SAPM " + std::to_string(rows) + "x" + std::to_string(cols) + " expects " +
                     std::to_string(expect) + " bytes, file has " + std::to_string(bytes.size()));
  }
  std::vector<double> data(rows * cols);
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i] = static_cast<double>(std::bit_cast<float>(get_u32(bytes, kHeaderBytes + 4 * i)));
  }
  return Matrix(rows, cols, std::move(data));
}

std::string encode_matrix_json(const Matrix& m) {
  nlohmann::json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data().begin(), m.data().end());
  return j.dump() + "\n";
}

Matrix decode_matrix_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    return Matrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("data").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("matrix JSON: ") + e.what());
  }
}

Matrix load_matrix(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  try {
    if (bytes.size() >= 4 && std::string_view(bytes).substr(0, 4) == kMagic) return decode_sapm(bytes);
    return decode_matrix_json(bytes);
  } catch (const Error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void save_matrix(const std::filesystem::path& path, const Matrix& m) {
  write_file_atomic(path, path.extension() == ".json" ? encode_matrix_json(m) : encode_sapm(m));
}

}  // namespace ctxbias
