// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

// SAPM binary layout (all little-endian):
//   offset 0  char[4]  "SAPM"
//   offset 4  u32      rows
//   offset 8  u32      cols
//   offset 12 f32[rows*cols], row-major
// The JSON form {"rows":R,"cols":C,"data":[...]} is accepted interchangeably.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "ctxbias/matrix.hpp"

namespace ctxbias {

/// Encodes as SAPM; values are narrowed to float32.
std::string encode_sapm(const Matrix& m);
/// Decodes SAPM bytes. Throws ParseError with the reason.
Matrix decode_sapm(std::string_view bytes);

std::string encode_matrix_json(const Matrix& m);
Matrix decode_matrix_json(std::string_view text);

/// Sniffs the magic: SAPM if present, otherwise JSON. Errors name the path.
Matrix load_matrix(const std::filesystem::path& path);
/// JSON when the extension is ".json", SAPM otherwise. Written atomically.
void save_matrix(const std::filesystem::path& path, const Matrix& m);

}  // namespace ctxbias
