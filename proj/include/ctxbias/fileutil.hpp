// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ctxbias {

/// Whole file as bytes; IoError naming the path when unreadable.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file, then renames over the target. Creates
/// missing parent directories.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace ctxbias
