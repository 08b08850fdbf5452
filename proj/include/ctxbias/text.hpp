// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ctxbias::text {

using Tokens = std::vector<std::string>;

/// Case-folds ASCII letters, drops punctuation except apostrophes and hyphens
/// that sit between two word characters, and splits on whitespace. Bytes
/// >= 0x80 (UTF-8 continuation and lead bytes) count as word characters.
Tokens normalize(std::string_view text);

/// Normalized tokens joined by single spaces; "" when nothing survives.
std::string normalize_keyword(std::string_view keyword);

/// Splits an already-normalized keyword back into its tokens.
Tokens split_keyword(std::string_view normalized);

/// Normalizes, drops empties and duplicates, keeps first-appearance order.
std::vector<std::string> normalize_keyword_list(const std::vector<std::string>& keywords);

/// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_run(const Tokens& haystack, const Tokens& needle);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Unicode code points of a UTF-8 string; invalid bytes map to themselves.
std::u32string to_code_points(std::string_view utf8);

}  // namespace ctxbias::text
