// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include "ctxbias/text.hpp"

#include <algorithm>
#include <unordered_set>

namespace ctxbias::text {
namespace {

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_word(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80 || c == '_';
}

bool is_joiner(unsigned char c) { return c == '\'' || c == '-'; }

unsigned char fold(unsigned char c) { return (c >= 'A' && c <= 'Z') ? static_cast<unsigned char>(c - 'A' + 'a') : c; }

/// Keeps word characters, and joiners only with a word character on each side.
std::string clean_token(std::string_view raw) {
  std::string kept;
  kept.reserve(raw.size());
  for (unsigned char c : raw) {
    if (is_word(c) || is_joiner(c)) kept.push_back(static_cast<char>(fold(c)));
  }
  std::string out;
  out.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    const auto c = static_cast<unsigned char>(kept[i]);
    if (is_joiner(c)) {
      const bool left = !out.empty() && is_word(static_cast<unsigned char>(out.back()));
      const bool right = i + 1 < kept.size() && is_word(static_cast<unsigned char>(kept[i + 1]));
      if (!left || !right) continue;
    }
    out.push_back(static_cast<char>(c));
  }
  return out;
}

}  // namespace

Tokens normalize(std::string_view input) {
  Tokens out;
  std::size_t i = 0;
  while (i < input.size()) {
    while (i < input.size() && is_space(static_cast<unsigned char>(input[i]))) ++i;
    const std::size_t start = i;
    while (i < input.size() && !is_space(static_cast<unsigned char>(input[i]))) ++i;
    if (i > start) {
      std::string tok = clean_token(input.substr(start, i - start));
      if (!tok.empty()) out.push_back(std::move(tok));
    }
  }
  return out;
}

std::string normalize_keyword(std::string_view keyword) { return join(normalize(keyword), " "); }

Tokens split_keyword(std::string_view normalized) {
  Tokens out;
  std::size_t start = 0;
  while (start <= normalized.size()) {
    const std::size_t end = std::min(normalized.find(' ', start), normalized.size());
    if (end > start) out.emplace_back(normalized.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::vector<std::string> normalize_keyword_list(const std::vector<std::string>& keywords) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& k : keywords) {
    std::string n = normalize_keyword(k);
    if (!n.empty() && seen.insert(n).second) out.push_back(std::move(n));
  }
  return out;
}

bool contains_run(const Tokens& haystack, const Tokens& needle) {
  if (needle.empty()) return false;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

std::u32string to_code_points(std::string_view s) {
  std::u32string out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = c;
    if (c >= 0xF0 && c < 0xF8) {
      len = 4;
      cp = c & 0x07u;
    } else if (c >= 0xE0 && c < 0xF0) {
      len = 3;
      cp = c & 0x0Fu;
    } else if (c >= 0xC0 && c < 0xE0) {
      len = 2;
      cp = c & 0x1Fu;
    }
    bool ok = len > 1 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0u) != 0x80u) ok = false;
      cp = (cp << 6) | (cc & 0x3Fu);
    }
    if (len > 1 && !ok) {
      len = 1;
      cp = c;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

}  // namespace ctxbias::text
