// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "ctxbias/text.hpp"

using namespace ctxbias::text;

TEST_CASE("normalize examples") {
  CHECK(normalize("The Glaucoma test.") == Tokens{"the", "glaucoma", "test"});
  CHECK(normalize("it's A-B") == Tokens{"it's", "a-b"});
  CHECK(normalize("").empty());
  CHECK(normalize("   \t\n ").empty());
}

TEST_CASE("punctuation is removed without splitting words") {
  CHECK(normalize("Q&A, non-GAAP; TRAPPIST-1!") == Tokens{"qa", "non-gaap", "trappist-1"});
  CHECK(normalize("'quoted' -dash- rock'n'roll") == Tokens{"quoted", "dash", "rock'n'roll"});
  CHECK(normalize("Dr. -- ... Okonkwo") == Tokens{"dr", "okonkwo"});
  CHECK(normalize("snake_case") == Tokens{"snake_case"});
}

TEST_CASE("non-ASCII bytes are word characters and are not case-folded") {
  CHECK(normalize("Café Ünïcode") == Tokens{"café", "Ünïcode"});
  CHECK(normalize("naïve-test") == Tokens{"naïve-test"});
}

TEST_CASE("keyword helpers") {
  CHECK(normalize_keyword("  Visual  Field. ") == "visual field");
  CHECK(normalize_keyword("!!!").empty());
  CHECK(split_keyword("visual field") == Tokens{"visual", "field"});
  CHECK(normalize_keyword_list({"Glaucoma", "glaucoma.", "", "Optic Nerve", "optic  nerve"}) ==
        std::vector<std::string>{"glaucoma", "optic nerve"});
}

TEST_CASE("contains_run finds contiguous runs only") {
  const Tokens hay{"the", "red", "dwarf", "star"};
  CHECK(contains_run(hay, {"red", "dwarf"}));
  CHECK(contains_run(hay, {"star"}));
  CHECK_FALSE(contains_run(hay, {"red", "star"}));
  CHECK_FALSE(contains_run(hay, {}));
  CHECK_FALSE(contains_run({}, {"a"}));
}

TEST_CASE("to_code_points decodes UTF-8") {
  CHECK(to_code_points("abc") == std::u32string{U'a', U'b', U'c'});
  CHECK(to_code_points("é") == std::u32string{U'é'});
  CHECK(to_code_points("€") == std::u32string{U'€'});
  CHECK(to_code_points("\xF0\x9F\x98\x80") == std::u32string{U'\U0001F600'});
  CHECK(to_code_points("\xFF").size() == 1);
  CHECK(to_code_points("\xC3").size() == 1);
}
