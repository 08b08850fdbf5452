// Copyright 2026 The ctxbias Authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include <doctest.h>

#include "ctxbias/error.hpp"
#include "ctxbias/scoring.hpp"
#include "oracles.hpp"

using namespace ctxbias;
using namespace ctxbias::scoring;
using text::Tokens;

TEST_CASE("align examples") {
  const Tokens abc{"a", "b", "c"};
  const Alignment same = align(abc, abc);
  CHECK(same.cost == 0);
  for (const auto& op : same.ops) CHECK(op.kind == OpKind::kMatch);

  const Alignment sub = align(abc, {"a", "x", "c"});
  CHECK(sub.cost == 1);
  REQUIRE(sub.ops.size() == 3);
  CHECK(sub.ops[1] == EditOp{OpKind::kSubstitute, 1, 1});

  const Alignment del = align(abc, {});
  CHECK(del.cost == 3);
  for (const auto& op : del.ops) CHECK(op.kind == OpKind::kDelete);

  const Alignment ins = align({}, {"p", "q"});
  CHECK(ins.cost == 2);
  CHECK(ins.ops == std::vector<EditOp>{{OpKind::kInsert, 0, 0}, {OpKind::kInsert, 0, 1}});
}

TEST_CASE("backtrace prefers substitution over delete plus insert") {
  const Alignment a = align({"a", "b"}, {"b", "a"});
  CHECK(a.cost == 2);
  CHECK(a.ops == std::vector<EditOp>{{OpKind::kSubstitute, 0, 0}, {OpKind::kSubstitute, 1, 1}});

  const Alignment d = align({"x", "a"}, {"a"});
  CHECK(d.ops == std::vector<EditOp>{{OpKind::kDelete, 0, 0}, {OpKind::kMatch, 1, 0}});
}

TEST_CASE("align cost equals the recursive oracle on random pairs") {
  std::mt19937_64 gen(21);
  for (int trial = 0; trial < 300; ++trial) {
    Tokens r(gen() % 12), h(gen() % 12);
    for (auto& t : r) t = std::string(1, static_cast<char>('a' + gen() % 4));
    for (auto& t : h) t = std::string(1, static_cast<char>('a' + gen() % 4));
    const Alignment a = align(r, h);
    CHECK(a.cost == testing::recursive_edit_distance(r, h));
    CHECK(edit_distance(r, h) == a.cost);
    std::size_t ri = 0, hi = 0, cost = 0;
    for (const auto& op : a.ops) {
      if (op.kind != OpKind::kInsert) CHECK(op.ref == ri++);
      if (op.kind != OpKind::kDelete) CHECK(op.hyp == hi++);
      if (op.kind != OpKind::kMatch) ++cost;
      if (op.kind == OpKind::kMatch) CHECK(r[op.ref] == h[op.hyp]);
      if (op.kind == OpKind::kSubstitute) CHECK(r[op.ref] != h[op.hyp]);
    }
    CHECK(ri == r.size());
    CHECK(hi == h.size());
    CHECK(cost == a.cost);
  }
}

TEST_CASE("score attributes errors by bias membership") {
  const Tokens ref{"the", "glaucoma", "test"};
  const Tokens hyp{"the", "glucoma", "test"};
  const ScoreReport r = score(align(ref, hyp), ref, hyp, make_bias_set({"glaucoma"}));
  CHECK(*r.wer == doctest::Approx(100.0 / 3.0).epsilon(1e-14));
  CHECK(*r.bwer == 100.0);
  CHECK(*r.uwer == 0.0);
  CHECK(*r.recall == 0.0);
  CHECK(r.counts.b_sub == 1);

  const ScoreReport perfect = score(align(ref, ref), ref, ref, make_bias_set({"glaucoma"}));
  CHECK(*perfect.wer == 0.0);
  CHECK(*perfect.bwer == 0.0);
  CHECK(*perfect.recall == 100.0);

  const ScoreReport unbiased = score(align(ref, hyp), ref, hyp, {});
  CHECK_FALSE(unbiased.bwer.has_value());
  CHECK_FALSE(unbiased.recall.has_value());
  CHECK(*unbiased.uwer == *unbiased.wer);
}

TEST_CASE("insertions follow the inserted word or the unbiased policy") {
  const Tokens ref{"a", "b"};
  const Tokens hyp{"a", "glaucoma", "b"};
  const BiasSet bias = make_bias_set({"glaucoma"});
  const ScoreReport by_word = score(align(ref, hyp), ref, hyp, bias);
  CHECK(by_word.counts.b_ins == 1);
  CHECK_FALSE(by_word.bwer.has_value());
  const ScoreReport all_u = score(align(ref, hyp), ref, hyp, bias, InsertionPolicy::kAllUnbiased);
  CHECK(all_u.counts.b_ins == 0);
  CHECK(*all_u.uwer == 50.0);
}

TEST_CASE("multi-word keywords contribute each token") {
  const BiasSet s = make_bias_set({"Red Dwarf", "glaucoma."});
  CHECK(s == BiasSet{"red", "dwarf", "glaucoma"});
}

TEST_CASE("score rejects an alignment for other tokens") {
  const Tokens ref{"a", "b"};
  const Alignment wrong = align({"a"}, {"a"});
  CHECK_THROWS_AS(score(wrong, ref, ref, {}), ArgumentError);
}

TEST_CASE("aggregate pools counts") {
  Counts one;
  one.sub = 1;
  one.hits = 9;
  one.ref_len = 10;
  Counts zero;
  zero.hits = 10;
  zero.ref_len = 10;
  const ScoreReport agg = aggregate({ScoreReport::from_counts(one), ScoreReport::from_counts(zero)});
  CHECK(*agg.wer == 5.0);
  CHECK(aggregate({ScoreReport::from_counts(one)}) == ScoreReport::from_counts(one));
  CHECK_THROWS_AS(aggregate({}), ArgumentError);
}

TEST_CASE("summary line layout") {
  Counts c;
  c.sub = 1;
  c.b_sub = 1;
  c.hits = 2;
  c.b_hits = 0;
  c.ref_len = 3;
  c.b_ref_len = 1;
  CHECK(summary_line(ScoreReport::from_counts(c)) == "WER 33.33 (U 0.00 / B 100.00) R 0.00");
  CHECK(summary_line(ScoreReport::from_counts(Counts{})) == "WER - (U - / B -) R -");
}
