#!/usr/bin/env python3
# Copyright 2026 The ctxbias Authors.
# SPDX-License-Identifier: Apache-2.0
"""Independent reference for the cluster -> prune(oracle) -> score pipeline.

Written from the definitions, sharing no code with the C++ library: window
clustering over slides, oracle pruning by contiguous token runs, edit distance
by plain recursion with memoization, and the biased/unbiased attribution.

    python3 tests/oracles/golden_scorer.py fixtures/corpus/manifest.jsonl 3 > tests/golden/e2e_window3.json
"""

import functools
import json
import sys


def is_word(c):
    return c.isascii() and (c.isalnum() or c == "_") or ord(c) >= 0x80


def normalize(text):
    out = []
    for raw in text.split():
        chars = [c for c in raw if is_word(c) or c in "'-"]
        tok = []
        for i, c in enumerate(chars):
            if c in "'-" and not (tok and is_word(tok[-1]) and i + 1 < len(chars) and is_word(chars[i + 1])):
                continue
            tok.append(c.lower() if c.isascii() else c)
        if tok:
            out.append("".join(tok))
    return out


def normalize_keyword(k):
    return " ".join(normalize(k))


def keyword_list(keywords):
    seen, out = set(), []
    for k in keywords:
        n = normalize_keyword(k)
        if n and n not in seen:
            seen.add(n)
            out.append(n)
    return out


def window_context(slides, current, k):
    pos = [s["index"] for s in slides].index(current)
    lo = max(0, pos - (k - 1) // 2)
    hi = min(len(slides) - 1, pos + k // 2)
    merged = []
    for s in slides[lo:hi + 1]:
        for kw in keyword_list(s["keywords"]):
            if kw not in merged:
                merged.append(kw)
    return merged


def occurs(needle, hay):
    n = len(needle)
    return any(hay[i:i + n] == needle for i in range(len(hay) - n + 1)) if n else False


def oracle_prune(keywords, transcript):
    return [k for k in keywords if occurs(k.split(" "), transcript)]


def align(ref, hyp):
    @functools.lru_cache(maxsize=None)
    def dist(i, j):
        if i == 0:
            return j
        if j == 0:
            return i
        return min(dist(i - 1, j - 1) + (ref[i - 1] != hyp[j - 1]), dist(i - 1, j) + 1, dist(i, j - 1) + 1)

    ops = []
    i, j = len(ref), len(hyp)
    while i or j:
        d = dist(i, j)
        if i and j and ref[i - 1] == hyp[j - 1] and d == dist(i - 1, j - 1):
            ops.append(("M", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i and j and ref[i - 1] != hyp[j - 1] and d == dist(i - 1, j - 1) + 1:
            ops.append(("S", i - 1, j - 1))
            i, j = i - 1, j - 1
        elif i and d == dist(i - 1, j) + 1:
            ops.append(("D", i - 1, None))
            i -= 1
        else:
            ops.append(("I", None, j - 1))
            j -= 1
    return ops[::-1], dist(len(ref), len(hyp))


def count(ref, hyp, bias):
    c = dict(sub=0, dels=0, ins=0, hits=0, b_sub=0, b_del=0, b_ins=0, b_hits=0)
    ops, cost = align(ref, hyp)
    assert cost == sum(op[0] != "M" for op in ops)
    for kind, r, h in ops:
        biased = (ref[r] if r is not None else hyp[h]) in bias
        key = {"M": "hits", "S": "sub", "D": "dels", "I": "ins"}[kind]
        c[key] += 1
        if biased:
            c["b_" + {"hits": "hits", "sub": "sub", "dels": "del", "ins": "ins"}[key]] += 1
    return {"sub": c["sub"], "del": c["dels"], "ins": c["ins"], "hits": c["hits"], "b_sub": c["b_sub"],
            "b_del": c["b_del"], "b_ins": c["b_ins"], "b_hits": c["b_hits"], "ref_len": len(ref),
            "b_ref_len": sum(w in bias for w in ref)}


def rate(num, den):
    return 100.0 * num / den if den else None


def report(counts):
    errs = counts["sub"] + counts["del"] + counts["ins"]
    b_errs = counts["b_sub"] + counts["b_del"] + counts["b_ins"]
    return {
        "wer": rate(errs, counts["ref_len"]),
        "uwer": rate(errs - b_errs, counts["ref_len"] - counts["b_ref_len"]),
        "bwer": rate(b_errs, counts["b_ref_len"]),
        "recall": rate(counts["b_hits"], counts["b_ref_len"]),
        "counts": counts,
    }


def main():
    manifest, k = sys.argv[1], int(sys.argv[2])
    utts = [json.loads(line) for line in open(manifest, encoding="utf-8") if line.strip()]
    golden = {"window": k, "utterances": {}}
    total = None
    for u in utts:
        ref = normalize(u["transcript"])
        hyp = normalize(u["hypothesis"])
        context = window_context(u["slides"], u.get("current_slide", u["slides"][0]["index"]), k)
        kept = oracle_prune(context, ref)
        bias = {tok for kw in kept for tok in kw.split(" ")}
        counts = count(ref, hyp, bias)
        golden["utterances"][u["id"]] = {"context": context, "kept": kept, "counts": counts}
        total = counts if total is None else {key: total[key] + counts[key] for key in total}
    golden["report"] = report(total)
    json.dump(golden, sys.stdout, indent=2, ensure_ascii=False)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
