#!/usr/bin/env python3
# Copyright 2026 The ctxbias Authors.
# SPDX-License-Identifier: Apache-2.0
"""Regenerates the bundled synthetic corpus under fixtures/corpus/.

Three slide decks (ophthalmology, corporate finance, astronomy), twenty
utterances with reference transcripts and imperfect hypotheses, a common
vocabulary and a rare-word pool. Output is deterministic.
"""

import itertools
import json
import os

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "corpus")

DECKS = {
    "eye": [
        ["Ophthalmology", "Grand Rounds", "retina", "cornea", "presenter"],
        ["glaucoma", "intraocular", "pressure", "trabecular", "meshwork"],
        ["tonometry", "Goldmann", "applanation", "glaucoma", "screening"],
        ["optic", "nerve", "cupping", "perimetry", "visual field"],
        ["latanoprost", "timolol", "prostaglandin", "eye drops"],
        ["trabeculectomy", "laser", "iridotomy", "surgery", "outcomes"],
        ["summary", "questions", "references", "Dr. Okonkwo"],
    ],
    "fin": [
        ["Quarterly", "Earnings", "Review", "agenda"],
        ["revenue", "EBITDA", "margin", "guidance", "year-over-year"],
        ["amortization", "goodwill", "impairment", "write-down"],
        ["liquidity", "covenant", "refinancing", "debenture"],
        ["buyback", "dividend", "shareholders", "payout"],
        ["outlook", "headwinds", "tariffs", "forecast"],
        ["appendix", "non-GAAP", "reconciliation", "Q&A"],
    ],
    "astro": [
        ["Exoplanet", "Survey", "telescope", "Keplerian"],
        ["transit", "photometry", "lightcurve", "ingress", "egress"],
        ["radial velocity", "spectrograph", "Doppler", "wobble"],
        ["habitable zone", "albedo", "equilibrium", "temperature"],
        ["TRAPPIST-1", "red dwarf", "tidally", "locked"],
        ["JWST", "spectroscopy", "biosignatures", "methane"],
    ],
}

# (id, deck, current slide, reference, hypothesis)
UTTERANCES = [
    ("eye-01", "eye", 1, "Today we look at glaucoma and how intraocular pressure damages the optic nerve.",
     "Today we look at glacoma and how intra ocular pressure damages the optic nerve."),
    ("eye-02", "eye", 1, "The trabecular meshwork controls outflow of aqueous fluid.",
     "The trabecular mesh work controls outflow of aqueous fluid."),
    ("eye-03", "eye", 2, "Goldmann applanation tonometry remains the reference for measuring pressure.",
     "Goldman applanation tonometry remains the reference for measuring pressure."),
    ("eye-04", "eye", 3, "Perimetry shows the visual field loss that follows cupping of the nerve.",
     "Perimetry shows the visual field loss that follows the cupping of the nerve."),
    ("eye-05", "eye", 4, "Latanoprost is a prostaglandin analogue and timolol is a beta blocker.",
     "Latanoprost is a prostaglandin analog and timolol is a beta blocker."),
    ("eye-06", "eye", 5, "When drops fail we consider laser iridotomy or trabeculectomy.",
     "When drops fail we consider laser iridotomy or trabeculectomy."),
    ("eye-07", "eye", 6, "Thank you Dr. Okonkwo for the questions and references.",
     "Thank you doctor Okonkwo for questions and the references."),
    ("fin-01", "fin", 1, "Revenue grew eight percent year-over-year and EBITDA margin expanded.",
     "Revenue grew eight percent year over year and a bit a margin expanded."),
    ("fin-02", "fin", 1, "We are raising full year guidance on revenue.",
     "We are raising full year guidance on revenue."),
    ("fin-03", "fin", 2, "Amortization of goodwill led to an impairment charge this quarter.",
     "Amortization of good will led to an impairment charge this quarter."),
    ("fin-04", "fin", 3, "Our liquidity is strong and the covenant package allows refinancing.",
     "Our liquidity is strong and the covenant package allows re financing."),
    ("fin-05", "fin", 4, "The board approved a buyback and raised the dividend for shareholders.",
     "The board approved a buy back and raised the dividend for shareholders."),
    ("fin-06", "fin", 5, "Tariffs remain a headwind for the forecast.",
     "Tariffs remain the headwind for the forecast period."),
    ("fin-07", "fin", 6, "The appendix includes a non-GAAP reconciliation.",
     "The appendix includes a non gap reconciliation."),
    ("astro-01", "astro", 1, "Transit photometry measures the dip in the lightcurve during ingress and egress.",
     "Transit photometry measures the dip in the light curve during ingress and egress."),
    ("astro-02", "astro", 2, "A spectrograph detects the Doppler wobble of the star.",
     "A spectrograph detects the doppler wobble of the star."),
    ("astro-03", "astro", 3, "Planets in the habitable zone have moderate equilibrium temperature.",
     "Planets in the habitable zone have moderate equilibrium temperatures."),
    ("astro-04", "astro", 3, "Albedo sets how much light the planet reflects.",
     "Albedo sets how much light planet reflects."),
    ("astro-05", "astro", 4, "The planets of TRAPPIST-1 orbit a red dwarf and are tidally locked.",
     "The planets of trappist one orbit a red dwarf and are tidally locked."),
    ("astro-06", "astro", 5, "JWST spectroscopy could reveal methane as one of the biosignatures.",
     "J W S T spectroscopy could reveal methane as one of the bio signatures."),
]

# Transcript words that count as rare (outside the common vocabulary).
RARE = {
    "glaucoma", "intraocular", "trabecular", "meshwork", "goldmann", "applanation", "tonometry",
    "perimetry", "cupping", "latanoprost", "prostaglandin", "timolol", "iridotomy", "trabeculectomy",
    "okonkwo", "ebitda", "year-over-year", "amortization", "goodwill", "impairment", "covenant",
    "refinancing", "buyback", "tariffs", "non-gaap", "photometry", "lightcurve", "ingress", "egress",
    "spectrograph", "doppler", "albedo", "trappist-1", "jwst", "spectroscopy", "biosignatures",
    "methane", "tidally", "liquidity", "headwind", "reconciliation", "aqueous", "analogue",
}

EXTRA_COMMON = (
    "a an and are as at be been but by can do for from had has have he her his i if in into is it its me my "
    "no not of on or our out she so some than that the their them then there these they this those to up us "
    "was we were what when which who will with would you your one two three four five six seven eight nine ten "
    "time year day people way man woman child world life hand part place case week company system program "
    "question work government number night point home water room mother area money story fact month lot right "
    "study book eye job word business issue side kind head house service friend father power hour game line end"
).split()


def normalize(text):
    toks = []
    for raw in text.split():
        kept = "".join(c.lower() if c.isascii() and c.isupper() else c
                       for c in raw if c.isalnum() or c in "'-_" or ord(c) >= 0x80)
        out = []
        for i, c in enumerate(kept):
            if c in "'-":
                left = bool(out) and (out[-1].isalnum() or out[-1] == "_" or ord(out[-1]) >= 0x80)
                right = i + 1 < len(kept) and (kept[i + 1].isalnum() or kept[i + 1] == "_" or ord(kept[i + 1]) >= 0x80)
                if not (left and right):
                    continue
            out.append(c)
        if out:
            toks.append("".join(out))
    return toks


def pseudo_words(count):
    onsets = ["b", "br", "c", "cl", "d", "dr", "f", "g", "gr", "k", "l", "m", "n", "p", "pl", "qu", "r", "s",
              "st", "t", "tr", "v", "z"]
    vowels = ["a", "e", "i", "o", "u", "ai", "ou"]
    codas = ["", "n", "r", "x", "th", "sk", "lm"]
    words = []
    for a, b, c, d in itertools.product(onsets, vowels, onsets, codas):
        words.append(a + b + c + "o" + d)
        if len(words) == count:
            break
    return words


def main():
    os.makedirs(OUT, exist_ok=True)
    lines = []
    for uid, deck, current, ref, hyp in UTTERANCES:
        slides = [{"index": i, "keywords": kws} for i, kws in enumerate(DECKS[deck])]
        lines.append(json.dumps({"id": uid, "transcript": ref, "hypothesis": hyp, "current_slide": current,
                                 "slides": slides, "embedding_path": f"emb/{uid}.sapm"}))
    with open(os.path.join(OUT, "manifest.jsonl"), "w") as f:
        f.write("\n".join(lines) + "\n")

    common = set(EXTRA_COMMON)
    for _, _, _, ref, hyp in UTTERANCES:
        for tok in normalize(ref) + normalize(hyp):
            if tok not in RARE:
                common.add(tok)
    with open(os.path.join(OUT, "common_vocab.txt"), "w") as f:
        f.write("\n".join(sorted(common)) + "\n")

    rare = sorted(RARE)
    for deck in DECKS.values():
        for slide in deck:
            for kw in slide:
                for tok in normalize(kw):
                    if tok not in common and tok not in rare:
                        rare.append(tok)
    rare += [w for w in pseudo_words(2400) if w not in common and w not in rare]
    with open(os.path.join(OUT, "rare_pool.txt"), "w") as f:
        f.write("\n".join(rare) + "\n")


if __name__ == "__main__":
    main()
