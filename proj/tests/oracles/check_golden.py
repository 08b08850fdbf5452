#!/usr/bin/env python3
# Copyright 2026 The ctxbias Authors.
# SPDX-License-Identifier: Apache-2.0
"""Fails when the checked-in golden report drifts from what the oracle produces."""

import json
import os
import subprocess
import sys

root = sys.argv[1]
here = os.path.dirname(os.path.abspath(__file__))
fresh = subprocess.run([sys.executable, os.path.join(here, "golden_scorer.py"),
                        os.path.join(root, "fixtures", "corpus", "manifest.jsonl"), "3"],
                       check=True, capture_output=True, text=True).stdout
with open(os.path.join(root, "tests", "golden", "e2e_window3.json"), encoding="utf-8") as f:
    stored = json.load(f)
if json.loads(fresh) != stored:
    print("golden report differs from oracle output")
    sys.exit(1)
print("golden report matches oracle output")
