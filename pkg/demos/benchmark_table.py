#!/usr/bin/env python3
"""Reproduce the benchmark protocol on a generated corpus.

Writes a small corpus of game files, then runs the harness the same way
the command line does: repeated seeded trials per method, validation of
every strategy, means and sample standard deviations, and a CSV table.
"""

import sys
import tempfile
from pathlib import Path

import sparsegames as sg
from sparsegames.cli import main

corpus = Path(tempfile.mkdtemp(prefix="sparsegames_corpus_"))
for n in (3, 5):
    (corpus / f"chain{n}.txt").write_bytes(sg.serialize_game(sg.gen_chain(n)))
for i in (2, 3):
    (corpus / f"trap{i}.txt").write_bytes(
        sg.serialize_game(sg.gen_adversarial(i))
    )
# one seeded random game, kept only if winnable
for seed in range(100):
    game = sg.gen_random(seed, 12, 12, 3)
    if game.init in sg.compute_winning_region(game):
        (corpus / f"random{seed}.txt").write_bytes(sg.serialize_game(game))
        break

print(f"corpus: {corpus}\n")
out_csv = corpus / "table.csv"
code = main(
    [
        "bench",
        str(corpus),
        "--methods", "random,smart,replp,ilp,sat",
        "--runs", "5",
        "--seed", "0",
        "--csv", str(out_csv),
    ]
)
print(f"\ntable also written to {out_csv}")
sys.exit(code)
