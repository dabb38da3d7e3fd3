#!/usr/bin/env python3
"""Regenerates the small Matrix Market fixtures under crates/core/tests/fixtures.

Output is fully determined by SEED, so re-running it leaves the files unchanged.
"""
import random
from pathlib import Path

SEED = 7321
OUT = Path(__file__).resolve().parent.parent / "crates" / "core" / "tests" / "fixtures"


def write(name, header, n_rows, n_cols, entries, comment):
    lines = [f"%%MatrixMarket matrix coordinate {header}", f"% {comment}"]
    lines.append(f"{n_rows} {n_cols} {len(entries)}")
    for i, j, v in entries:
        lines.append(f"{i + 1} {j + 1} {v!r}" if v is not None else f"{i + 1} {j + 1}")
    (OUT / name).write_text("\n".join(lines) + "\n")


def banded_scrambled(rng, n=2000, half_band=16, density=0.6):
    """SPD banded matrix under a random symmetric permutation (lower triangle)."""
    pairs = set()
    for i in range(n):
        for d in range(1, half_band + 1):
            if i - d >= 0 and rng.random() < density:
                pairs.add((i, i - d))
    perm = list(range(n))
    rng.shuffle(perm)
    entries = []
    for i in range(n):
        entries.append((perm[i], perm[i], 4.0 * half_band))
    for i, j in sorted(pairs):
        a, b = perm[i], perm[j]
        if a < b:
            a, b = b, a
        entries.append((a, b, -round(rng.uniform(0.1, 1.0), 3)))
    entries.sort(key=lambda e: (e[1], e[0]))
    write("banded_scrambled.mtx", "real symmetric", n, n, entries,
          f"banded SPD, n={n}, half bandwidth {half_band}, randomly permuted")


def random_general(rng, n=4000, per_row=6):
    entries = []
    for i in range(n):
        cols = rng.sample(range(n), per_row)
        for j in sorted(cols):
            entries.append((i, j, round(rng.uniform(-1.0, 1.0), 4)))
    write("random_general.mtx", "real general", n, n, entries, f"random general, n={n}")


def identity(n, name):
    write(name, "real general", n, n, [(i, i, 1.0) for i in range(n)], f"identity, n={n}")


def duplicates():
    entries = [(0, 0, 1.0), (0, 0, 2.5), (1, 2, -1.0), (2, 1, 4.0), (1, 2, 3.0), (2, 2, 1.0)]
    write("duplicates.mtx", "real general", 3, 3, entries, "repeated (i, j) entries are summed")


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    rng = random.Random(SEED)
    banded_scrambled(rng)
    random_general(rng)
    identity(2, "identity_2.mtx")
    identity(4096, "identity_4096.mtx")
    duplicates()


if __name__ == "__main__":
    main()
