"""Seeded fuzz runs of the three reduction algorithms with per-n statistics.

Reports step-tag counts (which chooser produced each step), landing curves for
pairs, and normal-form shapes for factorizations.
"""

import argparse
import random
import time
from collections import Counter

from spherical_an import derived_objects as do
from spherical_an import fuzzing as fz
from spherical_an import normalizer as nm
from spherical_an.chain_core import SubchainLineBundle as S
from spherical_an.twist_engine import apply_word


def spherical(n, seed, cfg, stats):
    _, _, d = fz.random_spherical(n, random.Random(seed), cfg)
    tr = nm.reduce_spherical(d)
    stats["l"][d.l_value()] += 1
    for st in tr.steps:
        stats["tags"][st.tag] += 1


def pair(n, seed, cfg, stats):
    w = fz.random_autoequivalence(n, random.Random(seed), cfg)
    a = apply_word(w, do.sheaf(n, S.curve(1, 0)))
    b = apply_word(w, do.sheaf(n, S.curve(1, -1)))
    tr = nm.reduce_pair(a, b)
    stats["landing"][tr.curve] += 1
    for st in tr.steps:
        stats["tags"][st.tag] += 1


def factor(n, seed, cfg, stats):
    w = fz.random_autoequivalence(n, random.Random(seed), cfg)
    nf = nm.normalize_autoequivalence(w).normal_form
    shape = ("B" if len(nf.b_word) else "-") + ("L" if not nf.pic.is_trivial() else "-") + \
        ("f" if nf.flip else "-") + ("s" if nf.shift else "-")
    stats["shape"][shape] += 1


KINDS = {"spherical": spherical, "pair": pair, "factor": factor}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("kind", choices=KINDS)
    ap.add_argument("--n", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--cases", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--max-l", type=int, default=fz.FuzzConfig.max_l)
    args = ap.parse_args()
    cfg = fz.FuzzConfig(max_l=args.max_l)
    for n in args.n:
        stats = {k: Counter() for k in ("l", "tags", "landing", "shape")}
        fails = []
        t0 = time.time()
        for k in range(args.cases):
            seed = args.seed + 1000 * n + k
            try:
                KINDS[args.kind](n, seed, cfg, stats)
            except Exception as exc:
                fails.append((seed, f"{type(exc).__name__}: {exc}"))
        print(f"n={n}: {args.cases - len(fails)}/{args.cases} ok in {time.time() - t0:.1f}s")
        for key, c in stats.items():
            if c:
                print(f"  {key}: {dict(sorted(c.items()))}")
        for seed, msg in fails[:5]:
            print(f"  FAIL seed {seed}: {msg}")


if __name__ == "__main__":
    main()
