"""Sweep both classification routes over a seeded corpus and report agreement.

Usage: python3 scripts/classification_sweep.py [--n 100] [--seed 0]
"""
import argparse
import time
from collections import Counter

import numpy as np

from hqds3.catalog import conjugated_canonical, random_symmetric_algebra
from hqds3.classify import classify, classify_via_derivation

TAGS = ("A1", "A2", "A3", "A4")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=100, help="draws per corpus half")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    misses = 0
    disagreements = 0
    worst_residual = 0.0
    t0 = time.perf_counter()
    for i in range(args.n):
        tag = TAGS[i % 4]
        alg, _ = conjugated_canonical(tag, rng)
        res = classify(alg)
        via = classify_via_derivation(alg)
        misses += res.tag != tag
        disagreements += (
            res.is_definite and via.is_definite and res.tag != via.tag
        )
        if res.residual is not None:
            worst_residual = max(worst_residual, res.residual)
    conj_time = time.perf_counter() - t0

    tags = Counter()
    t0 = time.perf_counter()
    for _ in range(args.n):
        alg = random_symmetric_algebra(rng)
        res = classify(alg)
        via = classify_via_derivation(alg)
        tags[res.tag] += 1
        disagreements += (
            res.is_definite and via.is_definite and res.tag != via.tag
        )
    rand_time = time.perf_counter() - t0

    print(f"conjugated corpus   n={args.n}  misses={misses}  "
          f"worst certificate residual={worst_residual:.2e}  "
          f"({1e3 * conj_time / args.n:.1f} ms/alg)")
    print(f"random corpus       n={args.n}  tags={dict(tags)}  "
          f"({1e3 * rand_time / args.n:.1f} ms/alg)")
    print(f"definite-tag disagreements between routes: {disagreements}")


if __name__ == "__main__":
    main()
