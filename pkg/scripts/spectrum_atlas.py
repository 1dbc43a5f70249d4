"""Tabulate diagonal-derivation masks across a grid of (lambda, mu) values.

Usage: python3 scripts/spectrum_atlas.py [--steps 41] [--extent 3]
"""
import argparse
from collections import Counter

import numpy as np

from hqds3.derivations import SingularSpectrum, admissible_mask, normalize_spectrum


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=41, help="grid points per axis")
    ap.add_argument("--extent", type=float, default=3.0, help="half-width of the grid")
    args = ap.parse_args()

    grid = np.linspace(-args.extent, args.extent, args.steps)
    mask_sizes = Counter()
    families = Counter()
    richest: tuple[int, float, float] = (0, 0.0, 0.0)
    for lam in grid:
        for mu in grid:
            try:
                mask = admissible_mask(lam, mu)
                case = normalize_spectrum(np.array([1.0, lam, mu]))
            except SingularSpectrum:
                continue
            k = len(mask.allowed_letters())
            mask_sizes[k] += 1
            families[case.family] += 1
            if k > richest[0]:
                richest = (k, float(lam), float(mu))

    print(f"grid {args.steps}x{args.steps} on [-{args.extent}, {args.extent}]^2")
    print("allowed-constant count histogram:")
    for k in sorted(mask_sizes):
        print(f"  {k} letters: {mask_sizes[k]} points")
    print("spectrum family histogram (off-arrangement = no constraint line):")
    for fam, count in sorted(families.items(), key=lambda kv: str(kv[0])):
        print(f"  family {fam}: {count} points")
    print(f"largest mask on the grid: {richest[0]} letters at "
          f"(lambda, mu) = ({richest[1]:g}, {richest[2]:g})")


if __name__ == "__main__":
    main()
