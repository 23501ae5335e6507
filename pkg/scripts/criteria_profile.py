#!/usr/bin/env python3
"""Annulus-by-annulus decay profile of the criterion quantities.

Prints the per-annulus maxima of all six quantities for one symbol pair, the
verdicts, and the decay exponent fitted over the last annuli.  Useful for
seeing which grid depth a given pair needs before the decay gate certifies.

Usage:
  python scripts/criteria_profile.py --alpha -0.5 --m-max 24 \
      --psi "psi_power:beta=1.5" --phi "mobius_self_map:lambda=0.5"
"""

import argparse
import math
import sys

from wco import catalog
from wco.criteria import QUANTITY_TAGS, AnnularGrid, evaluate_quantities
from wco.spaces import SpaceParams


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--psi", default="psi_power:beta=2.5")
    ap.add_argument("--phi", default="mobius_self_map:lambda=0.5")
    ap.add_argument("--alpha", type=float, default=0.5)
    ap.add_argument("--m-max", type=int, default=18, dest="m_max")
    args = ap.parse_args(argv)

    psi = catalog.from_spec(args.psi)
    phi = catalog.from_spec(args.phi)
    grid = AnnularGrid(m_max=args.m_max)
    report = evaluate_quantities(psi, phi, SpaceParams(args.alpha), grid)

    header = "%3s" + "  %11s" * len(QUANTITY_TAGS)
    print(header % (("m",) + QUANTITY_TAGS))
    for i, m in enumerate(grid.levels()):
        row = [report.quantities[t].annulus_max[i] for t in QUANTITY_TAGS]
        print(("%3d" + "  %11.4e" * len(row)) % ((m,) + tuple(row)))
    print()
    for tag in QUANTITY_TAGS:
        q = report.quantities[tag]
        seq = q.annulus_max
        if seq[-1] > 0 and seq[-5] > 0:
            rate = math.log2(seq[-5] / seq[-1]) / 4.0
        else:
            rate = float("inf")
        print(
            "%-20s verdict=%-16s %+.3f halvings per annulus"
            % (tag, q.verdict, rate)
        )
    print()
    print("verdicts:", report.verdicts)
    return 0


if __name__ == "__main__":
    sys.exit(main())
