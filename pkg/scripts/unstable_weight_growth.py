"""Hausdorff/W1 ratio for d_n = {(n^2, n^2 + 1/n)} under the unstable weight y - x and power-lambda.

Usage: python scripts/unstable_weight_growth.py [--max-log2 6] [--grid 200x100]
"""
import argparse
import math

import numpy as np

from persphere import make_diagram, w1_distance
from persphere.sphere import make_grid, parse_grid_spec
from persphere.weighting import Weighting, unstable_weight
from persphere.zonoid import LiftZonoid, hausdorff, lift_zonoid


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-log2", type=int, default=6)
    ap.add_argument("--grid", default="200x100")
    args = ap.parse_args()
    grid = make_grid(*parse_grid_spec(args.grid))
    origin = LiftZonoid(np.zeros((0, 3)))
    lam = Weighting("lambda", 1.0)
    print(f"{'n':>4} {'W1':>10} {'dH unstable':>12} {'sqrt2*n':>9} {'ratio':>10} {'ratio lambda':>13}")
    for k in range(args.max_log2 + 1):
        n = 2 ** k
        d = make_diagram([(n * n, n * n + 1 / n)])
        w1 = w1_distance(d, make_diagram([]))
        dh = hausdorff(lift_zonoid(d, unstable_weight), origin, grid, 3)
        dl = hausdorff(lift_zonoid(d, lam), origin, grid, 3)
        print(f"{n:>4} {w1:>10.5f} {dh:>12.4f} {math.sqrt(2) * n:>9.4f} {dh / w1:>10.2f} {dl / w1:>13.6f}")


if __name__ == "__main__":
    main()
