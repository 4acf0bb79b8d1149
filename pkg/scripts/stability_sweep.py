"""Empirical stability ratio sup|phi_a - phi_b| / W1(a, b) over random diagram pairs.

Prints the largest observed ratio per weighting next to the estimated constant.

Usage: python scripts/stability_sweep.py [--pairs 1000] [--grid 200x100] [--seed 0]
"""
import argparse
import math

import numpy as np

from persphere.data import random_diagram
from persphere.diagram import w1_distance
from persphere.sphere import evaluate_ps, lp_distance, make_grid, parse_grid_spec
from persphere.weighting import Weighting, estimate_constants

WEIGHTINGS = [Weighting("lambda", 1.0), Weighting("lambda", 2.0),
              Weighting("arctan", 1.0, 0.1), Weighting("arctan", 1.0, 1.0)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pairs", type=int, default=1000)
    ap.add_argument("--max-points", type=int, default=10)
    ap.add_argument("--grid", default="200x100")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    grid = make_grid(*parse_grid_spec(args.grid))
    box = (0.0, 10.0, 0.0, 10.0)
    for w in WEIGHTINGS:
        rng = np.random.default_rng(args.seed)
        const = estimate_constants(w, box, seed=args.seed)
        worst = 0.0
        for _ in range(args.pairs):
            a, b = random_diagram(rng, args.max_points), random_diagram(rng, args.max_points)
            w1 = w1_distance(a, b)
            if w1 > 0:
                dist = lp_distance(evaluate_ps(a, w, grid), evaluate_ps(b, w, grid), math.inf)
                worst = max(worst, dist / w1)
        print(f"{w.kind:>7} alpha={w.alpha:<4} k={w.k:<5} C={const.lipschitz_c:.4f} "
              f"C'={const.norm_c_prime:.4f} bound={const.bound:.4f} worst={worst:.4f}")


if __name__ == "__main__":
    main()
