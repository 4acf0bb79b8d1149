"""Timing harness for persistence-sphere evaluation."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .diagram import PersistenceDiagram, make_diagram
from .sphere import evaluate_ps, make_grid
from .weighting import Weighting

__all__ = ["BenchRow", "bench_diagram", "time_evaluate", "run_bench", "scaling_checks"]

SIZES = (100, 1000, 10000)
GRIDS = ((100, 50), (200, 100), (400, 200))
WORKERS = (1, 2, 4)


@dataclass
class BenchRow:
    n_points: int
    n_theta: int
    n_phi: int
    workers: int
    seconds: float
    identical: bool


def bench_diagram(n: int, seed: int = 0) -> PersistenceDiagram:
    rng = np.random.default_rng(seed)
    a = rng.uniform(0.0, 10.0, (n, 2))
    a.sort(axis=1)
    a[:, 1] += 1e-9  # keep strictly above the diagonal
    return make_diagram(a)


def time_evaluate(d, w, grid, workers: int, repeats: int = 3):
    """Best-of-``repeats`` wall time and the last field's values."""
    best = float("inf")
    vals = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        vals = evaluate_ps(d, w, grid, workers=workers).values
        best = min(best, time.perf_counter() - t0)
    return best, vals


def run_bench(sizes=SIZES, grids=GRIDS, workers=WORKERS, repeats: int = 3, seed: int = 0,
              weighting: Weighting = Weighting()) -> list[BenchRow]:
    rows = []
    evaluate_ps(make_diagram([(0, 1)]), weighting, make_grid(2, 2))  # compile
    for n in sizes:
        d = bench_diagram(n, seed)
        for nt, nf in grids:
            grid = make_grid(nt, nf)
            ref = None
            for wk in workers:
                secs, vals = time_evaluate(d, weighting, grid, wk, repeats)
                if ref is None:
                    ref = vals
                rows.append(BenchRow(n, nt, nf, wk, secs, bool(np.array_equal(vals, ref))))
    return rows


def scaling_checks(n: int = 10000, grid=(200, 100), workers: int = 4, repeats: int = 7,
                   seed: int = 0, weighting: Weighting = Weighting()) -> dict:
    """Time ratios for doubling diagram size, doubling grid nodes, and the parallel speedup.

    Configurations are timed round-robin and each keeps its best time, so slow
    drift in machine load hits all of them alike.
    """
    nt, nf = grid
    evaluate_ps(make_diagram([(0, 1)]), weighting, make_grid(2, 2))
    d = bench_diagram(n, seed)
    d2 = bench_diagram(2 * n, seed + 1)
    big = make_grid(2 * nt, 2 * nf)
    cases = {
        "base": (d, make_grid(nt, nf), 1),
        "double_points": (d2, make_grid(nt, nf), 1),
        "double_grid": (d, make_grid(2 * nt, nf), 1),
        "largest_1": (d, big, 1),
        f"largest_{workers}": (d, big, workers),
    }
    best = dict.fromkeys(cases, float("inf"))
    vals = {}
    for _ in range(repeats):
        for key, (dg, g, wk) in cases.items():
            secs, vals[key] = time_evaluate(dg, weighting, g, wk, 1)
            best[key] = min(best[key], secs)
    return {
        "points_ratio": best["double_points"] / best["base"],
        "grid_ratio": best["double_grid"] / best["base"],
        "speedup": best["largest_1"] / best[f"largest_{workers}"],
        "workers": workers,
        "identical": bool(np.array_equal(vals["largest_1"], vals[f"largest_{workers}"])),
        "seconds": best,
    }
