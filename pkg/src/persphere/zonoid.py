"""Lift zonoids as generator lists, support functions and Hausdorff distance."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from ._kernels import relu_sum
from .diagram import PersistenceDiagram
from .sphere import SphereGrid, make_grid, spherical_to_unit
from .weighting import as_weight_fn

__all__ = [
    "LiftZonoid",
    "lift_zonoid",
    "support",
    "minkowski_sum",
    "hausdorff",
    "hausdorff_bruteforce",
]


@dataclass(frozen=True, eq=False)
class LiftZonoid:
    """Zonotope ``sum_i [0, g_i]`` given by its generators (rows of an (n, 3) array)."""

    generators: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.generators, dtype=float).reshape(-1, 3)
        g.setflags(write=False)
        object.__setattr__(self, "generators", g)

    def __len__(self):
        return len(self.generators)


def lift_zonoid(d: PersistenceDiagram, w) -> LiftZonoid:
    """One generator ``c_p * omega(p) * (1, birth, death)`` per point, canonical order.

    ``w`` may be a :class:`~persphere.weighting.Weighting` or any vectorized
    ``(births, deaths) -> weights`` callable, including ``unstable_weight``.
    """
    if len(d) == 0:
        return LiftZonoid(np.zeros((0, 3)))
    fn = as_weight_fn(w)
    scale = fn(d.births, d.deaths) * d.multiplicities
    lifted = np.column_stack([np.ones(len(d)), d.births, d.deaths])
    return LiftZonoid(scale[:, None] * lifted)


def support(z: LiftZonoid, x) -> np.ndarray | float:
    """``h_Z(x) = sum_i max(0, <x, g_i>)``; ``x`` may be one vector or an (m, 3) array."""
    x = np.asarray(x, dtype=float)
    vals = np.maximum(x.reshape(-1, 3) @ z.generators.T, 0.0).sum(axis=1)
    return float(vals[0]) if x.ndim == 1 else vals


def minkowski_sum(z1: LiftZonoid, z2: LiftZonoid) -> LiftZonoid:
    return LiftZonoid(np.vstack([z1.generators, z2.generators]))


def _diff_terms(z1: LiftZonoid, z2: LiftZonoid):
    vecs = np.vstack([z1.generators, z2.generators])
    coef = np.concatenate([np.ones(len(z1)), -np.ones(len(z2))])
    return vecs, coef


def hausdorff(z1: LiftZonoid, z2: LiftZonoid, grid: SphereGrid | None = None,
              refine_steps: int = 3, n_starts: int = 8, workers: int | None = None) -> float:
    """Hausdorff distance as the sup over directions of ``|h_1 - h_2|``.

    The sup is searched on ``grid`` and then refined ``refine_steps`` times
    around the ``n_starts`` best nodes with a 5x5 patch whose spacing halves
    each round. The result is a lower bound on the true distance and never
    decreases with more refinement.
    """
    grid = grid or make_grid()
    vecs, coef = _diff_terms(z1, z2)
    if len(vecs) == 0:
        return 0.0
    vals = np.abs(relu_sum(grid.nodes, vecs, coef, workers=workers))
    best = float(vals.max())
    if refine_steps <= 0:
        return best
    t_all, f_all = grid.node_angles()
    k = min(n_starts, len(vals))
    starts = np.argpartition(-vals, k - 1)[:k]
    dt, df = grid.spacing
    offsets = np.arange(-2, 3)
    for s in starts:
        t0, f0, cur = t_all[s], f_all[s], vals[s]
        ht, hf = dt / 2.0, df / 2.0
        for _ in range(refine_steps):
            tt, ff = np.meshgrid(t0 + offsets * ht, f0 + offsets * hf, indexing="ij")
            tt, ff = tt.ravel(), ff.ravel()
            dirs = spherical_to_unit(tt, ff)
            local = np.abs(relu_sum(dirs, vecs, coef, workers=1))
            j = int(np.argmax(local))
            if local[j] > cur:
                cur, t0, f0 = float(local[j]), tt[j], ff[j]
            ht, hf = ht / 2.0, hf / 2.0
        best = max(best, cur)
    return best


def _sample_zonotope(z: LiftZonoid, m: int) -> np.ndarray:
    if len(z) == 0:
        return np.zeros((1, 3))
    t = np.linspace(0.0, 1.0, m)
    mesh = np.meshgrid(*([t] * len(z)), indexing="ij")
    coeffs = np.stack([c.ravel() for c in mesh], axis=1)
    return coeffs @ z.generators


def hausdorff_bruteforce(z1: LiftZonoid, z2: LiftZonoid, samples_per_generator: int = 61) -> float:
    """Two-sided point-set Hausdorff distance between dense samples of two zonotopes."""
    if len(z1) > 3 or len(z2) > 3:
        raise ValueError("hausdorff_bruteforce supports at most 3 generators per zonoid")
    if samples_per_generator < 2:
        raise ValueError("samples_per_generator must be >= 2")
    a = _sample_zonotope(z1, samples_per_generator)
    b = _sample_zonotope(z2, samples_per_generator)
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba))
