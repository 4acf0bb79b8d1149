"""Lift weightings omega and their lifted maps Gamma(p) = omega(p) * (1, p)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

__all__ = [
    "Weighting",
    "StabilityConstants",
    "lambda_ratio",
    "omega",
    "gamma",
    "unstable_weight",
    "estimate_constants",
    "as_weight_fn",
    "K_GRID",
]

# K values explored for the arctan weighting in the reference experiments
K_GRID = (1e-5, 1e-4, 1e-3, 1e-2, 0.1, 0.2, 0.3, 0.4, 0.5)

WeightFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _lambda(b, d):
    b = np.asarray(b, dtype=float)
    d = np.asarray(d, dtype=float)
    return (d - b) / (2.0 * np.sqrt(1.0 + b * b + d * d))


@dataclass(frozen=True)
class Weighting:
    """Stable lift weighting.

    ``kind="lambda"`` is ``lambda(p)**alpha``; ``kind="arctan"`` is
    ``(2/pi) * arctan(lambda(p)**alpha / k**alpha)``.
    """

    kind: str = "arctan"
    alpha: float = 1.0
    k: float = 0.1

    def __post_init__(self):
        kind = {"power-lambda": "lambda"}.get(self.kind, self.kind)
        if kind not in ("lambda", "arctan"):
            raise ValueError(f"unknown weighting kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not self.alpha >= 1:
            raise ValueError("alpha must be >= 1")
        if not self.k > 0:
            raise ValueError("k must be > 0")

    def __call__(self, births, deaths) -> np.ndarray:
        lam = _lambda(births, deaths)
        if self.kind == "lambda":
            return lam ** self.alpha
        return (2.0 / math.pi) * np.arctan(lam ** self.alpha / self.k ** self.alpha)

    def params(self) -> dict:
        out = {"kind": self.kind, "alpha": self.alpha}
        if self.kind == "arctan":
            out["k"] = self.k
        return out


@dataclass(frozen=True)
class StabilityConstants:
    lipschitz_c: float
    norm_c_prime: float
    domain_box: tuple[float, float, float, float]

    @property
    def bound(self) -> float:
        """``max(C, C')``, the constant in the forward stability inequality."""
        return max(self.lipschitz_c, self.norm_c_prime)


def unstable_weight(p) -> float:
    """``death - birth``: not a stable weighting (kept for the counterexample)."""
    return float(p[1]) - float(p[0])


def _unstable_vec(b, d):
    return np.asarray(d, dtype=float) - np.asarray(b, dtype=float)


def as_weight_fn(w: Union[Weighting, WeightFn]) -> WeightFn:
    """Vectorized ``(births, deaths) -> omega``; ``unstable_weight`` is accepted too."""
    if isinstance(w, Weighting):
        return w
    if w is unstable_weight:
        return _unstable_vec
    if callable(w):
        return w
    raise TypeError(f"not a weighting: {w!r}")


def lambda_ratio(p) -> float:
    return float(_lambda(p[0], p[1]))


def omega(w: Weighting, p) -> float:
    return float(as_weight_fn(w)(p[0], p[1]))


def gamma(w: Weighting, p) -> np.ndarray:
    """Lifted point ``omega(p) * (1, birth, death)``."""
    b, d = float(p[0]), float(p[1])
    return omega(w, (b, d)) * np.array([1.0, b, d])


def _gamma_vec(fn: WeightFn, b: np.ndarray, d: np.ndarray) -> np.ndarray:
    wts = fn(b, d)
    return wts[..., None] * np.stack([np.ones_like(b), b, d], axis=-1)


def _sample_above_diagonal(rng, box, n):
    bmin, bmax, dmin, dmax = box
    out_b, out_d, got = [], [], 0
    for _ in range(1000):
        b = rng.uniform(bmin, bmax, 2 * n)
        d = rng.uniform(dmin, dmax, 2 * n)
        keep = b < d
        out_b.append(b[keep])
        out_d.append(d[keep])
        got += int(keep.sum())
        if got >= n:
            break
    return np.concatenate(out_b)[:n], np.concatenate(out_d)[:n]


def estimate_constants(
    w: Union[Weighting, WeightFn],
    box: Sequence[float] = (0.0, 10.0, 0.0, 10.0),
    samples: int = 20000,
    seed: int = 0,
    metric: str = "linf",
    margin: float = 0.10,
) -> StabilityConstants:
    """Numerically estimate the stability constants of a weighting on a box.

    ``box`` is ``(birth_min, birth_max, death_min, death_max)``. The Lipschitz
    constant is measured from ``(R^2, metric)`` to ``(R^3, l2)``; the default
    ``"linf"`` matches the ground cost of the Wasserstein distance. Both
    estimates are inflated by ``margin`` unless known in closed form.
    """
    box = tuple(float(v) for v in box)
    bmin, bmax, dmin, dmax = box
    if not (bmax > bmin and dmax > dmin) or bmin >= dmax:
        raise ValueError(f"degenerate box {box}")
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    if metric not in ("linf", "l2"):
        raise ValueError("metric must be 'linf' or 'l2'")
    fn = as_weight_fn(w)
    rng = np.random.default_rng(seed)
    b, d = _sample_above_diagonal(rng, box, samples)

    def plane_norm(db, dd):
        if metric == "linf":
            return np.maximum(np.abs(db), np.abs(dd))
        return np.hypot(db, dd)

    g = _gamma_vec(fn, b, d)
    # global pairs
    perm = rng.permutation(len(b))
    num = np.linalg.norm(g - g[perm], axis=1)
    den = plane_norm(b - b[perm], d - d[perm])
    ok = den > 0
    lip = float(np.max(num[ok] / den[ok])) if ok.any() else 0.0

    # local slopes from central differences
    h = 1e-6 * max(1.0, bmax - bmin, dmax - dmin)
    inner = (d - b) > 4 * h
    bi, di = b[inner], d[inner]
    jb = (_gamma_vec(fn, bi + h, di) - _gamma_vec(fn, bi - h, di)) / (2 * h)
    jd = (_gamma_vec(fn, bi, di + h) - _gamma_vec(fn, bi, di - h)) / (2 * h)
    if len(bi):
        if metric == "linf":
            # operator norm over the l-inf unit ball is attained at a corner
            local = np.maximum(np.linalg.norm(jb + jd, axis=1), np.linalg.norm(jb - jd, axis=1))
        else:
            jac = np.stack([jb, jd], axis=2)
            local = np.linalg.svd(jac, compute_uv=False)[:, 0]
        lip = max(lip, float(local.max()))
    lip *= 1.0 + margin

    if isinstance(w, Weighting) and w.kind == "lambda" and w.alpha == 1:
        c_prime = 1.0
    else:
        ratio = np.linalg.norm(g, axis=1) / ((d - b) / 2.0)
        c_prime = float(np.max(ratio)) * (1.0 + margin)
    return StabilityConstants(lipschitz_c=lip, norm_c_prime=c_prime, domain_box=box)
