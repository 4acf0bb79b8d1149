"""Baseline vectorizations: persistence images, landscapes, sliced Wasserstein."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtr

from .diagram import PersistenceDiagram

__all__ = [
    "ImageParams",
    "LandscapeParams",
    "SwParams",
    "persistence_image",
    "image_params_for",
    "round_to_power_of_ten",
    "persistence_landscape",
    "landscape_grid_for",
    "sliced_wasserstein_distance",
    "sw_kernel",
    "sw_gram",
    "SW_SIGMA_GRID",
]

SW_SIGMA_GRID = (1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0)


@dataclass(frozen=True)
class ImageParams:
    """Persistence image on ``bounds = (birth_min, birth_max, pers_min, pers_max)``.

    ``resolution`` is ``(n_birth, n_pers)`` pixels. ``integration="erf"``
    integrates the Gaussian exactly over each pixel; ``"midpoint"`` uses
    density-at-center times pixel area.
    """

    resolution: tuple[int, int] = (20, 20)
    sigma: float = 0.1
    weight_exponent: int = 1
    bounds: tuple[float, float, float, float] = (0.0, 1.0, 0.0, 1.0)
    integration: str = "erf"

    def __post_init__(self):
        res = self.resolution
        if isinstance(res, int):
            res = (res, res)
        object.__setattr__(self, "resolution", (int(res[0]), int(res[1])))
        if min(self.resolution) < 1:
            raise ValueError("resolution must be >= 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")
        if self.weight_exponent < 1:
            raise ValueError("weight_exponent must be a positive integer")
        b0, b1, p0, p1 = self.bounds
        if not (b1 > b0 and p1 > p0):
            raise ValueError(f"degenerate bounds {self.bounds}")
        if self.integration not in ("erf", "midpoint"):
            raise ValueError("integration must be 'erf' or 'midpoint'")

    @property
    def shape(self) -> tuple[int, int]:
        """(rows, cols) = (n_pers, n_birth) of the row-major pixel grid."""
        return self.resolution[1], self.resolution[0]

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        b0, b1, p0, p1 = self.bounds
        return (np.linspace(b0, b1, self.resolution[0] + 1),
                np.linspace(p0, p1, self.resolution[1] + 1))


def _axis_mass(edges: np.ndarray, centers: np.ndarray, sigma: float, midpoint: bool) -> np.ndarray:
    # (n_points, n_pixels) Gaussian mass per pixel along one axis
    if midpoint:
        mids = 0.5 * (edges[:-1] + edges[1:])
        width = np.diff(edges)
        z = (mids[None, :] - centers[:, None]) / sigma
        return np.exp(-0.5 * z * z) / (sigma * math.sqrt(2 * math.pi)) * width[None, :]
    cdf = ndtr((edges[None, :] - centers[:, None]) / sigma)
    return np.diff(cdf, axis=1)


def persistence_image(d: PersistenceDiagram, p: ImageParams) -> np.ndarray:
    """Row-major flattened image; rows index persistence, columns index birth."""
    rows, cols = p.shape
    if len(d) == 0:
        return np.zeros(rows * cols)
    be, pe = p.edges()
    births = d.births
    pers = d.deaths - d.births
    weight = d.multiplicities * pers ** p.weight_exponent
    mid = p.integration == "midpoint"
    mx = _axis_mass(be, births, p.sigma, mid)
    my = _axis_mass(pe, pers, p.sigma, mid)
    img = np.einsum("n,ni,nj->ij", weight, my, mx)
    return img.ravel()


def round_to_power_of_ten(x: float) -> float:
    return 10.0 ** round(math.log10(x))


def image_params_for(diagrams: Sequence[PersistenceDiagram], n_prime: int = 100, m: int = 1,
                     weight_exponent: int = 1, max_pixels: int = 10**6) -> ImageParams:
    """Dataset-wide image parameters.

    The enclosing birth-persistence rectangle's shortest side divided by
    ``n_prime`` and rounded to the nearest power of ten gives the pixel size;
    ``sigma = pixel_size / m``.
    """
    pts = [(b, e - b) for d in diagrams for b, e, _ in d]
    if not pts:
        return ImageParams(weight_exponent=weight_exponent)
    arr = np.array(pts)
    b0, p0 = arr.min(axis=0)
    b1, p1 = arr.max(axis=0)
    p0 = 0.0
    side_b = max(b1 - b0, 1e-12)
    side_p = max(p1 - p0, 1e-12)
    pixel = round_to_power_of_ten(min(side_b, side_p) / n_prime)
    nb = max(1, math.ceil(side_b / pixel))
    npers = max(1, math.ceil(side_p / pixel))
    if nb * npers > max_pixels:
        raise ValueError(f"image would have {nb * npers} pixels; lower n_prime or raise max_pixels")
    bounds = (b0, b0 + nb * pixel, p0, p0 + npers * pixel)
    return ImageParams((nb, npers), pixel / m, weight_exponent, bounds)


@dataclass(frozen=True)
class LandscapeParams:
    k_max: int = 5
    grid: tuple[float, ...] = tuple(np.linspace(0.0, 1.0, 100))

    def __post_init__(self):
        g = tuple(float(t) for t in self.grid)
        object.__setattr__(self, "grid", g)
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if len(g) < 1 or np.any(np.diff(g) <= 0):
            raise ValueError("landscape grid must be strictly increasing")


def landscape_grid_for(diagrams: Sequence[PersistenceDiagram], n: int = 100) -> tuple[float, ...]:
    """Common abscissae spanning all births and deaths of a dataset."""
    lo = min((d.births.min() for d in diagrams if len(d)), default=0.0)
    hi = max((d.deaths.max() for d in diagrams if len(d)), default=1.0)
    if hi <= lo:
        hi = lo + 1.0
    return tuple(np.linspace(lo, hi, n))


def persistence_landscape(d: PersistenceDiagram, p: LandscapeParams) -> np.ndarray:
    """``(k_max, len(grid))`` matrix of the first landscapes."""
    t = np.asarray(p.grid)
    out = np.zeros((p.k_max, len(t)))
    atoms = d.atoms()
    if len(atoms) == 0:
        return out
    tents = np.maximum(0.0, np.minimum(t[None, :] - atoms[:, :1], atoms[:, 1:] - t[None, :]))
    tents = -np.sort(-tents, axis=0)
    k = min(p.k_max, len(atoms))
    out[:k] = tents[:k]
    return out


@dataclass(frozen=True)
class SwParams:
    m: int = 100
    sigma: float = 1.0

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be >= 1")
        if not self.sigma > 0:
            raise ValueError("sigma must be > 0")


def _diag_proj(a: np.ndarray) -> np.ndarray:
    mid = 0.5 * (a[:, 0] + a[:, 1])
    return np.column_stack([mid, mid])


def sliced_wasserstein_distance(d1: PersistenceDiagram, d2: PersistenceDiagram,
                                p: SwParams = SwParams()) -> float:
    """Sliced Wasserstein distance averaged over ``m`` evenly spaced directions in [-pi/2, pi/2)."""
    a, b = d1.atoms(), d2.atoms()
    if len(a) + len(b) == 0:
        return 0.0
    x = np.vstack([a, _diag_proj(b)])
    y = np.vstack([b, _diag_proj(a)])
    ang = -math.pi / 2 + math.pi * np.arange(p.m) / p.m
    dirs = np.stack([np.cos(ang), np.sin(ang)])
    px = np.sort(x @ dirs, axis=0)
    py = np.sort(y @ dirs, axis=0)
    return float(np.abs(px - py).sum(axis=0).mean())


def sw_kernel(d1: PersistenceDiagram, d2: PersistenceDiagram, p: SwParams = SwParams()) -> float:
    return math.exp(-sliced_wasserstein_distance(d1, d2, p) / (2 * p.sigma ** 2))


def sw_gram(diagrams: Sequence[PersistenceDiagram], p: SwParams = SwParams(),
            distances: np.ndarray | None = None) -> np.ndarray:
    """Kernel Gram matrix; pass precomputed ``distances`` to reuse them across sigmas."""
    n = len(diagrams)
    if distances is None:
        distances = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                distances[i, j] = distances[j, i] = sliced_wasserstein_distance(
                    diagrams[i], diagrams[j], p)
    return np.exp(-distances / (2 * p.sigma ** 2))
