"""Persistence diagrams as finite discrete measures and their 1-Wasserstein distance."""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

__all__ = [
    "DiagramPoint",
    "PersistenceDiagram",
    "PartialMatching",
    "make_diagram",
    "total_persistence",
    "diagonal_distance",
    "w1_distance",
    "w1_matching",
    "w1_bruteforce",
    "perturb",
    "BRUTEFORCE_MAX_ATOMS",
]

BRUTEFORCE_MAX_ATOMS = 6


class DiagramPoint(NamedTuple):
    birth: float
    death: float
    multiplicity: int = 1


@dataclass(frozen=True)
class PersistenceDiagram:
    """Finite measure sum_p c_p delta_p supported strictly above the diagonal.

    Build through :func:`make_diagram`, which validates, merges duplicates and
    sorts points lexicographically by (birth, death).
    """

    points: tuple[DiagramPoint, ...] = ()
    _arr: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        arr = np.array([(p.birth, p.death, p.multiplicity) for p in self.points],
                       dtype=float).reshape(-1, 3)
        arr.setflags(write=False)
        object.__setattr__(self, "_arr", arr)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __add__(self, other: "PersistenceDiagram") -> "PersistenceDiagram":
        # sum of measures (disjoint union of multisets)
        return make_diagram(list(self.points) + list(other.points))

    @property
    def births(self) -> np.ndarray:
        return self._arr[:, 0]

    @property
    def deaths(self) -> np.ndarray:
        return self._arr[:, 1]

    @property
    def multiplicities(self) -> np.ndarray:
        return self._arr[:, 2]

    @property
    def n_atoms(self) -> int:
        return int(sum(p.multiplicity for p in self.points))

    def as_array(self) -> np.ndarray:
        """(n, 3) read-only array of birth, death, multiplicity."""
        return self._arr

    def atoms(self) -> np.ndarray:
        """(n_atoms, 2) array with every point repeated by its multiplicity."""
        reps = self.multiplicities.astype(int)
        return np.repeat(self._arr[:, :2], reps, axis=0)

    def digest(self) -> str:
        return hashlib.sha256(np.ascontiguousarray(self._arr).tobytes()).hexdigest()[:16]


@dataclass(frozen=True)
class PartialMatching:
    """Atom-level partial matching; indices refer to ``PersistenceDiagram.atoms()``."""

    matched: tuple[tuple[int, int, int], ...]
    cost: float


def make_diagram(raw: Iterable[Sequence[float]] | PersistenceDiagram) -> PersistenceDiagram:
    """Validate ``(birth, death[, multiplicity])`` entries and canonicalize.

    Raises
    ------
    ValueError
        On non-finite coordinates, ``birth >= death`` or multiplicity < 1.
    """
    if isinstance(raw, PersistenceDiagram):
        return raw
    merged: dict[tuple[float, float], int] = {}
    for i, entry in enumerate(raw):
        entry = tuple(entry)
        if len(entry) == 2:
            b, d = entry
            m = 1
        elif len(entry) == 3:
            b, d, m = entry
        else:
            raise ValueError(f"entry {i}: expected (birth, death[, multiplicity]), got {entry!r}")
        b, d = float(b), float(d)
        if not (math.isfinite(b) and math.isfinite(d)):
            raise ValueError(f"entry {i}: non-finite coordinate ({b}, {d})")
        if b >= d:
            raise ValueError(f"entry {i}: birth >= death ({b} >= {d})")
        if float(m) != int(m) or int(m) < 1:
            raise ValueError(f"entry {i}: multiplicity must be a positive integer, got {m}")
        key = (b, d)
        merged[key] = merged.get(key, 0) + int(m)
    pts = tuple(DiagramPoint(b, d, m) for (b, d), m in sorted(merged.items()))
    return PersistenceDiagram(pts)


def total_persistence(d: PersistenceDiagram) -> float:
    """Half the multiplicity-weighted sum of lifetimes."""
    return float(0.5 * np.sum(d.multiplicities * (d.deaths - d.births)))


def diagonal_distance(p: DiagramPoint | Sequence[float]) -> float:
    """l-infinity distance from ``p`` to the diagonal, ``(death - birth) / 2``."""
    return (float(p[1]) - float(p[0])) / 2.0


def _assignment(a: np.ndarray, b: np.ndarray):
    """Square assignment problem with diagonal slots; returns (rows, cols, cost matrix)."""
    n, m = len(a), len(b)
    size = n + m
    cost = np.zeros((size, size))
    if n and m:
        cost[:n, :m] = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)
    if n:
        cost[:n, m:] = ((a[:, 1] - a[:, 0]) / 2.0)[:, None]
    if m:
        cost[n:, :m] = ((b[:, 1] - b[:, 0]) / 2.0)[None, :]
    rows, cols = linear_sum_assignment(cost)
    return rows, cols, cost


def w1_matching(d1: PersistenceDiagram, d2: PersistenceDiagram) -> PartialMatching:
    """Optimal partial matching between the unit atoms of two diagrams."""
    a, b = d1.atoms(), d2.atoms()
    if len(a) + len(b) == 0:
        return PartialMatching((), 0.0)
    rows, cols, cost = _assignment(a, b)
    n, m = len(a), len(b)
    matched = tuple((int(r), int(c), 1) for r, c in zip(rows, cols) if r < n and c < m)
    # fsum: exact rounding makes the value independent of argument order
    return PartialMatching(matched, math.fsum(cost[rows, cols]))


def w1_distance(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Exact 1-Wasserstein distance with l-infinity ground cost."""
    return w1_matching(d1, d2).cost


def w1_bruteforce(d1: PersistenceDiagram, d2: PersistenceDiagram) -> float:
    """Exhaustive minimum over all partial matchings of atoms (small inputs only)."""
    a, b = d1.atoms(), d2.atoms()
    if len(a) > BRUTEFORCE_MAX_ATOMS or len(b) > BRUTEFORCE_MAX_ATOMS:
        raise ValueError(
            f"w1_bruteforce supports at most {BRUTEFORCE_MAX_ATOMS} atoms per side, "
            f"got {len(a)} and {len(b)}")
    diag_a = [(y - x) / 2.0 for x, y in a]
    diag_b = [(y - x) / 2.0 for x, y in b]
    pair = [[max(abs(p[0] - q[0]), abs(p[1] - q[1])) for q in b] for p in a]
    best = math.inf

    def recurse(i: int, used: int, acc: list):
        nonlocal best
        if i == len(a):
            rest = [diag_b[j] for j in range(len(b)) if not used >> j & 1]
            best = min(best, math.fsum(acc + rest))
            return
        recurse(i + 1, used, acc + [diag_a[i]])
        for j in range(len(b)):
            if not used >> j & 1:
                recurse(i + 1, used | (1 << j), acc + [pair[i][j]])

    recurse(0, 0, [])
    return float(best)


def perturb(d: PersistenceDiagram, scale: float, seed: int) -> PersistenceDiagram:
    """Displace every point by a uniform offset in ``[-scale, scale]^2``.

    Points landing on or below the diagonal are dropped.
    """
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    if scale == 0 or len(d) == 0:
        return d
    rng = np.random.default_rng(seed)
    off = rng.uniform(-scale, scale, size=(len(d), 2))
    arr = d.as_array()
    b = arr[:, 0] + off[:, 0]
    e = arr[:, 1] + off[:, 1]
    keep = b < e
    return make_diagram(zip(b[keep], e[keep], arr[keep, 2].astype(int)))
