"""Persistence spheres sampled on equiangular grids over the unit sphere in R^3."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import relu_sum
from .diagram import PersistenceDiagram
from .weighting import Weighting, as_weight_fn

__all__ = [
    "SphereGrid",
    "SphereField",
    "make_grid",
    "parse_grid_spec",
    "spherical_to_unit",
    "ps_at",
    "evaluate_ps",
    "zero_field",
    "lp_distance",
    "lp_norm",
    "to_feature_vector",
    "field_to_csv",
    "field_to_json",
    "DEFAULT_GRID",
]

DEFAULT_GRID = (200, 100)


def spherical_to_unit(theta, phi) -> np.ndarray:
    """Unit vectors ``(sin t cos f, sin t sin f, cos t)``; broadcasts."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta)], axis=-1)


@dataclass(frozen=True, eq=False)
class SphereGrid:
    """Midpoint grid; nodes are stored theta-major (index ``i * n_phi + j``)."""

    n_theta: int
    n_phi: int
    theta: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    quad_weights: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return self.n_theta * self.n_phi

    @property
    def spacing(self) -> tuple[float, float]:
        return math.pi / self.n_theta, 2 * math.pi / self.n_phi

    def node_angles(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-node (theta, phi) in storage order."""
        t, f = np.meshgrid(self.theta, self.phi, indexing="ij")
        return t.ravel(), f.ravel()

    def same_as(self, other: "SphereGrid") -> bool:
        return self.n_theta == other.n_theta and self.n_phi == other.n_phi


def make_grid(n_theta: int = DEFAULT_GRID[0], n_phi: int = DEFAULT_GRID[1]) -> SphereGrid:
    if n_theta < 2 or n_phi < 2:
        raise ValueError(f"grid sizes must be >= 2, got {n_theta}x{n_phi}")
    dt, df = math.pi / n_theta, 2 * math.pi / n_phi
    theta = (np.arange(n_theta) + 0.5) * dt
    phi = (np.arange(n_phi) + 0.5) * df
    t, f = np.meshgrid(theta, phi, indexing="ij")
    nodes = spherical_to_unit(t.ravel(), f.ravel())
    weights = np.sin(t.ravel()) * dt * df
    for a in (theta, phi, nodes, weights):
        a.setflags(write=False)
    return SphereGrid(n_theta, n_phi, theta, phi, nodes, weights)


def parse_grid_spec(spec: str) -> tuple[int, int]:
    """``"200x100"`` -> ``(200, 100)``."""
    try:
        a, b = spec.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise ValueError(f"grid must look like NxM, got {spec!r}") from None


@dataclass(frozen=True, eq=False)
class SphereField:
    grid: SphereGrid
    values: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.values) != self.grid.size:
            raise ValueError("field length does not match grid")

    def __add__(self, other: "SphereField") -> "SphereField":
        _check_same_grid(self, other)
        return SphereField(self.grid, self.values + other.values, {})

    def max(self) -> float:
        return float(self.values.max())


def _diagram_vectors(d: PersistenceDiagram, w):
    fn = as_weight_fn(w)
    vecs = np.column_stack([np.ones(len(d)), d.births, d.deaths])
    coef = fn(d.births, d.deaths) * d.multiplicities if len(d) else np.zeros(0)
    return vecs, np.asarray(coef, dtype=float)


def ps_at(d: PersistenceDiagram, w: Weighting, v) -> float:
    """Persistence sphere of ``d`` at one unit direction ``v``."""
    v = np.asarray(v, dtype=float).reshape(3)
    if abs(np.linalg.norm(v) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    fn = as_weight_fn(w)
    total = 0.0
    for b, e, c in d:
        ip = v[0] + v[1] * b + v[2] * e
        if ip > 0:
            total += float(fn(b, e)) * c * ip
    return total


def evaluate_ps(d: PersistenceDiagram, w: Weighting, grid: SphereGrid,
                workers: int | None = None) -> SphereField:
    """Persistence sphere of ``d`` at every grid node.

    Output is bitwise identical for any ``workers`` value.
    """
    vecs, coef = _diagram_vectors(d, w)
    values = relu_sum(grid.nodes, vecs, coef, workers=workers)
    prov = {"diagram": d.digest(),
            "weighting": w.params() if isinstance(w, Weighting) else getattr(w, "__name__", "custom")}
    return SphereField(grid, values, prov)


def zero_field(grid: SphereGrid) -> SphereField:
    return SphereField(grid, np.zeros(grid.size), {"diagram": "empty"})


def _check_same_grid(f: SphereField, g: SphereField):
    if not f.grid.same_as(g.grid):
        raise ValueError(
            f"fields live on different grids: {f.grid.n_theta}x{f.grid.n_phi} "
            f"vs {g.grid.n_theta}x{g.grid.n_phi}")


def lp_distance(f: SphereField, g: SphereField, p: float = 2.0) -> float:
    """Quadrature L_p distance; ``p=inf`` gives the max over grid nodes."""
    _check_same_grid(f, g)
    diff = np.abs(f.values - g.values)
    if math.isinf(p):
        return float(diff.max())
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(np.sum(f.grid.quad_weights * diff ** p) ** (1.0 / p))


def lp_norm(f: SphereField, p: float = 2.0) -> float:
    return lp_distance(f, zero_field(f.grid), p)


def to_feature_vector(f: SphereField, quadrature_scaled: bool = True) -> np.ndarray:
    """Flatten a field; scaled entries are ``value * sqrt(area weight)``."""
    if quadrature_scaled:
        return f.values * np.sqrt(f.grid.quad_weights)
    return f.values.copy()


def field_to_csv(f: SphereField, quadrature_scaled: bool = False, header: dict | None = None) -> str:
    buf = io.StringIO()
    for key, val in (header or {}).items():
        buf.write(f"# {key}: {json.dumps(val)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["theta", "phi", "value"])
    t, ph = f.grid.node_angles()
    vals = to_feature_vector(f, quadrature_scaled)
    for row in zip(t, ph, vals):
        writer.writerow([repr(float(x)) for x in row])
    return buf.getvalue()


def field_to_json(f: SphereField, quadrature_scaled: bool = False, header: dict | None = None) -> str:
    doc = {
        "grid": {"n_theta": f.grid.n_theta, "n_phi": f.grid.n_phi, "order": "theta-major",
                 "theta": "midpoints of (0, pi)", "phi": "midpoints of [0, 2pi)"},
        "provenance": f.provenance,
        "quadrature_scaled": quadrature_scaled,
        "values": to_feature_vector(f, quadrature_scaled).tolist(),
    }
    if header:
        doc["parameters"] = header
    return json.dumps(doc)
