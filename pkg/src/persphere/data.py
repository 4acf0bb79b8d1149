"""Diagram I/O, sublevel-set persistence of sampled functions and synthetic generators."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .diagram import PersistenceDiagram, make_diagram, perturb

__all__ = [
    "DiagramFormatError",
    "LabeledDataset",
    "sublevel_pd0",
    "count_local_minima",
    "parse_diagram",
    "serialize_diagram",
    "read_diagram",
    "write_diagram",
    "read_manifest",
    "write_manifest",
    "gen_two_class_functions",
    "gen_diagram_cloud",
    "random_diagram",
]


class DiagramFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class LabeledDataset:
    items: tuple[tuple[PersistenceDiagram, object], ...]
    split_seed: int = 0

    def __post_init__(self):
        if not self.items:
            raise ValueError("dataset must be nonempty")

    @property
    def diagrams(self) -> list[PersistenceDiagram]:
        return [d for d, _ in self.items]

    @property
    def targets(self) -> list:
        return [t for _, t in self.items]


def _order(values: np.ndarray) -> np.ndarray:
    # ascending value, ties by ascending index
    return np.lexsort((np.arange(len(values)), values))


def sublevel_pd0(values: Sequence[float]) -> PersistenceDiagram:
    """0-dimensional sublevel-set persistence of a sampled function on a path graph.

    Components merge by the elder rule. The component of the global minimum
    is paired with the global maximum; zero-persistence pairs are dropped.
    """
    f = np.asarray(values, dtype=float)
    if f.ndim != 1 or len(f) < 2:
        raise ValueError("need at least 2 samples")
    if not np.all(np.isfinite(f)):
        raise ValueError("samples must be finite")
    n = len(f)
    rank = np.empty(n, dtype=int)
    order = _order(f)
    rank[order] = np.arange(n)
    parent = np.full(n, -1)

    def find(i):
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    pairs = []
    for i in order:
        parent[i] = i
        for j in (i - 1, i + 1):
            if 0 <= j < n and parent[j] != -1:
                ri, rj = find(i), find(j)
                if ri == rj:
                    continue
                # roots are component minima; the younger one (higher rank) dies
                young, old = (ri, rj) if rank[ri] > rank[rj] else (rj, ri)
                if f[young] < f[i]:
                    pairs.append((f[young], f[i]))
                parent[young] = old
    gmin, gmax = f[order[0]], f[order[-1]]
    if gmin < gmax:
        pairs.append((gmin, gmax))
    return make_diagram(pairs)


def count_local_minima(values: Sequence[float]) -> int:
    """Strict local minima under the (value, index) total order, endpoints included."""
    f = np.asarray(values, dtype=float)
    n = len(f)
    rank = np.empty(n, dtype=int)
    rank[_order(f)] = np.arange(n)
    count = 0
    for i in range(n):
        left = i == 0 or rank[i - 1] > rank[i]
        right = i == n - 1 or rank[i + 1] > rank[i]
        count += left and right
    return count


def _parse_csv(text: str) -> PersistenceDiagram:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if not row or all(not c.strip() for c in row) or row[0].lstrip().startswith("#"):
            continue
        if len(row) not in (2, 3):
            raise DiagramFormatError(f"expected 2 or 3 columns, got {len(row)}", lineno)
        try:
            b, d = float(row[0]), float(row[1])
        except ValueError:
            if not rows and row[0].strip().lower() == "birth":
                continue  # header
            raise DiagramFormatError(f"non-numeric field in {row!r}", lineno) from None
        m = 1
        if len(row) == 3:
            try:
                mf = float(row[2])
            except ValueError:
                raise DiagramFormatError(f"non-numeric multiplicity {row[2]!r}", lineno) from None
            if mf != int(mf) or mf < 1:
                raise DiagramFormatError(f"multiplicity must be a positive integer, got {row[2]!r}", lineno)
            m = int(mf)
        if not (math.isfinite(b) and math.isfinite(d)):
            raise DiagramFormatError("non-finite coordinate", lineno)
        if b >= d:
            raise DiagramFormatError(f"birth >= death ({b} >= {d})", lineno)
        rows.append((b, d, m))
    return make_diagram(rows)


def _parse_json(text: str) -> PersistenceDiagram:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramFormatError(exc.msg, exc.lineno) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("points"), list):
        raise DiagramFormatError('expected an object with a "points" list')
    rows = []
    for i, pt in enumerate(doc["points"]):
        try:
            b, d = float(pt["birth"]), float(pt["death"])
            m = pt.get("mult", 1)
        except (KeyError, TypeError, ValueError):
            raise DiagramFormatError(f"point {i}: malformed entry {pt!r}") from None
        if not (math.isfinite(b) and math.isfinite(d)) or b >= d:
            raise DiagramFormatError(f"point {i}: invalid coordinates ({b}, {d})")
        if not isinstance(m, int) or m < 1:
            raise DiagramFormatError(f"point {i}: multiplicity must be a positive integer")
        rows.append((b, d, m))
    return make_diagram(rows)


def parse_diagram(text: str, format: str = "csv") -> PersistenceDiagram:
    if format == "csv":
        return _parse_csv(text)
    if format == "json":
        return _parse_json(text)
    raise ValueError(f"unknown diagram format {format!r}")


def serialize_diagram(d: PersistenceDiagram, format: str = "csv") -> str:
    if format == "csv":
        return "".join(f"{b!r},{e!r},{m}\n" for b, e, m in d)
    if format == "json":
        return json.dumps({"points": [{"birth": b, "death": e, "mult": m} for b, e, m in d]})
    raise ValueError(f"unknown diagram format {format!r}")


def _format_of(path: Path) -> str:
    return "json" if path.suffix.lower() == ".json" else "csv"


def read_diagram(path) -> PersistenceDiagram:
    path = Path(path)
    return parse_diagram(path.read_text(encoding="utf-8"), _format_of(path))


def write_diagram(path, d: PersistenceDiagram) -> None:
    path = Path(path)
    path.write_text(serialize_diagram(d, _format_of(path)), encoding="utf-8")


def read_manifest(path) -> LabeledDataset:
    """Dataset manifest: JSON list of ``{"diagram": file, "target": value}``.

    Relative diagram paths resolve against the manifest's directory.
    """
    path = Path(path)
    entries = json.loads(path.read_text(encoding="utf-8"))
    items = []
    for entry in entries:
        dpath = Path(entry["diagram"])
        if not dpath.is_absolute():
            dpath = path.parent / dpath
        items.append((read_diagram(dpath), entry["target"]))
    return LabeledDataset(tuple(items))


def write_manifest(path, entries: Sequence[tuple[str, object]]) -> None:
    doc = [{"diagram": str(p), "target": t} for p, t in entries]
    Path(path).write_text(json.dumps(doc, indent=1), encoding="utf-8")


def _bumps(x, centers, heights, width):
    return np.sum(heights[:, None] * np.exp(-0.5 * ((x[None, :] - centers[:, None]) / width) ** 2), axis=0)


def gen_two_class_functions(n_per_class: int, noise: float = 0.0, seed: int = 0,
                            n_samples: int = 100) -> list[tuple[np.ndarray, int]]:
    """Labeled sampled functions: class 0 has 2 Gaussian bumps, class 1 has 4.

    Bump centers and heights are jittered; Gaussian noise with standard
    deviation ``noise`` is added. Items alternate between classes.
    """
    rng = np.random.default_rng(seed)
    x = np.linspace(0.0, 1.0, n_samples)
    width = 0.04
    layouts = {0: np.array([1 / 3, 2 / 3]), 1: np.array([0.2, 0.4, 0.6, 0.8])}
    out = []
    for _ in range(n_per_class):
        for label, base in layouts.items():
            centers = base + rng.uniform(-0.02, 0.02, len(base))
            heights = rng.uniform(0.8, 1.2, len(base))
            f = _bumps(x, centers, heights, width)
            if noise > 0:
                f = f + rng.normal(0.0, noise, n_samples)
            out.append((f, label))
    return out


def gen_diagram_cloud(template: PersistenceDiagram, n: int, jitter: float,
                      seed: int = 0) -> list[PersistenceDiagram]:
    seeds = np.random.SeedSequence(seed).generate_state(n, dtype=np.uint64)
    return [perturb(template, jitter, int(s)) for s in seeds]


def random_diagram(rng: np.random.Generator, max_points: int = 10, low: float = 0.0,
                   high: float = 10.0, min_points: int = 0) -> PersistenceDiagram:
    """Uniform points in ``[low, high]^2`` above the diagonal, multiplicity 1."""
    n = int(rng.integers(min_points, max_points + 1))
    pts = []
    while len(pts) < n:
        a, b = rng.uniform(low, high, 2)
        if a != b:
            pts.append((min(a, b), max(a, b)))
    return make_diagram(pts)
