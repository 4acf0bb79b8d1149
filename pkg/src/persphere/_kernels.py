"""Compiled inner loops shared by sphere and zonoid evaluation."""
import os
from concurrent.futures import ThreadPoolExecutor

import numba
import numpy as np


_TILE = 1024  # points per tile; keeps a tile of vecs in L1


@numba.njit(nogil=True, cache=True)
def _relu_sum(dirs, vecs, coef, out):
    # out[i] = sum_p coef[p] * max(0, <dirs[i], vecs[p]>), p in storage order.
    # Tiling over p keeps each out[i] a left-to-right sum, so results match
    # the untiled loop bit for bit.
    n = dirs.shape[0]
    m = vecs.shape[0]
    for i in range(n):
        out[i] = 0.0
    for lo in range(0, m, _TILE):
        hi = min(lo + _TILE, m)
        for i in range(n):
            v0 = dirs[i, 0]
            v1 = dirs[i, 1]
            v2 = dirs[i, 2]
            s = out[i]
            for p in range(lo, hi):
                ip = v0 * vecs[p, 0] + v1 * vecs[p, 1] + v2 * vecs[p, 2]
                if ip > 0.0:
                    s += coef[p] * ip
            out[i] = s


def default_workers() -> int:
    env = os.environ.get("PERSPHERE_WORKERS")
    if env:
        n = int(env)
        if n < 1:
            raise ValueError("PERSPHERE_WORKERS must be >= 1")
        return n
    return 1


def relu_sum(dirs: np.ndarray, vecs: np.ndarray, coef: np.ndarray, workers: int | None = None) -> np.ndarray:
    """Evaluate ``sum_p coef[p] * relu(<v, vecs[p]>)`` for every row ``v`` of ``dirs``.

    Work is split across threads by contiguous blocks of directions. Each
    output entry is computed by the same sequential loop over ``vecs``, so
    the result does not depend on ``workers``.
    """
    dirs = np.ascontiguousarray(dirs, dtype=np.float64).reshape(-1, 3)
    vecs = np.ascontiguousarray(vecs, dtype=np.float64).reshape(-1, 3)
    coef = np.ascontiguousarray(coef, dtype=np.float64).reshape(-1)
    out = np.empty(len(dirs))
    workers = default_workers() if workers is None else int(workers)
    if workers < 1:
        raise ValueError("workers must be >= 1")
    if workers == 1 or len(dirs) < 2 * workers:
        _relu_sum(dirs, vecs, coef, out)
        return out
    bounds = np.linspace(0, len(dirs), workers + 1).astype(int)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_relu_sum, dirs[lo:hi], vecs, coef, out[lo:hi])
                   for lo, hi in zip(bounds[:-1], bounds[1:])]
        for f in futures:
            f.result()
    return out


@numba.njit(cache=True)
def _logistic_grad(design, onehot, p, b, c, dual):
    # dual: design is the Gram matrix and p holds sample weights (B = p @ X)
    n, k = onehot.shape
    z = design @ p.T
    r = np.empty((n, k))
    for i in range(n):
        zmax = -np.inf
        for j in range(k):
            z[i, j] += b[j]
            if z[i, j] > zmax:
                zmax = z[i, j]
        tot = 0.0
        for j in range(k):
            r[i, j] = np.exp(z[i, j] - zmax)
            tot += r[i, j]
        for j in range(k):
            r[i, j] = onehot[i, j] - r[i, j] / tot
    if dual:
        gp = r.T - p / c
    else:
        gp = r.T @ design - p / c
    gb = np.zeros(k)
    for i in range(n):
        for j in range(k):
            gb[j] += r[i, j]
    return gp, gb


@numba.njit(cache=True)
def _metric_inner(a, bvec, design, dual):
    if dual:
        return np.sum((a @ design) * bvec)
    return np.sum(a * bvec)


@numba.njit(cache=True)
def agd_logistic(design, onehot, c, step, tol, max_iter, dual):
    """Accelerated gradient ascent with restart; returns (p, b, n_iter, converged)."""
    n, k = onehot.shape
    width = design.shape[1]
    p = np.zeros((k, width))
    b = np.zeros(k)
    yp = p.copy()
    yb = b.copy()
    t = 1.0
    it = 0
    for it in range(1, max_iter + 1):
        gp, gb = _logistic_grad(design, onehot, yp, yb, c, dual)
        p_new = yp + step * gp
        b_new = yb + step * gb
        # restart momentum when the step opposes the ascent direction
        inner = _metric_inner(gp, p_new - p, design, dual) + np.sum(gb * (b_new - b))
        if inner < 0:
            t = 1.0
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        mom = (t - 1.0) / t_new
        yp = p_new + mom * (p_new - p)
        yb = b_new + mom * (b_new - b)
        p = p_new
        b = b_new
        t = t_new
        if it % 10 == 0 or it == max_iter:
            gp, gb = _logistic_grad(design, onehot, p, b, c, dual)
            gnorm = np.sqrt(_metric_inner(gp, gp, design, dual) + np.sum(gb * gb))
            if gnorm <= tol:
                return p, b, it, True
    return p, b, it, False
