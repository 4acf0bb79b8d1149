"""Penalized linear models and k-fold cross-validation."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from ._kernels import agd_logistic

__all__ = [
    "RidgeModel",
    "LogisticModel",
    "CvReport",
    "ridge_fit",
    "logistic_fit",
    "logistic_objective",
    "kfold_cv",
    "fold_indices",
    "train_test_split",
    "score",
    "RIDGE_ALPHA_GRID",
    "LOGISTIC_C_GRID",
]

RIDGE_ALPHA_GRID = (1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 0.1, 1.0, 10.0, 100.0)
LOGISTIC_C_GRID = (1.0, 10.0, 100.0, 1000.0, 10000.0)


def _check_xy(x, y):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    if x.ndim != 2:
        raise ValueError("features must be a 2-D matrix")
    if len(x) != len(y):
        raise ValueError(f"{len(x)} feature rows but {len(y)} targets")
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain non-finite values")
    return x


@dataclass(frozen=True, eq=False)
class RidgeModel:
    coefficients: np.ndarray
    intercept: float
    alpha: float

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        return x @ self.coefficients + self.intercept


def ridge_fit(features, targets, alpha: float) -> RidgeModel:
    """Minimize ``||X b + b0 - y||^2 + alpha ||b||^2`` with an unpenalized intercept.

    Solves the normal equations by Cholesky, in the (d x d) primal form when
    there are at least as many samples as features and in the equivalent
    (n x n) dual form otherwise.
    """
    y = np.asarray(targets, dtype=float)
    x = _check_xy(features, y)
    if len(y) < 2:
        raise ValueError("need at least 2 samples")
    if not np.all(np.isfinite(y)):
        raise ValueError("targets contain non-finite values")
    if not alpha > 0:
        raise ValueError("alpha must be > 0")
    xm, ym = x.mean(axis=0), y.mean()
    xc, yc = x - xm, y - ym
    n, dim = xc.shape
    if dim <= n:
        a = xc.T @ xc
        a[np.diag_indices_from(a)] += alpha
        beta = cho_solve(cho_factor(a), xc.T @ yc)
    else:
        k = xc @ xc.T
        k[np.diag_indices_from(k)] += alpha
        beta = xc.T @ cho_solve(cho_factor(k), yc)
    return RidgeModel(beta, float(ym - xm @ beta), float(alpha))


@dataclass(frozen=True, eq=False)
class LogisticModel:
    classes: np.ndarray
    coefficients: np.ndarray  # (n_classes, n_features)
    intercepts: np.ndarray  # (n_classes,)
    c: float
    n_iter: int = 0
    converged: bool = True

    def decision_function(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x @ self.coefficients.T + self.intercepts

    def predict_proba(self, x) -> np.ndarray:
        return _softmax(self.decision_function(x))

    def predict(self, x) -> np.ndarray:
        return self.classes[np.argmax(self.decision_function(x), axis=1)]


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def logistic_objective(x, onehot, coefficients, intercepts, c) -> tuple[float, np.ndarray, np.ndarray]:
    """Penalized multinomial log-likelihood and its gradient (to be maximized)."""
    z = x @ coefficients.T + intercepts
    zmax = z.max(axis=1, keepdims=True)
    logp = z - zmax - np.log(np.exp(z - zmax).sum(axis=1, keepdims=True))
    val = float(np.sum(onehot * logp) - np.sum(coefficients ** 2) / (2 * c))
    r = onehot - np.exp(logp)
    return val, r.T @ x - coefficients / c, r.sum(axis=0)


def logistic_fit(features, labels, c: float, tol: float = 1e-8, max_iter: int = 100_000) -> LogisticModel:
    """Multinomial logistic regression with penalty ``||B||^2 / (2c)``.

    Deterministic full-batch accelerated gradient ascent with the fixed step
    ``1/L`` (``L`` bounds the Hessian) and gradient-based momentum restart,
    stopped once the gradient norm drops below ``tol``.

    Gradient steps keep the coefficients in the row space of ``X``, so when
    samples are fewer than features the iteration runs on ``B = A X`` with
    ``A`` of shape (n_classes, n_samples); the iterates are unchanged.
    """
    labels = np.asarray(labels)
    x = _check_xy(features, labels)
    if not c > 0:
        raise ValueError("c must be > 0")
    classes, y_idx = np.unique(labels, return_inverse=True)
    if len(classes) < 2:
        raise ValueError("need at least 2 classes")
    if np.min(np.bincount(y_idx)) < 2:
        raise ValueError("need at least 2 samples per class")
    n, dim = x.shape
    k = len(classes)
    onehot = np.eye(k)[y_idx]

    dual = n < dim
    if dual:
        gram = x @ x.T
        lmax = np.linalg.eigvalsh(gram + 1.0)[-1]
    else:
        lmax = np.linalg.eigvalsh(x.T @ x)[-1] + n
    step = 1.0 / (0.5 * lmax + 1.0 / c)

    design = np.ascontiguousarray(gram if dual else x)
    p, b, it, converged = agd_logistic(design, onehot, float(c), float(step), float(tol),
                                       int(max_iter), dual)
    coef = p @ x if dual else p
    return LogisticModel(classes, coef, b, float(c), int(it), bool(converged))


@dataclass
class CvReport:
    grid: list
    mean_scores: list[float]
    fold_scores: list[list[float]]
    chosen: object
    folds: int
    seed: int
    task: str = "regression"
    extra: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "mean_scores": self.mean_scores,
            "fold_scores": self.fold_scores,
            "chosen": self.chosen,
            "folds": self.folds,
            "seed": self.seed,
            "task": self.task,
        }


def fold_indices(n: int, folds: int, seed: int) -> list[np.ndarray]:
    if folds < 2:
        raise ValueError("folds must be >= 2")
    if folds > n:
        raise ValueError(f"{folds} folds but only {n} samples")
    perm = np.random.default_rng(seed).permutation(n)
    return [np.sort(part) for part in np.array_split(perm, folds)]


def train_test_split(n: int, test_fraction: float, seed: int, stratify=None):
    """Deterministic index split; stratified per label when ``stratify`` is given."""
    rng = np.random.default_rng(seed)
    if stratify is None:
        perm = rng.permutation(n)
        n_test = int(round(test_fraction * n))
        return np.sort(perm[n_test:]), np.sort(perm[:n_test])
    labels = np.asarray(stratify)
    train, test = [], []
    for lab in np.unique(labels):
        idx = rng.permutation(np.flatnonzero(labels == lab))
        n_test = int(round(test_fraction * len(idx)))
        test.extend(idx[:n_test])
        train.extend(idx[n_test:])
    return np.sort(np.array(train, dtype=int)), np.sort(np.array(test, dtype=int))


def score(predictions, targets, task: str) -> float:
    """R^2 for regression (nan when targets have zero variance), accuracy otherwise."""
    pred = np.asarray(predictions)
    targ = np.asarray(targets)
    if len(pred) != len(targ):
        raise ValueError("predictions and targets differ in length")
    if len(pred) == 0:
        raise ValueError("empty input")
    if task == "classification":
        return float(np.mean(pred == targ))
    if task != "regression":
        raise ValueError(f"unknown task {task!r}")
    pred = pred.astype(float)
    targ = targ.astype(float)
    ss_tot = float(np.sum((targ - targ.mean()) ** 2))
    if ss_tot == 0:
        return math.nan
    return 1.0 - float(np.sum((targ - pred) ** 2)) / ss_tot


def _fit_predict(task, xtr, ytr, xte, hyper):
    if task == "regression":
        return ridge_fit(xtr, ytr, hyper).predict(xte)
    return logistic_fit(xtr, ytr, hyper).predict(xte)


def kfold_cv(features, targets, folds: int = 3, hyper_grid: Sequence[float] | None = None,
             task: str = "regression", seed: int = 0) -> CvReport:
    """Grid search by k-fold CV; ridge ``alpha`` for regression, logistic ``C`` otherwise.

    Ties in mean score go to the stronger penalty (larger alpha, smaller C).
    """
    targets = np.asarray(targets)
    x = _check_xy(features, targets)
    if task not in ("regression", "classification"):
        raise ValueError(f"unknown task {task!r}")
    if hyper_grid is None:
        hyper_grid = RIDGE_ALPHA_GRID if task == "regression" else LOGISTIC_C_GRID
    grid = [float(h) for h in hyper_grid]
    if not grid:
        raise ValueError("empty hyperparameter grid")
    parts = fold_indices(len(targets), folds, seed)
    fold_scores = []
    for h in grid:
        per = []
        for test_idx in parts:
            train_idx = np.setdiff1d(np.arange(len(targets)), test_idx)
            pred = _fit_predict(task, x[train_idx], targets[train_idx], x[test_idx], h)
            per.append(score(pred, targets[test_idx], task))
        fold_scores.append(per)
    means = [float(np.mean(s)) for s in fold_scores]
    strength = (lambda h: h) if task == "regression" else (lambda h: -h)
    key = [(-math.inf if math.isnan(m) else m, strength(h)) for m, h in zip(means, grid)]
    chosen = grid[max(range(len(grid)), key=lambda i: key[i])]
    return CvReport(grid, means, fold_scores, chosen, folds, seed, task)
