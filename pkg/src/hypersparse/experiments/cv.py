"""Transductive K-fold cross-validation over a lambda grid."""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..admm import AdmmConfig
from ..hypergraph import Hypergraph
from ..learners import DEFAULT_GRID, lambda_path
from ..models import ModelKind
from .simulation import make_rng

# Looser than the library default: CV only needs RMSE to ~1e-4.
EXPERIMENT_SOLVER = AdmmConfig(rho=1.0, tol_abs=1e-6, tol_rel=1e-4, max_iter=3000,
                               over_relaxation=1.6)


@dataclass
class CvSpec:
    folds: int = 10
    grid: tuple = DEFAULT_GRID
    repeats: int = 10
    seed: int = 0
    solver: AdmmConfig = field(default_factory=lambda: EXPERIMENT_SOLVER)
    pin_unlabeled: bool = False

    def __post_init__(self):
        if self.folds < 2:
            raise ValueError("need at least 2 folds")
        if not len(self.grid):
            raise ValueError("lambda grid is empty")
        if self.repeats < 1:
            raise ValueError("need at least one repeat")
        self.grid = tuple(float(g) for g in self.grid)


@dataclass
class CvResult:
    model: ModelKind
    grid: tuple
    rows: list                  # (model, lambda, fold, repeat, rmse)
    rmse: np.ndarray            # repeats x grid, mean over folds
    errors: int = 0

    @property
    def mean_rmse(self) -> np.ndarray:
        return np.nanmean(self.rmse, axis=0)

    @property
    def best_index(self) -> int:
        return int(np.nanargmin(self.mean_rmse))

    @property
    def best_lambda(self) -> float:
        return self.grid[self.best_index]

    @property
    def best_rmse(self) -> float:
        return float(self.mean_rmse[self.best_index])

    @property
    def best_std(self) -> float:
        return float(np.nanstd(self.rmse[:, self.best_index]))

    def summary(self) -> dict:
        return {"model": self.model.value,
                "mean_rmse": {repr(l): float(r) for l, r in zip(self.grid, self.mean_rmse)},
                "best_lambda": self.best_lambda, "best_rmse": self.best_rmse,
                "best_std": self.best_std, "errors": self.errors}


def rmse(pred, truth) -> float:
    d = np.asarray(pred, float) - np.asarray(truth, float)
    return float(np.sqrt(np.mean(d * d)))


def fold_assignment(n: int, folds: int, seed: int, repeat: int) -> list[np.ndarray]:
    perm = make_rng(seed, repeat).permutation(n)
    return [np.sort(f) for f in np.array_split(perm, folds)]


def _run_repeat(h, Y, model, ws, cv: CvSpec, repeat: int):
    rows, errors = [], 0
    per_fold = np.full((cv.folds, len(cv.grid)), np.nan)
    for fold, test in enumerate(fold_assignment(h.n, cv.folds, cv.seed, repeat)):
        mask = np.ones(h.n, dtype=bool)
        mask[test] = False
        path = lambda_path(h, Y, mask, model, cv.grid, ws=ws, solver=cv.solver,
                           pin_unlabeled=cv.pin_unlabeled)
        for j, res in enumerate(path):
            if res.error is not None:
                errors += 1
                val = math.nan
            else:
                val = rmse(res.f_hat[test], Y[test])
            per_fold[fold, j] = val
            rows.append((model.value, cv.grid[j], fold, repeat, val))
    return rows, np.nanmean(per_fold, axis=0), errors


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("HYPERSPARSE_THREADS", "1")))
    except ValueError:
        return 1


def cross_validate(h: Hypergraph, Y, model, cv: CvSpec | None = None, ws=None) -> CvResult:
    """Mean test RMSE per lambda over ``repeats`` random K-fold splits.

    Test nodes stay in the hypergraph with their labels masked; only the
    training labels are passed to the solver.
    """
    cv = cv or CvSpec()
    model = ModelKind.parse(model)
    Y = np.asarray(Y, float)
    workers = min(_workers(), cv.repeats)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_run_repeat, h, Y, model, ws, cv, r) for r in range(cv.repeats)]
            parts = [f.result() for f in futures]
    else:
        parts = [_run_repeat(h, Y, model, ws, cv, r) for r in range(cv.repeats)]
    rows = [row for p in parts for row in p[0]]
    return CvResult(model, cv.grid, rows, np.vstack([p[1] for p in parts]),
                    sum(p[2] for p in parts))
