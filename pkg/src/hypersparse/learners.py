"""Regression models, lambda paths, out-of-sample prediction and support recovery."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .admm import (AdmmConfig, Diagnostics, Problem, Solution, SolverError,
                   admm_solve)
from .hypergraph import Hypergraph, WeightScheme, growth_stats
from .models import ModelKind

DEFAULT_GRID = tuple(10.0 ** (i - 5) for i in range(7, 0, -1))


@dataclass
class LearnerConfig:
    model: ModelKind = ModelKind.JOINT_SELECTION
    lam: float = 1e-2
    ws: WeightScheme | None = None
    solver: AdmmConfig = field(default_factory=AdmmConfig)

    def __post_init__(self):
        self.model = ModelKind.parse(self.model)
        if not self.lam >= 0:
            raise ValueError("lambda must be nonnegative")
        self.ws = self.model.default_weights if self.ws is None else WeightScheme.parse(self.ws)


@dataclass
class FitResult:
    model: ModelKind
    lam: float
    f_hat: np.ndarray
    mu_hat: np.ndarray
    delta_hat: np.ndarray
    weights: np.ndarray
    objective: float
    diagnostics: Diagnostics
    error: str | None = None
    _state: Solution | None = field(default=None, repr=False)

    @property
    def converged(self) -> bool:
        return self.error is None and self.diagnostics.converged

    @property
    def edge_smoothness(self) -> np.ndarray:
        """Per-edge measure ``w(e_k) * delta_k``."""
        return self.weights * self.delta_hat

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "lambda": self.lam,
            "f_hat": self.f_hat.tolist(),
            "mu_hat": self.mu_hat.tolist(),
            "delta_hat": self.delta_hat.tolist(),
            "weights": self.weights.tolist(),
            "objective": self.objective,
            "error": self.error,
            "diagnostics": self.diagnostics.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FitResult":
        diag = dict(d.get("diagnostics", {}))
        return cls(ModelKind.parse(d["model"]), float(d["lambda"]),
                   np.asarray(d["f_hat"], float), np.asarray(d["mu_hat"], float),
                   np.asarray(d["delta_hat"], float), np.asarray(d["weights"], float),
                   float(d["objective"]), Diagnostics(**diag), d.get("error"))


def fit(h: Hypergraph, Y, mask, cfg: LearnerConfig, warm: FitResult | None = None,
        pin_unlabeled: bool = False) -> FitResult:
    """Fit one model at one lambda.

    Only labels where ``mask`` is true are read. ``warm`` restarts the solver
    from a previous fit on the same hypergraph and mask.
    """
    problem = Problem(h, Y, mask, cfg.model, cfg.lam, cfg.ws)
    sol = admm_solve(problem, cfg.solver, warm=warm._state if warm else None,
                     pin_unlabeled=pin_unlabeled)
    return FitResult(cfg.model, cfg.lam, sol.f, sol.mu, sol.delta, problem.weights,
                     sol.objective, sol.diagnostics, None, sol)


def lambda_path(h: Hypergraph, Y, mask, model, grid=DEFAULT_GRID, ws=None,
                solver: AdmmConfig | None = None, pin_unlabeled: bool = False) -> list[FitResult]:
    """Fit every lambda in ``grid`` in order, warm-starting each from the last success."""
    grid = list(grid)
    if not grid:
        raise ValueError("lambda grid is empty")
    if any(lam < 0 for lam in grid):
        raise ValueError("lambda values must be nonnegative")
    model = ModelKind.parse(model)
    solver = solver or AdmmConfig()
    out, warm = [], None
    for lam in grid:
        cfg = LearnerConfig(model, lam, ws, solver)
        try:
            res = fit(h, Y, mask, cfg, warm=warm, pin_unlabeled=pin_unlabeled)
            warm = res
        except SolverError as exc:
            nan = np.full(h.n, np.nan)
            res = FitResult(model, lam, nan, np.full(h.m, np.nan), np.full(h.m, np.nan),
                            h.weights(cfg.ws) if h.m else np.zeros(0), math.nan,
                            Diagnostics(converged=False), f"{type(exc).__name__}: {exc}")
        out.append(res)
    return out


# -- out-of-sample -----------------------------------------------------------

class EmptyMembership(ValueError):
    pass


def weighted_median(values, weights) -> float:
    """Minimiser of ``sum w_k |x - v_k|``; a flat interval resolves to its midpoint."""
    v = np.asarray(values, float)
    w = np.asarray(weights, float)
    order = np.argsort(v, kind="stable")
    v, w = v[order], w[order]
    cum = np.cumsum(w)
    half = 0.5 * cum[-1]
    k = int(np.searchsorted(cum, half - 1e-12 * cum[-1]))
    if math.isclose(cum[k], half, rel_tol=1e-12, abs_tol=0.0) and k + 1 < len(v):
        return float(0.5 * (v[k] + v[k + 1]))
    return float(v[k])


def weighted_midrange(values, weights) -> float:
    """Minimiser of ``max_k w_k |x - v_k|``."""
    v = np.asarray(values, float)
    w = np.asarray(weights, float)
    best_x, best = float(v[0]), math.inf
    cands = list(v)
    for a in range(len(v)):
        for b in range(a + 1, len(v)):
            cands.append((w[a] * v[a] + w[b] * v[b]) / (w[a] + w[b]))
    for x in cands:
        val = float(np.max(w * np.abs(x - v)))
        if val < best - 1e-15:
            best, best_x = val, float(x)
    return best_x


def predict_out_of_sample(fitted: FitResult, memberships, model=None) -> float:
    """Label for a new node from the fitted edge representatives it belongs to."""
    memberships = list(memberships)
    if not memberships:
        raise EmptyMembership("a new node must belong to at least one edge")
    model = ModelKind.parse(model) if model is not None else fitted.model
    mu = fitted.mu_hat[memberships]
    w = fitted.weights[memberships]
    if model is ModelKind.DENSE:
        return float(w @ mu / w.sum())
    if model is ModelKind.HYPEREDGE_SELECTION:
        return weighted_midrange(mu, w)
    return weighted_median(mu, w)


def fixed_mu_penalty(x: float, fitted: FitResult, memberships, model=None) -> float:
    """The per-edge penalty minimised by :func:`predict_out_of_sample`."""
    model = ModelKind.parse(model) if model is not None else fitted.model
    mu = fitted.mu_hat[list(memberships)]
    w = fitted.weights[list(memberships)]
    if model is ModelKind.DENSE:
        return float(w @ (x - mu) ** 2)
    if model is ModelKind.HYPEREDGE_SELECTION:
        return float(np.max(w * np.abs(x - mu)))
    return float(w @ np.abs(x - mu))


# -- support -----------------------------------------------------------------

@dataclass
class SupportReport:
    gamma: float
    relevant: list[int]
    irrelevant: list[int]
    gap: float
    zero_gap: bool = False

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "relevant": self.relevant,
                "irrelevant": self.irrelevant, "gap": self.gap, "zero_gap": self.zero_gap}


def classify_support(fitted: FitResult | np.ndarray, gamma: float | str = "auto") -> SupportReport:
    """Split edges into those with smoothness ``<= gamma`` and the rest.

    ``gamma="auto"`` thresholds at the midpoint of the widest gap between
    consecutive sorted edge smoothness values.
    """
    ss = fitted.edge_smoothness if isinstance(fitted, FitResult) else np.asarray(fitted, float)
    zero_gap = False
    if isinstance(gamma, str):
        if gamma != "auto":
            raise ValueError("gamma is a number or 'auto'")
        srt = np.sort(ss)
        gaps = np.diff(srt)
        if gaps.size == 0 or gaps.max() <= 0:
            return SupportReport(float(srt[-1]) if srt.size else 0.0,
                                 list(range(len(ss))), [], 0.0, True)
        j = int(np.argmax(gaps))
        gamma = 0.5 * (srt[j] + srt[j + 1])
    relevant = [int(k) for k in np.flatnonzero(ss <= gamma)]
    irrelevant = [int(k) for k in np.flatnonzero(ss > gamma)]
    if relevant and irrelevant:
        gap = float(ss[irrelevant].min() - ss[relevant].max())
    else:
        gap, zero_gap = 0.0, True
    return SupportReport(float(gamma), relevant, irrelevant, gap, zero_gap)


# -- sparsistency --------------------------------------------------------------

@dataclass
class SparsistencyCertificate:
    model: ModelKind
    gap_condition: bool
    lambda_max: float
    noise_threshold: float
    D: float
    R: float
    probability: str

    def to_dict(self) -> dict:
        return {"model": self.model.value, "gap_condition": self.gap_condition,
                "lambda_max": self.lambda_max, "noise_threshold": self.noise_threshold,
                "D": self.D, "R": self.R, "probability": self.probability}


def sparsistency_certificate(h: Hypergraph, model, gamma_r: float, gamma_i: float,
                             delta: float, ws=None) -> SparsistencyCertificate:
    """Admissible lambda range for support recovery under Gaussian label noise ``delta``.

    Hyperedge selection: ``lambda < (sqrt(pi)(gi - gr) - 2 sqrt(2) delta) / (D sqrt(pi))``.
    Joint selection: ``lambda < (sqrt(pi)(gi - gr) - 2 sqrt(2) delta) / (2 sqrt(pi) D R)``.
    ``D`` and ``R`` come from :func:`growth_stats` under ``ws``.
    """
    model = ModelKind.parse(model)
    if not gamma_i > gamma_r:
        raise ValueError("need gamma_i > gamma_r")
    if gamma_r < 0 or delta < 0:
        raise ValueError("gamma_r and delta must be nonnegative")
    if model not in (ModelKind.HYPEREDGE_SELECTION, ModelKind.JOINT_SELECTION):
        raise ValueError("certificates exist for hyperedge and joint selection only")
    ws = model.default_weights if ws is None else WeightScheme.parse(ws)
    gs = growth_stats(h, ws)
    threshold = 2.0 * math.sqrt(2.0) * delta / math.sqrt(math.pi)
    holds = (gamma_i - gamma_r) > threshold
    numerator = math.sqrt(math.pi) * (gamma_i - gamma_r) - 2.0 * math.sqrt(2.0) * delta
    if model is ModelKind.HYPEREDGE_SELECTION:
        lam = numerator / (gs.D * math.sqrt(math.pi))
        prob = "at least (1 - 1/(1 + c^2 n))^n for some constant c"
    else:
        lam = numerator / (2.0 * math.sqrt(math.pi) * gs.D * gs.R)
        prob = "at least 1 - O(1/n)"
    # rounding can push the bound to <= 0 just above the threshold
    lam = max(lam, 0.0) if holds else 0.0
    return SparsistencyCertificate(model, holds, lam, threshold, gs.D, gs.R, prob)
