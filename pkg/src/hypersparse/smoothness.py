"""Smoothness measures of node labels on a hypergraph.

Two families live here. :func:`sh_general` evaluates the pairwise form
``T_e( t_{i<j in e}( w_ij * |f_i - f_j|^p ) )`` for any choice of the outer
(``T``) and inner (``t``) combinators. :func:`ss1`, :func:`ss2` and
:func:`ss_dense` are the per-edge measures built around a representative
label ``mu`` that the learners optimise over.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .hypergraph import Hypergraph, WeightScheme, validate


class EmptyHypergraphWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Combinator:
    """Reduction over a list of nonnegative values.

    ``kind`` is ``"sum"``, ``"max"`` or ``"lp"``. The ``"lp"`` combinator is
    the root-sum ``(sum x)^(1/p)``; paired with a pairwise kernel of exponent
    ``p`` it yields an l_p norm of the differences.
    """

    kind: str = "sum"
    p: float = 1.0

    def __post_init__(self):
        if self.kind not in ("sum", "max", "lp"):
            raise ValueError(f"unknown combinator {self.kind!r}")
        if not (np.isfinite(self.p) and self.p >= 1):
            raise ValueError("combinator exponent must be finite and >= 1")

    def __call__(self, values: np.ndarray) -> float:
        values = np.asarray(values, dtype=float)
        if values.size == 0:
            return 0.0
        if self.kind == "sum":
            return float(values.sum())
        if self.kind == "max":
            return float(values.max())
        return float(values.sum() ** (1.0 / self.p))


SUM = Combinator("sum")
MAX = Combinator("max")


def LpNorm(p: float) -> Combinator:
    return Combinator("lp", p)


@dataclass(frozen=True)
class CombinatorSpec:
    T: Combinator = SUM
    t: Combinator = SUM
    p: float = 2.0

    def __post_init__(self):
        if not (np.isfinite(self.p) and self.p >= 1):
            raise ValueError("pairwise exponent must be finite and >= 1")


def sh_general(f, h: Hypergraph, ws: WeightScheme | str = WeightScheme.UNIT,
               spec: CombinatorSpec = CombinatorSpec(),
               pair_weights: Mapping[tuple[int, int], float] | None = None) -> float:
    """Evaluate the pairwise smoothness of ``f`` on ``h``.

    With ``pair_weights=None`` every pair inside edge ``e`` gets weight
    ``w(e)``; otherwise ``pair_weights[(i, j)]`` (``i < j``) is used for that
    pair in every edge containing it.
    """
    f = np.asarray(f, dtype=float)
    validate(h)
    if f.shape != (h.n,):
        raise ValueError(f"expected {h.n} labels, got shape {f.shape}")
    if h.m == 0:
        warnings.warn("hypergraph has no edges; smoothness is 0", EmptyHypergraphWarning)
        return 0.0
    w = h.weights(ws)
    per_edge = np.empty(h.m)
    for k, e in enumerate(h.edges):
        pairs = list(itertools.combinations(e.nodes, 2))
        i, j = np.array(pairs).T
        kern = np.abs(f[i] - f[j]) ** spec.p
        if pair_weights is None:
            wij = w[k]
        else:
            wij = np.array([pair_weights.get(pq, 0.0) for pq in pairs])
        per_edge[k] = spec.t(wij * kern)
    return spec.T(per_edge)


@dataclass(frozen=True)
class EdgeSmoothness:
    mu: float
    value: float


def _check(values, w):
    values = np.asarray(values, dtype=float).ravel()
    if values.size < 2:
        raise ValueError("an edge needs at least two labels")
    if not w > 0:
        raise ValueError("edge weight must be positive")
    return values


def median_midpoint(values) -> float:
    """Median; for even counts the midpoint of the two middle order statistics."""
    v = np.sort(np.asarray(values, dtype=float))
    k = v.size
    if k % 2:
        return float(v[k // 2])
    return float(0.5 * (v[k // 2 - 1] + v[k // 2]))


def ss1(values, w: float = 1.0) -> EdgeSmoothness:
    """Weighted sum of absolute deviations from the median."""
    v = _check(values, w)
    mu = median_midpoint(v)
    return EdgeSmoothness(mu, float(w * np.abs(v - mu).sum()))


def ss2(values, w: float = 1.0) -> EdgeSmoothness:
    """Weighted half-range: ``min_mu w * max_i |f_i - mu|``."""
    v = _check(values, w)
    lo, hi = float(v.min()), float(v.max())
    return EdgeSmoothness(0.5 * (lo + hi), 0.5 * w * (hi - lo))


def ss_dense(values, w: float = 1.0) -> EdgeSmoothness:
    v = _check(values, w)
    mu = float(v.mean())
    return EdgeSmoothness(mu, float(w * ((v - mu) ** 2).sum()))


def edge_values(f, h: Hypergraph, measure, ws: WeightScheme | str = WeightScheme.UNIT) -> np.ndarray:
    """Apply a per-edge measure to every edge of ``h``; returns the values."""
    f = np.asarray(f, dtype=float)
    w = h.weights(ws)
    return np.array([measure(f[list(e.nodes)], w[k]).value for k, e in enumerate(h.edges)])
