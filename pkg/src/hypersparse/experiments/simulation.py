"""Synthetic hypergraphs with planted relevant and irrelevant edges."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from ..hypergraph import Hypergraph


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator; ``stream`` selects independent substreams."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


@dataclass
class SimSpec:
    n: int = 200
    band_width: float = 0.15
    n_relevant: int = 10
    n_irrelevant: int = 0
    irrelevant_size: int = 20
    noisy_per_edge: int = 0
    sigma: float = 0.0
    band_starts: tuple | None = None

    def __post_init__(self):
        if self.band_width <= 0:
            raise ValueError("band width must be positive")
        for name in ("n_relevant", "n_irrelevant", "noisy_per_edge"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.n_irrelevant and not 2 <= self.irrelevant_size <= self.n:
            raise ValueError("irrelevant edge size must lie in [2, n]")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    def starts(self) -> np.ndarray:
        if self.band_starts is not None:
            return np.asarray(self.band_starts, float)
        if self.n_relevant == 1:
            return np.zeros(1)
        return np.linspace(0.0, 0.9, self.n_relevant)

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["band_starts"] is not None:
            d["band_starts"] = list(d["band_starts"])
        return d


@dataclass
class SimData:
    h: Hypergraph
    Y: np.ndarray
    y_true: np.ndarray
    relevant: list[int]
    irrelevant: list[int]
    noisy: dict = field(default_factory=dict)


def gen_simulation(spec: SimSpec, seed: int = 0) -> SimData:
    """Uniform labels, band edges ``{i : a <= y_i < a + width}`` and random irrelevant edges.

    Noisy nodes are drawn without replacement from the non-members of each
    band edge and appended to it. Edge order: band edges first.
    """
    rng = make_rng(seed)
    y = rng.random(spec.n)
    edges, kinds, noisy = [], [], {}
    for a in spec.starts():
        members = np.flatnonzero((y >= a) & (y < a + spec.band_width))
        if spec.noisy_per_edge:
            others = np.setdiff1d(np.arange(spec.n), members)
            extra = rng.choice(others, size=min(spec.noisy_per_edge, others.size), replace=False)
            noisy[len(edges)] = sorted(int(i) for i in extra)
            members = np.concatenate([members, extra])
        edges.append(members)
        kinds.append("relevant")
    for _ in range(spec.n_irrelevant):
        edges.append(rng.choice(spec.n, size=spec.irrelevant_size, replace=False))
        kinds.append("irrelevant")
    kept, kept_kinds, kept_noisy = [], [], {}
    for k, (e, kind) in enumerate(zip(edges, kinds)):
        if len(e) < 2:
            warnings.warn(f"dropping {kind} edge {k} with {len(e)} node(s)")
            continue
        if k in noisy:
            kept_noisy[len(kept)] = noisy[k]
        kept.append(sorted(int(i) for i in e))
        kept_kinds.append(kind)
    Y = y + spec.sigma * rng.standard_normal(spec.n) if spec.sigma > 0 else y.copy()
    h = Hypergraph.from_edges(spec.n, kept, name="simulation")
    return SimData(h, Y, y,
                   [k for k, c in enumerate(kept_kinds) if c == "relevant"],
                   [k for k, c in enumerate(kept_kinds) if c == "irrelevant"],
                   kept_noisy)
