"""Hypergraph data model, weight schemes, expansions and growth constants."""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components


class HypergraphError(ValueError):
    """Base class for invalid hypergraphs."""


class OutOfRangeNode(HypergraphError):
    pass


class DegenerateEdge(HypergraphError):
    pass


class NegativeWeight(HypergraphError):
    pass


class MissingWeight(HypergraphError):
    pass


@dataclass(frozen=True)
class Hyperedge:
    nodes: tuple[int, ...]
    weight: float | None = None

    def __post_init__(self):
        # sorted but not deduplicated; validate() rejects duplicates
        object.__setattr__(self, "nodes", tuple(sorted(int(i) for i in self.nodes)))

    def __len__(self) -> int:
        return len(self.nodes)


class WeightScheme(enum.Enum):
    UNIT = "unit"
    INVERSE_CARDINALITY = "invcard"
    EXPLICIT = "explicit"

    @classmethod
    def parse(cls, value: "str | WeightScheme") -> "WeightScheme":
        if isinstance(value, WeightScheme):
            return value
        aliases = {"unit": cls.UNIT, "invcard": cls.INVERSE_CARDINALITY,
                   "inverse_cardinality": cls.INVERSE_CARDINALITY,
                   "explicit": cls.EXPLICIT}
        try:
            return aliases[value.lower()]
        except KeyError:
            raise ValueError(f"unknown weight scheme {value!r}") from None


@dataclass(frozen=True)
class Hypergraph:
    """Hypergraph on nodes ``0..n-1``.

    Edges are kept in the given order; edge ``k`` is referred to by its
    position everywhere else in the package. Construction does not validate,
    call :func:`validate` (the solvers do).
    """

    n: int
    edges: tuple[Hyperedge, ...] = ()
    name: str | None = None

    def __post_init__(self):
        edges = tuple(e if isinstance(e, Hyperedge) else Hyperedge(tuple(e))
                      for e in self.edges)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]],
                   weights: Sequence[float] | None = None,
                   name: str | None = None) -> "Hypergraph":
        edges = list(edges)
        if weights is None:
            weights = [None] * len(edges)
        if len(weights) != len(edges):
            raise ValueError("weights and edges differ in length")
        return cls(n, tuple(Hyperedge(tuple(e), w) for e, w in zip(edges, weights)), name)

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.array([len(e) for e in self.edges], dtype=np.int64)

    @cached_property
    def member_nodes(self) -> np.ndarray:
        """Node id of every (edge, member) slot, edges concatenated in order."""
        if not self.edges:
            return np.zeros(0, dtype=np.int64)
        return np.concatenate([np.asarray(e.nodes, dtype=np.int64) for e in self.edges])

    @cached_property
    def member_edges(self) -> np.ndarray:
        """Edge id of every (edge, member) slot."""
        return np.repeat(np.arange(self.m, dtype=np.int64), self.sizes)

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)

    def incidence(self) -> sparse.csr_matrix:
        """n x m 0/1 incidence matrix."""
        data = np.ones(len(self.member_nodes))
        return sparse.csr_matrix((data, (self.member_nodes, self.member_edges)),
                                 shape=(self.n, self.m))

    def degrees(self) -> np.ndarray:
        return np.bincount(self.member_nodes, minlength=self.n)

    def memberships(self, node: int) -> list[int]:
        return [k for k, e in enumerate(self.edges) if node in e.nodes]

    def weights(self, scheme: "WeightScheme | str" = WeightScheme.INVERSE_CARDINALITY) -> np.ndarray:
        """Resolve per-edge weights under ``scheme``."""
        scheme = WeightScheme.parse(scheme)
        if scheme is WeightScheme.UNIT:
            return np.ones(self.m)
        if scheme is WeightScheme.INVERSE_CARDINALITY:
            return 1.0 / self.sizes.astype(float)
        missing = [k for k, e in enumerate(self.edges) if e.weight is None]
        if missing:
            raise MissingWeight(f"edges {missing[:5]} carry no explicit weight")
        w = np.array([e.weight for e in self.edges], dtype=float)
        if np.any(w <= 0):
            raise NegativeWeight("resolved weights must be strictly positive")
        return w

    def components(self) -> np.ndarray:
        """Connected-component label per node (via the star expansion)."""
        if self.m == 0:
            return np.arange(self.n)
        adj = sparse.bmat([[None, self.incidence()], [self.incidence().T, None]])
        _, labels = connected_components(adj, directed=False)
        return labels[: self.n]

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        edges = []
        for e in self.edges:
            d = {"nodes": list(e.nodes)}
            if e.weight is not None:
                d["weight"] = float(e.weight)
            edges.append(d)
        out = {"n": int(self.n), "edges": edges}
        if self.name is not None:
            out["name"] = self.name
        return out

    @classmethod
    def from_dict(cls, d: dict) -> "Hypergraph":
        try:
            n = int(d["n"])
            edges = tuple(Hyperedge(tuple(e["nodes"]), e.get("weight"))
                          for e in d.get("edges", []))
        except (KeyError, TypeError) as exc:
            raise HypergraphError(f"malformed hypergraph document: {exc}") from exc
        h = cls(n, edges, d.get("name"))
        validate(h)
        return h

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Hypergraph":
        return cls.from_dict(json.loads(text))


def validate(h: Hypergraph) -> None:
    """Raise a :class:`HypergraphError` subclass unless ``h`` is well formed."""
    if h.n < 0:
        raise HypergraphError("negative node count")
    for k, e in enumerate(h.edges):
        if len(set(e.nodes)) != len(e.nodes):
            raise DegenerateEdge(f"edge {k} repeats a node: {e.nodes}")
        if len(e.nodes) < 2:
            raise DegenerateEdge(f"edge {k} has fewer than 2 nodes")
        if e.nodes[0] < 0 or e.nodes[-1] >= h.n:
            raise OutOfRangeNode(f"edge {k} has node outside [0, {h.n})")
        if e.weight is not None and not e.weight >= 0:
            raise NegativeWeight(f"edge {k} has weight {e.weight}")


@dataclass(frozen=True)
class GrowthStats:
    r: np.ndarray
    R: float
    R_prime: float
    d: np.ndarray
    D: float


def growth_stats(h: Hypergraph, ws: WeightScheme | str = WeightScheme.INVERSE_CARDINALITY) -> GrowthStats:
    """Edge fractions ``r_k = |e_k|/n`` and scaled node degrees ``d_i = n * sum w(e_k)``."""
    validate(h)
    if h.m == 0:
        raise HypergraphError("growth constants need at least one edge")
    w = h.weights(ws)
    r = h.sizes / float(h.n)
    d = h.n * np.bincount(h.member_nodes, weights=w[h.member_edges], minlength=h.n)
    return GrowthStats(r=r, R=float(r.max()), R_prime=float(r.min()), d=d, D=float(d.max()))


@dataclass
class WeightedGraph:
    n: int
    pairs: dict[tuple[int, int], float] = field(default_factory=dict)

    def laplacian(self) -> sparse.csr_matrix:
        if not self.pairs:
            return sparse.csr_matrix((self.n, self.n))
        ij = np.array(list(self.pairs.keys()))
        w = np.array(list(self.pairs.values()))
        W = sparse.coo_matrix((w, (ij[:, 0], ij[:, 1])), shape=(self.n, self.n))
        W = (W + W.T).tocsr()
        return (sparse.diags(np.asarray(W.sum(axis=1)).ravel()) - W).tocsr()

    def weight(self, i: int, j: int) -> float:
        return self.pairs.get((min(i, j), max(i, j)), 0.0)


def clique_expansion(h: Hypergraph, ws: WeightScheme | str = WeightScheme.INVERSE_CARDINALITY) -> WeightedGraph:
    """Pair weights summed over every edge containing both endpoints."""
    validate(h)
    w = h.weights(ws) if h.m else np.zeros(0)
    pairs: dict[tuple[int, int], float] = {}
    for k, e in enumerate(h.edges):
        nodes = e.nodes
        for a in range(len(nodes)):
            for b in range(a + 1, len(nodes)):
                key = (nodes[a], nodes[b])
                pairs[key] = pairs.get(key, 0.0) + float(w[k])
    return WeightedGraph(h.n, pairs)


def star_expansion(h: Hypergraph, ws: WeightScheme | str = WeightScheme.INVERSE_CARDINALITY) -> WeightedGraph:
    """Bipartite graph with star node ``n + k`` joined to the members of edge ``k``."""
    validate(h)
    w = h.weights(ws) if h.m else np.zeros(0)
    pairs = {}
    for k, e in enumerate(h.edges):
        for i in e.nodes:
            pairs[(i, h.n + k)] = float(w[k])
    return WeightedGraph(h.n + h.m, pairs)
