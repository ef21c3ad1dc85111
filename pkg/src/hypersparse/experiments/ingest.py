"""Build a hypergraph from a table of categorical attributes."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from ..hypergraph import Hypergraph

MISSING = ("", "?")


class IngestError(ValueError):
    pass


class ParseError(IngestError):
    pass


class MissingLabelColumn(IngestError):
    pass


class EmptyData(IngestError):
    pass


@dataclass
class Ingested:
    h: Hypergraph
    Y: np.ndarray
    node_ids: list[str]
    edge_labels: list[tuple[str, str]]           # (column, category) per edge
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def labels_rows(self) -> list[tuple[str, float]]:
        return list(zip(self.node_ids, self.Y.tolist()))


def lenses_path() -> Path:
    """Path of the bundled UCI Lenses table (24 rows, 4 categorical attributes)."""
    return Path(str(resources.files("hypersparse") / "data" / "lenses.csv"))


def _read(path) -> tuple[list[str], list[list[str]]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise EmptyData(f"{path} has no header row")
    header = [c.strip() for c in rows[0]]
    body = rows[1:]
    for k, r in enumerate(body, start=2):
        if len(r) != len(header):
            raise ParseError(f"line {k}: expected {len(header)} fields, got {len(r)}")
    if not body:
        raise EmptyData(f"{path} has no data rows")
    return header, [[c.strip() for c in r] for r in body]


def _encode_labels(raw: list[str], ordinal) -> np.ndarray:
    if any(v in MISSING for v in raw):
        raise ParseError("label column has missing values")
    if ordinal is None:
        try:
            return np.array([float(v) for v in raw])
        except ValueError:
            raise ParseError("label column is not numeric; pass an ordinal encoding") from None
    if isinstance(ordinal, dict):
        mapping = {str(k): float(v) for k, v in ordinal.items()}
    else:
        order = sorted(set(raw)) if ordinal is True else [str(c) for c in ordinal]
        mapping = {c: float(i) for i, c in enumerate(order)}
    unknown = sorted(set(raw) - set(mapping))
    if unknown:
        raise ParseError(f"labels without an ordinal code: {unknown}")
    return np.array([mapping[v] for v in raw])


def ingest_categorical_csv(path, label_column: str, drop_columns=(), ordinal=None,
                           id_column: str | None = None) -> Ingested:
    """One node per row and one hyperedge per (column, category) with two or more rows.

    Parameters
    ----------
    path : path-like
        CSV with a header row.
    label_column : str
        Regression target. Numeric unless ``ordinal`` is given.
    drop_columns : iterable of str
        Columns ignored when forming hyperedges.
    ordinal : None, True, sequence or dict
        Encoding for a categorical target: ``True`` sorts the categories,
        a sequence gives their order, a dict maps them to values.
    id_column : str, optional
        Column holding node ids; row numbers are used otherwise. It never
        forms hyperedges.

    Empty cells and ``"?"`` are missing and join no hyperedge.
    """
    header, body = _read(path)
    if label_column not in header:
        raise MissingLabelColumn(f"no column named {label_column!r}")
    if id_column is not None and id_column not in header:
        raise ParseError(f"no column named {id_column!r}")
    li = header.index(label_column)
    Y = _encode_labels([r[li] for r in body], ordinal)
    ids = [r[header.index(id_column)] for r in body] if id_column else [str(i) for i in range(len(body))]
    if len(set(ids)) != len(ids):
        raise ParseError("node ids are not unique")

    skip = {label_column, *drop_columns} | ({id_column} if id_column else set())
    edges, labels, skipped = [], [], []
    for c, name in enumerate(header):
        if name in skip:
            continue
        groups: dict[str, list[int]] = {}
        for i, r in enumerate(body):
            if r[c] not in MISSING:
                groups.setdefault(r[c], []).append(i)
        for cat in sorted(groups):
            if len(groups[cat]) < 2:
                skipped.append((name, cat))
                continue
            edges.append(groups[cat])
            labels.append((name, cat))
    if skipped:
        warnings.warn(f"skipped {len(skipped)} single-row categories: {skipped}")
    h = Hypergraph.from_edges(len(body), edges, name=Path(path).stem)
    return Ingested(h, Y, ids, labels, skipped)


def load_lenses() -> Ingested:
    return ingest_categorical_csv(lenses_path(), "lens_class", id_column="id")
