"""Command-line entry point: train, predict, simulate, sparsistency, ingest.

Every command reads an optional JSON config; explicit flags override it.
The resolved config is echoed to stderr as one JSON line and can be passed
back through ``--config``. Exit codes: 2 bad input, 3 no convergence,
4 singular system.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .admm import AdmmConfig, MaxIterExceeded, SingularSystem, SolverError
from .hypergraph import Hypergraph, HypergraphError, WeightScheme
from .learners import (DEFAULT_GRID, EmptyMembership, FitResult, lambda_path,
                       predict_out_of_sample, sparsistency_certificate)
from .models import ModelKind
from .smoothness import edge_values, ss1, ss2

EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_SINGULAR = 2, 3, 4
MODEL_ORDER = ("dense", "edge", "node", "joint")


class InputError(Exception):
    pass


# -- parsing helpers --------------------------------------------------------

def parse_grid(text) -> list[float]:
    """``"1e-4..1e2:log7"`` or a comma list; returned largest first for warm starts."""
    try:
        if isinstance(text, (list, tuple)):
            vals = [float(v) for v in text]
        elif ".." in str(text):
            span, _, count = str(text).partition(":log")
            lo, _, hi = span.partition("..")
            lo, hi, k = float(lo), float(hi), int(count)
            if lo <= 0 or hi <= 0 or k < 1:
                raise ValueError
            vals = list(np.logspace(math.log10(lo), math.log10(hi), k)) if k > 1 else [lo]
        else:
            vals = [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise InputError(f"cannot parse grid {text!r}") from None
    if not vals or any(not v >= 0 for v in vals):
        raise InputError(f"grid must hold nonnegative values: {text!r}")
    return sorted({float(v) for v in vals}, reverse=True)


def _int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in str(text).split(",") if v.strip()]


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise InputError("config must be a JSON object")
    return cfg


def resolve(defaults: dict, config: dict, args: argparse.Namespace) -> dict:
    """Defaults, then config keys, then any flag that was given."""
    out = dict(defaults)
    if "lambda" in config:
        config = {("lam" if k == "lambda" else k): v for k, v in config.items()}
    unknown = set(config) - set(defaults) - {"command"}
    if unknown:
        raise InputError(f"unknown config keys: {sorted(unknown)}")
    out.update({k: v for k, v in config.items() if k != "command"})
    for k in defaults:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


def read_hypergraph(path) -> Hypergraph:
    if path is None:
        raise InputError("a hypergraph JSON file is required")
    try:
        return Hypergraph.from_json(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read hypergraph {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"hypergraph {path} is not JSON: {exc}") from exc


def read_labels(path, n: int) -> tuple[np.ndarray, np.ndarray]:
    """CSV with columns ``node_id,value``; nodes not listed are unlabeled."""
    if path is None:
        raise InputError("a labels CSV file is required")
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise InputError(f"cannot read labels {path}: {exc}") from exc
    Y, mask = np.zeros(n), np.zeros(n, dtype=bool)
    for k, r in enumerate(rows, start=2):
        try:
            i, v = int(r["node_id"]), r["value"]
        except (KeyError, TypeError, ValueError):
            raise InputError(f"labels line {k}: need integer node_id and a value column") from None
        if not 0 <= i < n:
            raise InputError(f"labels line {k}: node {i} outside [0, {n})")
        if v is None or v.strip() in ("", "?"):
            continue
        try:
            Y[i], mask[i] = float(v), True
        except ValueError:
            raise InputError(f"labels line {k}: value {v!r} is not a number") from None
    if not mask.any():
        raise InputError("no labeled nodes")
    return Y, mask


# -- output -----------------------------------------------------------------

def _metadata() -> dict:
    return {"version": __version__, "created": time.strftime("%Y-%m-%dT%H:%M:%S%z")}


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=True) + "\n"


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def write(path, text: str) -> None:
    """Single sink for command output; ``None`` or ``-`` means stdout."""
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def echo(cfg: dict) -> None:
    sys.stderr.write(json.dumps(cfg, sort_keys=True) + "\n")


def _solver(cfg: dict) -> AdmmConfig:
    s = dict(cfg.get("solver") or {})
    try:
        return AdmmConfig(**s)
    except TypeError as exc:
        raise InputError(f"bad solver settings: {exc}") from exc


# -- commands ---------------------------------------------------------------

TRAIN_DEFAULTS = {"hypergraph": None, "labels": None, "model": "joint", "lam": None,
                  "grid": None, "weights": None, "out": None, "format": "json",
                  "pin_unlabeled": False, "solver": {}, "seed": 0}


def cmd_train(args) -> int:
    cfg = resolve(TRAIN_DEFAULTS, load_config(args.config), args)
    model = ModelKind.parse(cfg["model"])
    if cfg["lam"] is not None and cfg["grid"] is not None:
        raise InputError("give either a single lambda or a grid")
    grid = [float(cfg["lam"])] if cfg["lam"] is not None else parse_grid(cfg["grid"] or DEFAULT_GRID)
    cfg["grid"] = None if cfg["lam"] is not None else grid
    ws = None if cfg["weights"] is None else WeightScheme.parse(cfg["weights"])
    echo(cfg)
    h = read_hypergraph(cfg["hypergraph"])
    Y, mask = read_labels(cfg["labels"], h.n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MaxIterExceeded)
        fits = lambda_path(h, Y, mask, model, grid, ws=ws, solver=_solver(cfg),
                           pin_unlabeled=bool(cfg["pin_unlabeled"]))
    for r in fits:
        if r.error is not None:
            sys.stderr.write(f"lambda={r.lam:g}: {r.error}\n")
            return EXIT_SINGULAR if r.error.startswith("SingularSystem") else EXIT_NOT_CONVERGED
    if cfg["format"] == "csv":
        rows = [(r.lam, i, r.f_hat[i]) for r in fits for i in range(h.n)]
        write(cfg["out"], to_csv(("lambda", "node_id", "f_hat"), rows))
    else:
        write(cfg["out"], dumps({"config": cfg, "fits": [r.to_dict() for r in fits],
                                 "metadata": _metadata()}))
    if not all(r.converged for r in fits):
        bad = [r.lam for r in fits if not r.converged]
        sys.stderr.write(f"solver did not converge at lambda {bad}\n")
        return EXIT_NOT_CONVERGED
    return 0


PREDICT_DEFAULTS = {"fit": None, "lam": None, "memberships": None, "edges": None,
                    "model": None, "out": None, "format": "json"}


def _read_memberships(cfg) -> dict:
    if cfg["edges"] is not None:
        return {"new": _int_list(cfg["edges"])}
    if cfg["memberships"] is None:
        raise InputError("give --edges or a memberships JSON file")
    try:
        doc = json.loads(Path(cfg["memberships"]).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read memberships: {exc}") from exc
    if isinstance(doc, list):
        doc = {str(k): v for k, v in enumerate(doc)}
    return {str(k): _int_list(v) for k, v in doc.items()}


def cmd_predict(args) -> int:
    cfg = resolve(PREDICT_DEFAULTS, load_config(args.config), args)
    echo(cfg)
    if cfg["fit"] is None:
        raise InputError("a fit JSON file from 'train' is required")
    try:
        fits = [FitResult.from_dict(d) for d in json.loads(Path(cfg["fit"]).read_text())["fits"]]
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read fit {cfg['fit']}: {exc}") from exc
    if cfg["lam"] is None:
        fit = fits[0]
    else:
        match = [f for f in fits if math.isclose(f.lam, float(cfg["lam"]), rel_tol=1e-12)]
        if not match:
            raise InputError(f"no fit at lambda {cfg['lam']}")
        fit = match[0]
    out = {}
    for key, edges in _read_memberships(cfg).items():
        if any(not 0 <= k < fit.mu_hat.size for k in edges):
            raise InputError(f"{key}: edge index outside [0, {fit.mu_hat.size})")
        try:
            out[key] = predict_out_of_sample(fit, edges, cfg["model"])
        except EmptyMembership as exc:
            raise InputError(f"{key}: {exc}") from exc
    if cfg["format"] == "csv":
        write(cfg["out"], to_csv(("node", "prediction"), out.items()))
    else:
        write(cfg["out"], dumps({"config": cfg, "lambda": fit.lam, "model": fit.model.value,
                                 "predictions": out, "metadata": _metadata()}))
    return 0


SIM_DEFAULTS = {"sim": {}, "sweep": None, "models": list(MODEL_ORDER), "model": None,
                "weights": None, "grid": None, "folds": 10, "repeats": 10, "seed": 0,
                "out": None, "summary": None, "format": "csv", "solver": None,
                "pin_unlabeled": False}


def _sweep(cfg) -> tuple[str | None, list]:
    sw = cfg["sweep"]
    if sw is None:
        return None, [None]
    if isinstance(sw, str):
        name, _, vals = sw.partition("=")
        sw = {"field": name.strip(), "values": _int_list(vals)}
    if not isinstance(sw, dict) or "field" not in sw or not sw.get("values"):
        raise InputError("sweep needs a field and a nonempty list of values")
    return sw["field"], list(sw["values"])


def run_simulation(cfg: dict):
    """Rows ``(setting, value, model, lambda, fold, repeat, rmse)`` and a summary."""
    from .experiments.cv import EXPERIMENT_SOLVER, CvSpec
    from .experiments.simulation import SimSpec
    from .experiments.sweeps import run_sweep

    field_name, values = _sweep(cfg)
    models = [cfg["model"]] if cfg["model"] else list(cfg["models"])
    grid = parse_grid(cfg["grid"]) if cfg["grid"] is not None else list(DEFAULT_GRID)
    solver = EXPERIMENT_SOLVER if cfg["solver"] is None else _solver(cfg)
    try:
        base = SimSpec(**cfg["sim"])
        if field_name is not None and field_name not in base.to_dict():
            raise InputError(f"cannot sweep unknown setting {field_name!r}")
    except TypeError as exc:
        raise InputError(f"bad simulation settings: {exc}") from exc
    cv = CvSpec(cfg["folds"], tuple(grid), cfg["repeats"], cfg["seed"], solver,
                bool(cfg["pin_unlabeled"]))
    res = run_sweep(field_name, values, base, models, cv, cfg["seed"], cfg["weights"])
    rows = [(s, "" if v is None else v, *rest) for (s, v, *rest) in res.rows()]
    return rows, res.summary()


def cmd_simulate(args) -> int:
    cfg = resolve(SIM_DEFAULTS, load_config(args.config), args)
    if args.n_irrelevant is not None or args.noisy is not None:
        cfg["sim"] = dict(cfg["sim"])
        if args.n_irrelevant is not None:
            cfg["sim"]["n_irrelevant"] = args.n_irrelevant
        if args.noisy is not None:
            cfg["sim"]["noisy_per_edge"] = args.noisy
    if cfg["grid"] is not None:
        cfg["grid"] = parse_grid(cfg["grid"])
    echo(cfg)
    rows, summary = run_simulation(cfg)
    header = ("setting", "value", "model", "lambda", "fold", "repeat", "rmse")
    if cfg["format"] == "json":
        write(cfg["out"], dumps({"config": cfg, "summary": summary,
                                 "rows": [dict(zip(header, r)) for r in rows],
                                 "metadata": _metadata()}))
    else:
        write(cfg["out"], to_csv(header, rows))
    summary_path = cfg["summary"]
    if summary_path is None and cfg["out"] not in (None, "-") and cfg["format"] == "csv":
        summary_path = str(Path(cfg["out"]).with_suffix(".summary.json"))
    if summary_path is not None:
        write(summary_path, dumps({"config": cfg, "summary": summary, "metadata": _metadata()}))
    return 0


SPARS_DEFAULTS = {"model": "joint", "gamma_r": None, "gamma_i": None, "delta": None,
                  "hypergraph": None, "weights": None, "sim": {"n_relevant": 5, "n_irrelevant": 5},
                  "grid": None, "seed": 0, "out": None, "format": "json", "solver": {}}


def cmd_sparsistency(args) -> int:
    from .experiments.gap import lambda_gap_experiment
    from .experiments.simulation import SimSpec, gen_simulation

    cfg = resolve(SPARS_DEFAULTS, load_config(args.config), args)
    model = ModelKind.parse(cfg["model"])
    ws = model.default_weights if cfg["weights"] is None else WeightScheme.parse(cfg["weights"])
    grid = parse_grid(cfg["grid"]) if cfg["grid"] is not None else list(DEFAULT_GRID)
    cfg["grid"] = grid
    echo(cfg)
    try:
        spec = SimSpec(**cfg["sim"])
    except TypeError as exc:
        raise InputError(f"bad simulation settings: {exc}") from exc
    data = gen_simulation(spec, cfg["seed"])
    h = read_hypergraph(cfg["hypergraph"]) if cfg["hypergraph"] else data.h
    gr, gi, delta = cfg["gamma_r"], cfg["gamma_i"], cfg["delta"]
    if gr is None or gi is None:
        if cfg["hypergraph"]:
            raise InputError("gamma_r and gamma_i are required with an explicit hypergraph")
        measure = ss2 if model is ModelKind.HYPEREDGE_SELECTION else ss1
        ss = edge_values(data.y_true, data.h, measure, ws)
        gr = float(ss[data.relevant].max()) if gr is None else gr
        gi = float(ss[data.irrelevant].min()) if gi is None else gi
    delta = spec.sigma if delta is None else delta
    cert = sparsistency_certificate(h, model, float(gr), float(gi), float(delta), ws)
    table = None
    if not cfg["hypergraph"]:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", MaxIterExceeded)
            table = lambda_gap_experiment(spec, model, grid, cfg["seed"], ws, _solver(cfg), data)
    if cfg["format"] == "csv":
        rows = table.rows() if table is not None else []
        write(cfg["out"], to_csv(("lambda", "edge", "kind", "smoothness"), rows))
    else:
        write(cfg["out"], dumps({"config": cfg, "gamma_r": gr, "gamma_i": gi, "delta": delta,
                                 "certificate": cert.to_dict(),
                                 "gap_table": table.to_dict() if table is not None else None,
                                 "metadata": _metadata()}))
    return 0


INGEST_DEFAULTS = {"csv": None, "label_column": None, "drop": [], "id_column": None,
                   "ordinal": None, "out": None}


def cmd_ingest(args) -> int:
    from .experiments.ingest import ingest_categorical_csv

    cfg = resolve(INGEST_DEFAULTS, load_config(args.config), args)
    if isinstance(cfg["drop"], str):
        cfg["drop"] = [c for c in cfg["drop"].split(",") if c]
    if isinstance(cfg["ordinal"], str):
        cfg["ordinal"] = True if cfg["ordinal"] == "sorted" else cfg["ordinal"].split(",")
    echo(cfg)
    if cfg["csv"] is None or cfg["label_column"] is None:
        raise InputError("ingest needs --csv and --label-column")
    res = ingest_categorical_csv(cfg["csv"], cfg["label_column"], cfg["drop"],
                                 cfg["ordinal"], cfg["id_column"])
    out = Path(cfg["out"] or ".")
    write(out / "hypergraph.json", res.h.to_json() + "\n")
    write(out / "labels.csv", to_csv(("node_id", "value"), enumerate(res.Y.tolist())))
    write(out / "nodes.csv", to_csv(("node_id", "source_id"), enumerate(res.node_ids)))
    write(out / "edges.csv", to_csv(("edge", "column", "category", "size"),
                                    [(k, c, v, int(s)) for k, ((c, v), s)
                                     in enumerate(zip(res.edge_labels, res.h.sizes))]))
    sys.stdout.write(dumps({"n": res.h.n, "m": res.h.m,
                            "skipped": [list(s) for s in res.skipped]}))
    return 0


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config; flags override its keys")
    common.add_argument("--out", help="output path (default stdout)")
    common.add_argument("--seed", type=int)

    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("csv", "json"))

    model = argparse.ArgumentParser(add_help=False)
    model.add_argument("--model", choices=MODEL_ORDER)
    model.add_argument("--weights", choices=("unit", "invcard", "explicit"))
    lam = model.add_mutually_exclusive_group()
    lam.add_argument("--lambda", dest="lam", type=float)
    lam.add_argument("--grid", help='e.g. "1e-4..1e2:log7" or "0.1,1,10"')

    p = argparse.ArgumentParser(prog="hypersparse", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", parents=[common, fmt, model], help="fit a model on a labeled hypergraph")
    t.add_argument("--hypergraph")
    t.add_argument("--labels", help="CSV with columns node_id,value")
    t.add_argument("--pin-unlabeled", dest="pin_unlabeled", action="store_const", const=True)
    t.set_defaults(func=cmd_train)

    pr = sub.add_parser("predict", parents=[common, fmt], help="label new nodes from a saved fit")
    pr.add_argument("--fit", help="JSON written by 'train'")
    pr.add_argument("--lambda", dest="lam", type=float)
    pr.add_argument("--edges", help="comma list of edge indices of one new node")
    pr.add_argument("--memberships", help='JSON {"node": [edges...]}')
    pr.add_argument("--model", choices=MODEL_ORDER)
    pr.set_defaults(func=cmd_predict)

    s = sub.add_parser("simulate", parents=[common, fmt, model], help="cross-validated RMSE tables")
    s.add_argument("--sweep", help='e.g. "n_irrelevant=1,2,3"')
    s.add_argument("--n-irrelevant", dest="n_irrelevant", type=int)
    s.add_argument("--noisy", type=int, help="noisy nodes per relevant edge")
    s.add_argument("--folds", type=int)
    s.add_argument("--repeats", type=int)
    s.add_argument("--summary", help="JSON summary path")
    s.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("sparsistency", parents=[common, fmt, model],
                        help="admissible lambda range and per-edge gap table")
    sp.add_argument("--gamma-r", dest="gamma_r", type=float)
    sp.add_argument("--gamma-i", dest="gamma_i", type=float)
    sp.add_argument("--delta", type=float)
    sp.add_argument("--hypergraph")
    sp.set_defaults(func=cmd_sparsistency)

    i = sub.add_parser("ingest", parents=[common], help="categorical CSV to hypergraph + labels")
    i.add_argument("--csv")
    i.add_argument("--label-column", dest="label_column")
    i.add_argument("--drop", help="comma list of ignored columns")
    i.add_argument("--id-column", dest="id_column")
    i.add_argument("--ordinal", help='"sorted" or a comma list of label categories in order')
    i.set_defaults(func=cmd_ingest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SingularSystem as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_SINGULAR
    except SolverError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_NOT_CONVERGED
    except (InputError, HypergraphError, ValueError) as exc:
        # ingest errors and bad enum values are ValueErrors too
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
