"""Shared plumbing for the experiment scripts."""

import argparse
import json
from pathlib import Path

import numpy as np

from hypersparse.cli import dumps, to_csv
from hypersparse.experiments.cv import CvSpec

ROW_HEADER = ("setting", "value", "model", "lambda", "fold", "repeat", "rmse")


def parser(description: str, repeats: int = 10) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--repeats", type=int, default=repeats)
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="results", help="output directory")
    return p


def cv_spec(args) -> CvSpec:
    return CvSpec(folds=args.folds, repeats=args.repeats, seed=args.seed)


def save_sweep(res, args, name: str) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.csv").write_text(to_csv(ROW_HEADER, res.rows()))
    (out / f"{name}.summary.json").write_text(dumps({"summary": res.summary(),
                                                     "args": vars(args)}))
    table = res.best_rmse()
    print(f"{res.setting:>16} " + " ".join(f"{m.value:>8}" for m in res.models))
    for v, row in zip(res.values, table):
        print(f"{v!s:>16} " + " ".join(f"{x:8.4f}" for x in row))
    for m in res.models:
        print(f"strictly lowest per repeat, {m.value}: {res.wins(m)}")


def save_json(doc, args, name: str) -> None:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{name}.json").write_text(dumps(doc))
