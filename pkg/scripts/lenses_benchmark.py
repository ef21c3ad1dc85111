"""Cross-validated RMSE of the four models on the bundled Lenses table."""

import warnings

from _common import cv_spec, parser, save_json
from hypersparse.experiments.cv import cross_validate
from hypersparse.experiments.ingest import load_lenses


def main():
    args = parser(__doc__).parse_args()
    data = load_lenses()
    out = {}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for m in ("dense", "edge", "node", "joint"):
            res = cross_validate(data.h, data.Y, m, cv_spec(args))
            out[m] = res.summary()
            print(f"{m:>6}: best RMSE {res.best_rmse:.4f} +- {res.best_std:.4f} at lambda {res.best_lambda:g}")
    save_json({"n": data.h.n, "m": data.h.m, "results": out, "args": vars(args)}, args, "lenses")


if __name__ == "__main__":
    main()
