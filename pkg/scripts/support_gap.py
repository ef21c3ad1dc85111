"""Per-edge smoothness of the joint model along the lambda grid (5 relevant / 5 irrelevant edges)."""

from pathlib import Path

import numpy as np

from _common import parser, save_json
from hypersparse.cli import to_csv
from hypersparse.experiments.gap import GAP_SPEC, lambda_gap_experiment


def main():
    args = parser(__doc__).parse_args()
    res = lambda_gap_experiment(GAP_SPEC, "joint", seed=args.seed)
    save_json(res.to_dict(), args, "support_gap")
    (Path(args.out) / "support_gap.csv").write_text(
        to_csv(("lambda", "edge", "kind", "smoothness"), res.rows()))
    np.set_printoptions(precision=4, linewidth=150)
    for lam, row, gap, ok in zip(res.grid, res.smoothness, res.gaps, res.recovered()):
        print(f"lambda={lam:8.0e} gap={gap:+.4f} recovered={ok!s:5} {row}")


if __name__ == "__main__":
    main()
