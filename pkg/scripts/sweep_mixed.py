"""Noisy-node sweep with five irrelevant edges: best CV RMSE of all four models."""

from _common import cv_spec, parser, save_sweep
from hypersparse.experiments.sweeps import MIXED_SWEEP, run_sweep


def main():
    p = parser(__doc__)
    p.add_argument("--values", type=lambda s: [int(v) for v in s.split(",")],
                   help="override the sweep values, e.g. 1,5,10")
    args = p.parse_args()
    setting, values, base = MIXED_SWEEP
    res = run_sweep(setting, args.values or values, base, cv=cv_spec(args), seed=args.seed)
    save_sweep(res, args, "sweep_mixed")


if __name__ == "__main__":
    main()
