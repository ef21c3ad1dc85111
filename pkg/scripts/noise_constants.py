"""Monte Carlo check of the half-normal constants and tail events used by the noise bounds."""

from _common import parser, save_json
from hypersparse.experiments.montecarlo import monte_carlo_lemmas


def main():
    p = parser(__doc__)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--delta", type=float, default=1.0)
    args = p.parse_args()
    rep = monte_carlo_lemmas(args.delta, args.samples, args.seed)
    print(f"mean |x| = {rep.mean_abs:.5f} (expected {rep.expected_mean_abs:.5f})")
    for c in rep.cantelli:
        tag = "" if c.checked else "  (informational)"
        print(f"{c.form:>4} g={c.group:<3} t={c.t:<4} freq={c.frequency:.4f} bound={c.bound:.4f} "
              f"ok={c.ok}{tag}")
    print("median max|x| by n:", dict(zip(rep.growth_sizes, rep.growth_medians)))
    save_json(rep.to_dict(), args, "noise_constants")


if __name__ == "__main__":
    main()
