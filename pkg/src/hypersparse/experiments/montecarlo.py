"""Monte Carlo checks of the half-normal constants behind the noise bounds.

With ``x_i ~ N(0, delta^2)`` the magnitudes ``|x_i|`` are half-normal with
mean ``delta sqrt(2/pi)`` and standard deviation ``delta sqrt(1 - 2/pi)``.
Cantelli's inequality gives ``P(X - E X < t sd) >= t^2 / (1 + t^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .simulation import make_rng

T_VALUES = (0.5, 1.0, 2.0)
GROUP_SIZES = (1, 4, 16)
GROWTH_SIZES = (10, 100, 1000, 10000)


@dataclass
class CantelliCheck:
    form: str            # "mean" (sum of |x|) or "max"
    group: int           # variables per event
    t: float
    bound: float
    frequency: float
    stderr: float
    trials: int
    checked: bool = True  # False for rows reported for information only

    @property
    def ok(self) -> bool:
        return self.frequency >= self.bound - 3.0 * self.stderr


@dataclass
class MonteCarloReport:
    delta: float
    n_samples: int
    mean_abs: float
    expected_mean_abs: float
    cantelli: list[CantelliCheck] = field(default_factory=list)
    growth_sizes: tuple = GROWTH_SIZES
    growth_medians: list[float] = field(default_factory=list)

    @property
    def mean_error(self) -> float:
        return abs(self.mean_abs - self.expected_mean_abs)

    @property
    def cantelli_ok(self) -> bool:
        return all(c.ok for c in self.cantelli if c.checked)

    @property
    def growth_ok(self) -> bool:
        return bool(np.all(np.diff(self.growth_medians) > 0))

    def to_dict(self) -> dict:
        return {"delta": self.delta, "n_samples": self.n_samples,
                "mean_abs": self.mean_abs, "expected_mean_abs": self.expected_mean_abs,
                "cantelli": [dict(vars(c), ok=c.ok) for c in self.cantelli],
                "growth_sizes": list(self.growth_sizes),
                "growth_medians": self.growth_medians,
                "cantelli_ok": self.cantelli_ok, "growth_ok": self.growth_ok}


def _freq(event: np.ndarray) -> tuple[float, float]:
    p = float(event.mean())
    return p, math.sqrt(max(p * (1 - p), 1e-300) / event.size)


def monte_carlo_lemmas(delta: float = 1.0, n_samples: int = 10**6, seed: int = 0,
                       t_values=T_VALUES, groups=GROUP_SIZES, growth_sizes=GROWTH_SIZES,
                       growth_trials: int = 201) -> MonteCarloReport:
    """Empirical half-normal mean, Cantelli event frequencies and max-growth medians.

    Checked Cantelli rows use the averaged form: for a group of ``g`` draws,
    ``mean|x| - delta sqrt(2/pi) <= t delta sqrt((pi - 2) / (pi g))`` has
    probability at least ``t^2 / (1 + t^2)``. Rows of form ``"max"`` evaluate
    ``max|x| < delta sqrt(2/pi) + t delta sqrt((pi - 2) / (pi g))`` against
    ``(t^2 / (1 + t^2))^g``; they are informational for ``g > 1``.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    mean = delta * math.sqrt(2.0 / math.pi)
    sd = delta * math.sqrt(1.0 - 2.0 / math.pi)
    x = np.abs(delta * make_rng(seed, 0).standard_normal(n_samples))
    report = MonteCarloReport(delta, n_samples, float(x.mean()), mean,
                              growth_sizes=tuple(growth_sizes))

    for g in groups:
        trials = n_samples // g
        if trials == 0:
            continue
        block = x[: trials * g].reshape(trials, g)
        avg, mx = block.mean(axis=1), block.max(axis=1)
        for t in t_values:
            base = t * t / (1.0 + t * t)
            slack = t * sd / math.sqrt(g)
            p, se = _freq(avg - mean <= slack)
            report.cantelli.append(CantelliCheck("mean", g, t, base, p, se, trials))
            p, se = _freq(mx < mean + slack)
            report.cantelli.append(CantelliCheck("max", g, t, base ** g, p, se, trials,
                                                 checked=g == 1))

    rng = make_rng(seed, 1)
    for size in growth_sizes:
        maxima = np.abs(delta * rng.standard_normal((growth_trials, size))).max(axis=1)
        report.growth_medians.append(float(np.median(maxima)))
    return report
