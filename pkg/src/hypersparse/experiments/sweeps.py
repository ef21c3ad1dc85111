"""Model comparisons over a sweep of one simulation setting."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from ..admm import MaxIterExceeded
from ..models import ModelKind
from .cv import CvResult, CvSpec, cross_validate
from .simulation import SimSpec, gen_simulation

ALL_MODELS = tuple(ModelKind)

# irrelevant-edge sweep without noisy nodes
IRRELEVANT_SWEEP = ("n_irrelevant", tuple(range(1, 11)), SimSpec())
# noisy-node sweep without irrelevant edges
NOISY_SWEEP = ("noisy_per_edge", (2, 4, 6, 8, 10), SimSpec())
# noisy-node sweep on top of five irrelevant edges
MIXED_SWEEP = ("noisy_per_edge", (2, 4, 6, 8, 10), SimSpec(n_irrelevant=5))


@dataclass
class SweepResult:
    setting: str
    values: tuple
    models: tuple
    results: dict = field(default_factory=dict)   # (value, model) -> CvResult

    def best_rmse(self) -> np.ndarray:
        """values x models table of best mean RMSE."""
        return np.array([[self.results[v, m].best_rmse for m in self.models] for v in self.values])

    def per_repeat_best(self, value) -> np.ndarray:
        """repeats x models: each repeat's lowest RMSE over the grid."""
        return np.column_stack([np.nanmin(self.results[value, m].rmse, axis=1)
                                for m in self.models])

    def wins(self, model) -> list[int]:
        """Per sweep value, the number of repeats where ``model`` is strictly lowest."""
        model = ModelKind.parse(model)
        j = self.models.index(model)
        out = []
        for v in self.values:
            tab = self.per_repeat_best(v)
            others = np.delete(tab, j, axis=1)
            out.append(int(np.sum(tab[:, j] < others.min(axis=1))))
        return out

    def rows(self):
        for v in self.values:
            for m in self.models:
                for (name, lam, fold, rep, err) in self.results[v, m].rows:
                    yield (self.setting, v, name, lam, fold, rep, err)

    def summary(self) -> list[dict]:
        out = []
        for v in self.values:
            for m in self.models:
                res: CvResult = self.results[v, m]
                s = res.summary()
                s.update({"setting": self.setting, "value": v,
                          "best_rmse_per_repeat": np.nanmin(res.rmse, axis=1).tolist()})
                out.append(s)
        return out


def run_sweep(setting: str | None, values, base: SimSpec = SimSpec(), models=ALL_MODELS,
              cv: CvSpec | None = None, seed: int = 0, weights=None) -> SweepResult:
    """Cross-validate every model on one generated instance per sweep value.

    ``weights`` is one scheme for all models, a dict keyed by model value, or
    None for each model's default.
    """
    cv = cv or CvSpec()
    models = tuple(ModelKind.parse(m) for m in models)
    values = tuple(values) if setting is not None else (None,)
    out = SweepResult(setting or "", values, models)
    for v in values:
        spec = replace(base, **{setting: v}) if setting is not None else base
        data = gen_simulation(spec, seed)
        for m in models:
            ws = weights.get(m.value) if isinstance(weights, dict) else weights
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", MaxIterExceeded)
                out.results[v, m] = cross_validate(data.h, data.Y, m, cv, ws=ws)
    return out
