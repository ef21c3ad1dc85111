"""Simulation, cross-validation and data-ingestion harnesses."""

from .cv import EXPERIMENT_SOLVER, CvResult, CvSpec, cross_validate, fold_assignment, rmse
from .gap import GAP_SPEC, GapResult, lambda_gap_experiment
from .ingest import (EmptyData, Ingested, IngestError, MissingLabelColumn, ParseError,
                     ingest_categorical_csv, lenses_path, load_lenses)
from .montecarlo import MonteCarloReport, monte_carlo_lemmas
from .simulation import SimData, SimSpec, gen_simulation, make_rng
from .sweeps import (ALL_MODELS, IRRELEVANT_SWEEP, MIXED_SWEEP, NOISY_SWEEP, SweepResult,
                     run_sweep)
