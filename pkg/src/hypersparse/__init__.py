"""Smooth and sparsely smooth regression on hypergraphs."""

from .admm import (AdmmConfig, Diagnostics, MaxIterExceeded, Problem, SingularSystem,
                   Solution, SolverError, admm_solve, kkt_residual, solve_dense)
from .hypergraph import (DegenerateEdge, GrowthStats, Hyperedge, Hypergraph, HypergraphError,
                         MissingWeight, NegativeWeight, OutOfRangeNode, WeightScheme,
                         clique_expansion, growth_stats, star_expansion, validate)
from .learners import (DEFAULT_GRID, EmptyMembership, FitResult, LearnerConfig,
                       SparsistencyCertificate, SupportReport, classify_support, fit,
                       lambda_path, predict_out_of_sample, sparsistency_certificate)
from .models import ModelKind
from .prox import project_l1_ball, prox_l1, prox_linf, prox_sql1
from .smoothness import (CombinatorSpec, EmptyHypergraphWarning, LpNorm, edge_values,
                         sh_general, ss1, ss2, ss_dense)

__version__ = "0.1.0"
