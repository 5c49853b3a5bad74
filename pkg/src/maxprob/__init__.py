"""Transductive one-class labeling by maximal-mass fuzzy sets with a prescribed mean.

Modules
-------
lp
    Bounded-variable two-phase revised simplex with a solution certifier.
features
    Sample means, second-order enrichment and kernel evaluations.
classifier
    Builds and solves the maximal-mass program in linear, second-order
    or kernel feature space.
data
    Datasets, CSV input/output, synthetic generators and splits.
evaluation
    Precision/recall and the labeled-sample-size sweep.
"""

from .classifier import (EpsilonPolicy, FuzzyLabeling, Hyperplane, InfeasibleError,
                         IterationLimitError, Mode, ModeConfig, SolveError, build_problem,
                         harden, recover_hyperplane, transduce)
from .data import Dataset, SplitPlan, load_csv, make_rng, split, write_csv
from .features import KernelSpec, sample_mean
from .lp import LpProblem, LpSolution, LpStatus, Tolerances, certify, solve

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "EpsilonPolicy",
    "FuzzyLabeling",
    "Hyperplane",
    "InfeasibleError",
    "IterationLimitError",
    "KernelSpec",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "Mode",
    "ModeConfig",
    "SolveError",
    "SplitPlan",
    "Tolerances",
    "build_problem",
    "certify",
    "harden",
    "load_csv",
    "make_rng",
    "recover_hyperplane",
    "sample_mean",
    "solve",
    "split",
    "transduce",
    "write_csv",
]
