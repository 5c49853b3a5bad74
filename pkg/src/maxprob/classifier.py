"""Maximal-mass fuzzy sets with a prescribed mean, found by linear programming.

Given points ``x_1..x_N`` and a labeled sample of class members, the class
estimate is the vector ``h`` in [0, 1]^N of largest total mass whose
(weighted) mean of every constrained feature equals the labeled sample's
mean up to a tolerance band::

    maximize    sum_i h_i
    subject to  |sum_i (f_k(x_i) - alpha_k) h_i| <= eps_k * N   for every feature k
                0 <= h_i <= 1

Features ``f_k`` are the raw coordinates (``Mode.LINEAR``), coordinates
plus pairwise products (``Mode.SECOND_ORDER``) or kernel evaluations
against landmark points (``Mode.KERNEL``).  An optimal vertex is
separable by a hyperplane in feature space; in linear mode that
hyperplane is recovered from the row duals.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import features as F
from .data import Dataset, make_rng
from .lp import LpProblem, LpSolution, LpStatus, Tolerances, solve

__all__ = [
    "EpsilonPolicy",
    "FuzzyLabeling",
    "Hyperplane",
    "InfeasibleError",
    "IterationLimitError",
    "Mode",
    "ModeConfig",
    "SolveError",
    "build_problem",
    "epsilon_band",
    "feature_matrix",
    "harden",
    "recover_hyperplane",
    "transduce",
]


class Mode(str, enum.Enum):
    LINEAR = "linear"
    SECOND_ORDER = "second-order"
    KERNEL = "kernel"


class EpsilonPolicy(str, enum.Enum):
    """How the per-row band ``eps_k`` is chosen when no fixed value is given.

    ``EXACT`` keeps only the numerical floor ``1e-9 * (1 + |alpha_k|)``.
    ``STANDARD_ERROR`` uses ``kappa * spread_k / sqrt(l)``, the standard
    error of the labeled-sample mean of feature ``k``, with the same floor.
    """

    EXACT = "exact"
    STANDARD_ERROR = "standard-error"


# Moment rows with a loose band let the program buy mass by admitting
# non-members whose deviations cancel; kernel rows need slack to stay
# numerically well posed.
_DEFAULT_POLICY = {
    Mode.LINEAR: EpsilonPolicy.EXACT,
    Mode.SECOND_ORDER: EpsilonPolicy.EXACT,
    Mode.KERNEL: EpsilonPolicy.STANDARD_ERROR,
}


@dataclass(frozen=True)
class ModeConfig:
    """Which program to build and how to turn its answer into labels.

    ``epsilon`` fixes the per-point band for every row when given;
    otherwise ``epsilon_policy`` decides, defaulting to ``EXACT`` for the
    moment modes and ``STANDARD_ERROR`` for kernel mode.  Row bounds are
    ``eps_k * N``.  ``landmarks=None`` uses every point as a kernel
    landmark; an integer picks that many at random with ``landmark_seed``.
    """

    mode: Mode = Mode.LINEAR
    kernel: F.KernelSpec = field(default_factory=F.KernelSpec.rbf)
    landmarks: int | None = None
    landmark_seed: int = 0
    epsilon: float | None = None
    epsilon_policy: EpsilonPolicy | None = None
    kappa: float = 1.0
    threshold: float = 0.5
    pin_labeled: bool = True
    standardize: bool = False
    tolerances: Tolerances = field(default_factory=Tolerances)
    max_iterations: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        policy = _DEFAULT_POLICY[self.mode] if self.epsilon_policy is None else self.epsilon_policy
        object.__setattr__(self, "epsilon_policy", EpsilonPolicy(policy))
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.epsilon is not None and self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")
        if self.landmarks is not None and self.landmarks < 1:
            raise ValueError("landmark count must be positive")


class SolveError(RuntimeError):
    def __init__(self, message, solution: LpSolution):
        super().__init__(message)
        self.solution = solution
        self.status = solution.status


class InfeasibleError(SolveError):
    @property
    def residual(self) -> float:
        return self.solution.infeasibility


class IterationLimitError(SolveError):
    pass


@dataclass(eq=False)
class FuzzyLabeling:
    values: np.ndarray
    labeled_indices: np.ndarray
    objective: float
    problem: LpProblem | None = None
    solution: LpSolution | None = None

    @property
    def mass(self) -> float:
        """Estimated class probability ``sum(h) / N``."""
        return self.objective / len(self.values)


@dataclass(frozen=True, eq=False)
class Hyperplane:
    """``normal @ x + offset = 0`` with unit ``normal``; members on the positive side."""

    normal: np.ndarray
    offset: float

    def side(self, X) -> np.ndarray:
        return np.atleast_2d(np.asarray(X, dtype=float)) @ self.normal + self.offset


def _landmark_indices(config: ModeConfig, n_points: int) -> np.ndarray:
    if config.landmarks is None or config.landmarks >= n_points:
        return np.arange(n_points)
    rng = make_rng(config.landmark_seed)
    return np.sort(rng.choice(n_points, size=config.landmarks, replace=False))


def feature_matrix(X, config: ModeConfig, landmark_points=None) -> np.ndarray:
    """Constrained features of each row of ``X``, one column per LP row."""
    if config.mode is Mode.LINEAR:
        return np.asarray(X, dtype=float)
    if config.mode is Mode.SECOND_ORDER:
        return F.enrich_rows(X)
    return F.kernel_matrix(config.kernel, X, landmark_points)


def _resolve_sample(dataset: Dataset, labeled_indices, sample):
    idx = np.asarray([] if labeled_indices is None else labeled_indices, dtype=np.intp).ravel()
    if idx.size and (idx.min() < 0 or idx.max() >= len(dataset)):
        raise IndexError(f"labeled index out of range for {len(dataset)} points")
    if sample is None:
        if idx.size == 0:
            raise ValueError("empty labeled sample")
        sample = dataset.points[idx]
    else:
        sample = np.asarray(sample, dtype=float)
        if sample.ndim == 1:
            sample = sample.reshape(-1, dataset.dim)
        if sample.shape[0] == 0:
            raise ValueError("empty labeled sample")
        if sample.shape[1] != dataset.dim:
            raise ValueError(f"dimension mismatch: sample has {sample.shape[1]} columns, "
                             f"dataset has {dataset.dim}")
    return idx, sample


def epsilon_band(est: F.MeanEstimate, config: ModeConfig) -> np.ndarray:
    """Per-row band ``eps_k`` (before scaling by ``N``)."""
    if config.epsilon is not None:
        return np.full(est.alpha.shape[0], float(config.epsilon))
    floor = 1e-9 * (1.0 + np.abs(est.alpha))
    if config.epsilon_policy is EpsilonPolicy.EXACT:
        return floor
    return np.maximum(config.kappa * est.spread / np.sqrt(est.sample_size), floor)


def build_problem(dataset: Dataset, labeled_indices, config: ModeConfig = ModeConfig(),
                  sample=None) -> LpProblem:
    """Write the maximal-mass program for ``dataset``.

    The mean target comes from ``sample`` when given (labeled points kept
    outside the dataset), otherwise from ``dataset.points[labeled_indices]``.
    With ``config.pin_labeled`` the labeled indices get lower bound 1.
    """
    if len(dataset) < 2:
        raise ValueError("need at least two points")
    idx, sample = _resolve_sample(dataset, labeled_indices, sample)
    X = dataset.points
    if config.standardize:
        scaler = F.Standardizer.fit(X)
        X, sample = scaler(X), scaler(sample)

    landmark_points = None
    if config.mode is Mode.KERNEL:
        landmark_points = X[_landmark_indices(config, len(X))]
    Phi = feature_matrix(X, config, landmark_points)
    Phi_sample = feature_matrix(sample, config, landmark_points)
    est = F.sample_mean(Phi_sample)

    n_points = Phi.shape[0]
    rows = (Phi - est.alpha).T
    eps = epsilon_band(est, config)
    band = eps * n_points

    var_lower = np.zeros(n_points)
    if config.pin_labeled and idx.size:
        var_lower[idx] = 1.0
    return LpProblem(np.ones(n_points), rows, -band, band, var_lower, np.ones(n_points))


def transduce(dataset: Dataset, labeled_indices, config: ModeConfig = ModeConfig(),
              sample=None) -> FuzzyLabeling:
    """Solve for the fuzzy class indicator of every point in ``dataset``.

    Raises ``InfeasibleError`` (carrying the phase-one residual) when no
    set matches the mean within the band, and ``IterationLimitError`` when
    the pivot budget runs out.
    """
    problem = build_problem(dataset, labeled_indices, config, sample)
    solution = solve(problem, max_iterations=config.max_iterations, tolerances=config.tolerances)
    if solution.status is LpStatus.INFEASIBLE:
        raise InfeasibleError(
            f"no fuzzy set matches the labeled mean (phase-one residual "
            f"{solution.infeasibility:.3g}); increase epsilon or kappa", solution)
    if solution.status is not LpStatus.OPTIMAL:
        raise IterationLimitError(f"solver stopped with status {solution.status.value}", solution)
    idx = np.asarray([] if labeled_indices is None else labeled_indices, dtype=np.intp).ravel()
    return FuzzyLabeling(solution.values.copy(), idx, solution.objective_value, problem, solution)


def harden(labeling, threshold: float = 0.5) -> np.ndarray:
    values = labeling.values if isinstance(labeling, FuzzyLabeling) else np.asarray(labeling)
    return values >= threshold


def recover_hyperplane(problem: LpProblem, solution: LpSolution, dataset: Dataset,
                       tol: float = 1e-7) -> Hyperplane:
    """Separating hyperplane of a linear-mode optimum.

    The direction is ``-y / |y|`` for row duals ``y``: a point's reduced
    cost is ``1 - y @ (x - alpha)``, so members lie where ``-y @ x`` is
    large.  The offset is fitted through the fractional points, or placed
    midway between the two hard groups when no point is fractional.
    Pinned (fixed) variables are ignored.
    """
    if solution.status is not LpStatus.OPTIMAL:
        raise ValueError("hyperplane recovery needs an optimal solution")
    X = dataset.points
    if problem.n_rows != X.shape[1]:
        raise ValueError("hyperplane recovery applies to linear-mode problems only")
    y = np.asarray(solution.row_duals, dtype=float)
    norm = np.linalg.norm(y)
    if norm <= 1e-12:
        raise ValueError("no supporting direction recovered")
    normal = -y / norm
    score = X @ normal
    h = solution.values
    free = problem.var_lower < problem.var_upper
    frac = free & (h > tol) & (h < 1.0 - tol)
    ones = free & (h >= 1.0 - tol)
    zeros = free & (h <= tol)
    if frac.any():
        offset = -float(np.mean(score[frac]))
    elif ones.any() and zeros.any():
        offset = -0.5 * float(score[zeros].max() + score[ones].min())
    else:
        raise ValueError("no supporting direction recovered")
    if ones.any() and zeros.any() and np.mean(score[ones]) < np.mean(score[zeros]):
        normal, offset = -normal, -offset
    return Hyperplane(normal, offset)
