"""Datasets, CSV input/output, seeded synthetic generators and T/S splits.

Random streams
--------------
Every random draw goes through :func:`make_rng`, which feeds a tuple of
non-negative integers (a base seed followed by any run/size indices) into
``numpy.random.SeedSequence`` and builds a ``PCG64`` generator from it.
``SeedSequence`` hashes its whole entropy tuple, so ``make_rng(seed, run)``
gives an independent, reproducible stream per run no matter which worker
executes it.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy import stats

__all__ = [
    "CsvFormatError",
    "Dataset",
    "SplitPlan",
    "Split",
    "draw_labeled",
    "gen_gaussian",
    "gen_halfspace",
    "gen_ring",
    "load_csv",
    "make_rng",
    "partition",
    "split",
    "write_csv",
    "GENERATORS",
]

_UINT64 = (1 << 64) - 1


def make_rng(*keys: int) -> np.random.Generator:
    entropy = [int(k) & _UINT64 for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


class CsvFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Dataset:
    """``N`` points in ``n`` dimensions with optional class-membership flags."""

    points: np.ndarray
    truth: np.ndarray | None = None
    name: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.array(self.points, dtype=float, copy=True)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2 or X.shape[0] < 1:
            raise ValueError("a dataset needs at least one point")
        if not np.all(np.isfinite(X)):
            raise ValueError("dataset contains non-finite values")
        X.setflags(write=False)
        object.__setattr__(self, "points", X)
        if self.truth is not None:
            t = np.array(self.truth, dtype=bool, copy=True).ravel()
            if t.shape[0] != X.shape[0]:
                raise ValueError(f"truth has {t.shape[0]} entries for {X.shape[0]} points")
            t.setflags(write=False)
            object.__setattr__(self, "truth", t)

    def __len__(self):
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def subset(self, indices) -> "Dataset":
        idx = np.asarray(indices, dtype=np.intp)
        truth = None if self.truth is None else self.truth[idx]
        return Dataset(self.points[idx], truth, self.name, dict(self.meta))


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def load_csv(path, *, has_header: bool | None = None, label_col: int | None = None,
             member_value: float | None = None, delimiter: str = ",") -> Dataset:
    """Read a comma-delimited numeric file.

    ``has_header=None`` treats the first line as a header when any of its
    cells is not a number.  The optional ``label_col`` (negative indices
    count from the end) is removed from the features and turned into truth
    flags: nonzero means member, or equality with ``member_value`` when one
    is given.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh, delimiter=delimiter), start=1)
                if r and any(c.strip() for c in r)]
    if not rows:
        raise CsvFormatError(f"{path}: no rows")
    if has_header is None:
        has_header = not all(_is_number(c) for c in rows[0][1])
    if has_header:
        rows = rows[1:]
        if not rows:
            raise CsvFormatError(f"{path}: no rows")

    width = len(rows[0][1])
    data = np.empty((len(rows), width))
    for k, (lineno, row) in enumerate(rows):
        if len(row) != width:
            raise CsvFormatError(f"{path}:{lineno}: expected {width} columns, found {len(row)}")
        for j, cell in enumerate(row):
            try:
                data[k, j] = float(cell)
            except ValueError:
                raise CsvFormatError(
                    f"{path}:{lineno}: column {j + 1} is not numeric: {cell.strip()!r}") from None

    truth = None
    if label_col is not None:
        col = label_col + width if label_col < 0 else label_col
        if not 0 <= col < width:
            raise CsvFormatError(f"{path}: label column {label_col} out of range for {width} columns")
        labels = data[:, col]
        truth = labels == member_value if member_value is not None else labels != 0
        data = np.delete(data, col, axis=1)
    if data.shape[1] == 0:
        raise CsvFormatError(f"{path}: no feature columns")
    return Dataset(data, truth, name=os.path.basename(str(path)))


def write_csv(dataset: Dataset, path) -> None:
    """Write ``label,x0,..`` rows (label omitted without truth), 9 significant digits."""
    n = dataset.dim
    header = ([] if dataset.truth is None else ["label"]) + [f"x{k}" for k in range(n)]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i, row in enumerate(dataset.points):
            cells = [f"{v:.9g}" for v in row]
            if dataset.truth is not None:
                cells.insert(0, "1" if dataset.truth[i] else "0")
            w.writerow(cells)


def _unit_vector(rng, dim):
    v = rng.normal(size=dim)
    return v / np.linalg.norm(v)


def _assemble(rng, cls_pts, other_pts, name, meta):
    X = np.vstack([cls_pts, other_pts])
    truth = np.concatenate([np.ones(len(cls_pts), bool), np.zeros(len(other_pts), bool)])
    order = rng.permutation(len(X))
    return Dataset(X[order], truth[order], name, meta)


def _rejection(rng, draw, accept, count, batch):
    out, have = [], 0
    while have < count:
        Z = draw(batch)
        Z = Z[accept(Z)]
        out.append(Z)
        have += len(Z)
    return np.vstack(out)[:count]


def gen_halfspace(seed: int, n_class: int, n_other: int, dim: int = 2) -> Dataset:
    """One isotropic Gaussian cloud cut by a random hyperplane.

    Class points lie at least ``0.1`` above the cut and the rest at least
    ``0.1`` below, a gap of 0.2 cloud standard deviations.  The cut height
    is the normal quantile matching the requested class fraction.
    """
    if n_class < 1 or n_other < 1 or dim < 1:
        raise ValueError("counts and dimension must be positive")
    rng = make_rng(seed)
    normal = _unit_vector(rng, dim)
    center = rng.uniform(-2.0, 2.0, size=dim)
    cut = float(stats.norm.ppf(n_other / (n_class + n_other)))
    half_gap = 0.1
    draw = lambda k: rng.normal(size=(k, dim))
    cls_pts = _rejection(rng, draw, lambda Z: Z @ normal >= cut + half_gap, n_class, 4 * n_class + 64)
    oth_pts = _rejection(rng, draw, lambda Z: Z @ normal <= cut - half_gap, n_other, 4 * n_other + 64)
    # hyperplane normal @ x + offset = 0 in data coordinates
    meta = {"normal": normal, "offset": -cut - float(normal @ center), "margin": half_gap}
    return _assemble(rng, cls_pts + center, oth_pts + center, "halfspace", meta)


def _random_spd(rng, dim, max_condition=10.0):
    Q, _ = np.linalg.qr(rng.normal(size=(dim, dim)))
    eig = rng.uniform(1.0, max_condition, size=dim)
    eig[0], eig[-1] = 1.0, max_condition if dim > 1 else 1.0
    return (Q * eig) @ Q.T / max_condition


def gen_gaussian(seed: int, n_class: int, n_other: int, dim: int = 2) -> Dataset:
    """Gaussian class inside a uniform box of non-members.

    The class covariance is a random SPD matrix with condition number 10
    (scaled so its largest eigenvalue is 1).  Non-members are uniform over
    a box of half-width 4 around the class mean, excluding the ellipsoid
    that holds 99% of the class mass.
    """
    if n_class < 1 or n_other < 1 or dim < 1:
        raise ValueError("counts and dimension must be positive")
    rng = make_rng(seed)
    mean = rng.uniform(-2.0, 2.0, size=dim)
    cov = _random_spd(rng, dim)
    prec = np.linalg.inv(cov)
    radius2 = float(stats.chi2.ppf(0.99, dim))
    cls_pts = rng.multivariate_normal(mean, cov, size=n_class, method="cholesky")
    maha = lambda Z: np.einsum("ij,jk,ik->i", Z - mean, prec, Z - mean)
    draw = lambda k: mean + rng.uniform(-4.0, 4.0, size=(k, dim))
    oth_pts = _rejection(rng, draw, lambda Z: maha(Z) > radius2, n_other, 2 * n_other + 64)
    meta = {"mean": mean, "cov": cov, "radius2": radius2}
    return _assemble(rng, cls_pts, oth_pts, "gaussian", meta)


def _ball_shell(rng, k, dim, r_in, r_out):
    u = rng.uniform(size=k)
    r = (r_in ** dim + u * (r_out ** dim - r_in ** dim)) ** (1.0 / dim)
    d = rng.normal(size=(k, dim))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    return d * r[:, None]


def gen_ring(seed: int, n_class: int, n_other: int, dim: int = 2) -> Dataset:
    """Class uniform in the unit ball, others uniform in the shell 1.5 <= |x| <= 2.5."""
    if n_class < 1 or n_other < 1 or dim < 1:
        raise ValueError("counts and dimension must be positive")
    rng = make_rng(seed)
    cls_pts = _ball_shell(rng, n_class, dim, 0.0, 1.0)
    oth_pts = _ball_shell(rng, n_other, dim, 1.5, 2.5)
    meta = {"inner_radius": 1.0, "annulus": (1.5, 2.5)}
    return _assemble(rng, cls_pts, oth_pts, "ring", meta)


GENERATORS = {"halfspace": gen_halfspace, "gaussian": gen_gaussian, "ring": gen_ring}


@dataclass(frozen=True)
class SplitPlan:
    """Random division into a pool ``T`` and an evaluation set ``S``.

    ``s_size=None`` puts every point outside ``T`` into ``S``.
    """

    seed: int
    labeled_count: int
    t_size: int
    s_size: int | None = None

    def __post_init__(self):
        if self.labeled_count < 1:
            raise ValueError("labeled_count must be at least 1")
        if self.t_size < 1:
            raise ValueError("t_size must be at least 1")


class Split(NamedTuple):
    pool: np.ndarray
    evaluation: np.ndarray
    labeled: np.ndarray


def draw_labeled(dataset: Dataset, pool, count: int, rng: np.random.Generator) -> np.ndarray:
    """Sorted indices of ``count`` class members drawn without replacement from ``pool``."""
    if dataset.truth is None:
        raise ValueError("drawing a labeled sample needs truth labels")
    pool = np.asarray(pool, dtype=np.intp)
    members = pool[dataset.truth[pool]]
    if count > len(members):
        raise ValueError(f"requested {count} labeled points but the pool holds only "
                         f"{len(members)} class members")
    return np.sort(rng.choice(members, size=count, replace=False))


def partition(n: int, t_size: int, s_size: int | None, rng: np.random.Generator):
    """Sorted disjoint index sets ``T`` (size ``t_size``) and ``S`` drawn from ``range(n)``."""
    s_size = n - t_size if s_size is None else s_size
    if t_size + s_size > n or s_size < 1:
        raise ValueError(f"split sizes {t_size}+{s_size} do not fit {n} points")
    perm = rng.permutation(n)
    return np.sort(perm[:t_size]), np.sort(perm[t_size: t_size + s_size])


def split(dataset: Dataset, plan: SplitPlan) -> Split:
    """Partition into ``T``/``S`` and draw the labeled sample from ``T`` members, one stream."""
    rng = make_rng(plan.seed)
    pool, evaluation = partition(len(dataset), plan.t_size, plan.s_size, rng)
    labeled = draw_labeled(dataset, pool, plan.labeled_count, rng)
    return Split(pool, evaluation, labeled)
