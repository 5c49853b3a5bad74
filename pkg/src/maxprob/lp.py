"""Dense two-phase simplex for box-bounded linear programs.

Problems have the form::

    maximize    c @ h
    subject to  row_lower <= A @ h <= row_upper
                var_lower <=     h <= var_upper

Rows are handled through logical variables ``s = A @ h`` that carry the row
bounds directly, so a two-sided row costs one basis slot, not two.  Nonbasic
variables always sit at one of their (finite) bounds.
"""

from __future__ import annotations

import enum
import io
import os
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "CertificateReport",
    "CheckResult",
    "LpProblem",
    "LpSolution",
    "LpStatus",
    "MalformedProblemError",
    "Tolerances",
    "certify",
    "dump_problem",
    "load_problem",
    "solve",
]


class MalformedProblemError(ValueError):
    """Raised when an LP has non-finite data, crossed bounds or bad shapes."""


class LpStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    ITERATION_LIMIT = "ITERATION_LIMIT"


@dataclass(frozen=True)
class Tolerances:
    feasibility: float = 1e-9
    optimality: float = 1e-9
    fraction: float = 1e-7
    pivot: float = 1e-9


def _frozen(a, ndim, name):
    arr = np.array(a, dtype=float, copy=True)
    if arr.ndim != ndim:
        raise MalformedProblemError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LpProblem:
    """Immutable dense LP in ``max c@h, row bounds, box bounds`` form."""

    objective: np.ndarray
    rows: np.ndarray
    row_lower: np.ndarray
    row_upper: np.ndarray
    var_lower: np.ndarray
    var_upper: np.ndarray

    def __post_init__(self):
        c = _frozen(self.objective, 1, "objective")
        n = c.shape[0]
        rows = np.array(self.rows, dtype=float, copy=True)
        if rows.size == 0:
            rows = rows.reshape(0, n)
        rows = _frozen(rows, 2, "rows")
        m = rows.shape[0]
        rl = _frozen(np.reshape(self.row_lower, (m,)) if m == 0 else self.row_lower, 1, "row_lower")
        ru = _frozen(np.reshape(self.row_upper, (m,)) if m == 0 else self.row_upper, 1, "row_upper")
        vl = _frozen(self.var_lower, 1, "var_lower")
        vu = _frozen(self.var_upper, 1, "var_upper")
        if n < 1:
            raise MalformedProblemError("an LP needs at least one variable")
        if rows.shape[1] != n:
            raise MalformedProblemError(f"rows have {rows.shape[1]} columns, objective has {n}")
        if rl.shape != (m,) or ru.shape != (m,):
            raise MalformedProblemError("row bounds must have one entry per row")
        if vl.shape != (n,) or vu.shape != (n,):
            raise MalformedProblemError("variable bounds must have one entry per variable")
        for name, arr in (("objective", c), ("rows", rows), ("row_lower", rl),
                          ("row_upper", ru), ("var_lower", vl), ("var_upper", vu)):
            if not np.all(np.isfinite(arr)):
                raise MalformedProblemError(f"{name} contains non-finite entries")
        if np.any(rl > ru):
            k = int(np.argmax(rl > ru))
            raise MalformedProblemError(f"row {k} has lower bound {rl[k]} above upper bound {ru[k]}")
        if np.any(vl > vu):
            k = int(np.argmax(vl > vu))
            raise MalformedProblemError(f"variable {k} has lower bound {vl[k]} above upper bound {vu[k]}")
        for name, arr in (("objective", c), ("rows", rows), ("row_lower", rl),
                          ("row_upper", ru), ("var_lower", vl), ("var_upper", vu)):
            object.__setattr__(self, name, arr)

    @classmethod
    def box(cls, objective, rows=None, row_lower=None, row_upper=None):
        """Build a problem with all variables in [0, 1]."""
        c = np.asarray(objective, dtype=float)
        n = c.shape[0]
        if rows is None:
            rows, row_lower, row_upper = np.zeros((0, n)), np.zeros(0), np.zeros(0)
        return cls(c, rows, row_lower, row_upper, np.zeros(n), np.ones(n))

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]

    @property
    def n_rows(self) -> int:
        return self.rows.shape[0]

    def activity(self, values) -> np.ndarray:
        return self.rows @ np.asarray(values, dtype=float)

    def scale_row(self, k: int, factor: float) -> "LpProblem":
        """Return a copy with row ``k`` and its bounds multiplied by ``factor > 0``."""
        if factor <= 0:
            raise ValueError("row scale factor must be positive")
        rows = self.rows.copy()
        lo, hi = self.row_lower.copy(), self.row_upper.copy()
        rows[k] *= factor
        lo[k] *= factor
        hi[k] *= factor
        return LpProblem(self.objective, rows, lo, hi, self.var_lower, self.var_upper)


@dataclass(eq=False)
class LpSolution:
    status: LpStatus
    values: np.ndarray
    objective_value: float
    row_duals: np.ndarray
    basis: tuple
    iterations: int = 0
    infeasibility: float = 0.0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL

    def fractional_count(self, problem: LpProblem, threshold: float = 1e-7) -> int:
        v = self.values
        inside = (v > problem.var_lower + threshold) & (v < problem.var_upper - threshold)
        return int(np.count_nonzero(inside))


_AT_LOWER, _AT_UPPER, _BASIC = 0, 1, 2


class _Simplex:
    """Working state of one solve; never shared between calls."""

    refactor_every = 64
    # consecutive degenerate pivots (per variable and row) before Bland's rule
    bland_factor = 5

    def __init__(self, problem: LpProblem, tol: Tolerances, max_iterations: int):
        self.p = problem
        self.tol = tol
        self.max_iterations = max_iterations
        n, m = problem.n_vars, problem.n_rows
        self.n, self.m = n, m
        A = problem.rows
        c = problem.objective

        # start at the bounds the objective prefers unless all-lower is less infeasible
        h0, act, s0, resid = None, None, None, None
        for start in (np.where(c > 0, problem.var_upper, problem.var_lower), problem.var_lower):
            a = A @ start
            s = np.clip(a, problem.row_lower, problem.row_upper)
            if resid is None or np.abs(a - s).sum() < np.abs(resid).sum():
                h0, act, s0, resid = start, a, s, a - s

        sign = np.where(resid > 0, 1.0, -1.0)
        self.M = np.hstack([A, -np.eye(m), -np.diag(sign) if m else np.zeros((0, 0))])
        self.lower = np.concatenate([problem.var_lower, problem.row_lower, np.zeros(m)])
        self.upper = np.concatenate([problem.var_upper, problem.row_upper, np.full(m, np.inf)])
        self.x = np.concatenate([h0, s0, np.abs(resid)])
        self.state = np.concatenate([
            np.where(h0 >= problem.var_upper, _AT_UPPER, _AT_LOWER),
            np.where(s0 >= problem.row_upper, _AT_UPPER, _AT_LOWER),
            np.full(m, _AT_LOWER),
        ]).astype(np.int8)

        self.scale = 1.0 + (np.abs(A).sum(axis=1).max() if m else 0.0)
        satisfied = np.abs(resid) <= tol.feasibility * self.scale
        basis = []
        for r in range(m):
            if satisfied[r]:
                # row already satisfied: its logical is basic, artificial fixed at 0
                j = n + r
                self.upper[n + m + r] = 0.0
                self.x[n + m + r] = 0.0
            else:
                j = n + m + r
            basis.append(j)
            self.state[j] = _BASIC
        self.basis = np.array(basis, dtype=np.intp)
        self.iterations = 0
        self._refactor()

    def _refactor(self):
        B = self.M[:, self.basis]
        self.Binv = np.linalg.inv(B) if self.m else np.zeros((0, 0))
        nonbasic = self.state != _BASIC
        rhs = -(self.M[:, nonbasic] @ self.x[nonbasic])
        self.x[self.basis] = self.Binv @ rhs
        self._since_refactor = 0

    def _duals(self, cost):
        return self.Binv.T @ cost[self.basis]

    def run(self, cost) -> LpStatus:
        tol = self.tol
        degenerate_run = 0
        bland_after = self.bland_factor * (self.m + self.n)
        while True:
            y = self._duals(cost)
            d = cost - self.M.T @ y
            free = self.lower < self.upper
            eligible = free & (
                ((self.state == _AT_LOWER) & (d > tol.optimality))
                | ((self.state == _AT_UPPER) & (d < -tol.optimality))
            )
            if not eligible.any():
                return LpStatus.OPTIMAL
            if self.iterations >= self.max_iterations:
                return LpStatus.ITERATION_LIMIT
            candidates = np.flatnonzero(eligible)
            if degenerate_run >= bland_after:
                q = int(candidates[0])
            else:
                q = int(candidates[np.argmax(np.abs(d[candidates]))])
            step = self._pivot(q, bland=degenerate_run >= bland_after)
            if step is None:
                return LpStatus.UNBOUNDED
            self.iterations += 1
            degenerate_run = degenerate_run + 1 if step <= tol.feasibility else 0

    def _pivot(self, q, bland=False):
        """Move entering variable ``q`` as far as possible; return the step length.

        Ratio-test ties go to the largest pivot element (smallest basic index
        among equals); under Bland's rule they go to the smallest index only.
        """
        direction = 1.0 if self.state[q] == _AT_LOWER else -1.0
        alpha = self.Binv @ self.M[:, q]
        delta = direction * alpha
        xb = self.x[self.basis]
        lb = self.lower[self.basis]
        ub = self.upper[self.basis]
        piv = self.tol.pivot * max(1.0, float(np.abs(alpha).max(initial=0.0)))

        ratios = np.full(self.m, np.inf)
        dec = delta > piv
        inc = delta < -piv
        ratios[dec] = np.maximum(xb[dec] - lb[dec], 0.0) / delta[dec]
        up_finite = inc & np.isfinite(ub)
        ratios[up_finite] = np.maximum(ub[up_finite] - xb[up_finite], 0.0) / -delta[up_finite]

        flip = self.upper[q] - self.lower[q]
        t_basic = ratios.min() if self.m else np.inf
        if flip <= t_basic:
            t = flip
            leave = -1
        else:
            t = t_basic
            ties = np.flatnonzero(ratios <= t_basic + 1e-12 * (1.0 + t_basic))
            if not bland:
                mag = np.abs(delta[ties])
                ties = ties[mag >= mag.max()]
            leave = int(ties[np.argmin(self.basis[ties])])
        if not np.isfinite(t):
            return None

        self.x[self.basis] = xb - t * delta
        self.x[q] += direction * t
        if leave < 0:
            self.state[q] = _AT_UPPER if direction > 0 else _AT_LOWER
            self.x[q] = self.upper[q] if direction > 0 else self.lower[q]
            return t

        p = int(self.basis[leave])
        to_lower = delta[leave] > 0
        self.x[p] = self.lower[p] if to_lower else self.upper[p]
        self.state[p] = _AT_LOWER if to_lower else _AT_UPPER
        if p >= self.n + self.m:
            # an artificial that left the basis never comes back
            self.upper[p] = 0.0
            self.x[p] = 0.0
            self.state[p] = _AT_LOWER
        self.basis[leave] = q
        self.state[q] = _BASIC

        pivot_row = self.Binv[leave] / alpha[leave]
        self.Binv -= np.outer(alpha, pivot_row)
        self.Binv[leave] = pivot_row
        self._since_refactor += 1
        if self._since_refactor >= self.refactor_every:
            self._refactor()
        return t

    def artificial_total(self) -> float:
        k = self.n + self.m
        return float(np.sum(np.abs(self.x[k:])))


def solve(problem: LpProblem, *, max_iterations: int | None = None,
          tolerances: Tolerances = Tolerances()) -> LpSolution:
    """Solve ``problem`` with a two-phase bounded-variable revised simplex.

    Dantzig pricing is used until ``5 * (m + N)`` consecutive degenerate
    pivots occur, after which Bland's smallest-index rule takes over until
    the next non-degenerate step.  Ratio-test ties go to the largest pivot
    element, then to the smallest basic index (smallest index alone under
    Bland's rule).

    Returns an ``LpSolution``; an exhausted pivot budget yields status
    ``ITERATION_LIMIT`` rather than an exception.
    """
    if not isinstance(problem, LpProblem):
        raise MalformedProblemError("solve() expects an LpProblem")
    n, m = problem.n_vars, problem.n_rows
    if max_iterations is None:
        max_iterations = 50 * (n + m) + 1000
    sx = _Simplex(problem, tolerances, max_iterations)
    k = n + m

    phase1_cost = np.zeros(n + 2 * m)
    phase1_cost[k:] = -1.0
    if sx.artificial_total() > 0.0:
        status = sx.run(phase1_cost)
        sx._refactor()
        if status is not LpStatus.OPTIMAL:
            return _finish(sx, status, phase1_cost)
    infeasibility = sx.artificial_total()
    if infeasibility > tolerances.feasibility * sx.scale:
        sol = _finish(sx, LpStatus.INFEASIBLE, phase1_cost)
        sol.infeasibility = infeasibility
        return sol

    sx.upper[k:] = 0.0
    cost = np.zeros(n + 2 * m)
    cost[:n] = problem.objective
    status = sx.run(cost)
    sol = _finish(sx, status, cost)
    sol.infeasibility = infeasibility
    return sol


def _finish(sx: _Simplex, status: LpStatus, cost) -> LpSolution:
    sx._refactor()
    p = sx.p
    values = np.clip(sx.x[: sx.n], p.var_lower, p.var_upper)
    duals = sx._duals(cost) if sx.m else np.zeros(0)
    return LpSolution(
        status=status,
        values=values,
        objective_value=float(p.objective @ values),
        row_duals=duals,
        basis=tuple(int(j) for j in sx.basis),
        iterations=sx.iterations,
    )


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst_violation: float
    detail: str = ""


@dataclass(frozen=True)
class CertificateReport:
    checks: tuple = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def worst_violation(self) -> float:
        return max((c.worst_violation for c in self.checks), default=0.0)

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


def certify(problem: LpProblem, solution: LpSolution,
            tolerances: Tolerances = Tolerances()) -> CertificateReport:
    """Re-check a claimed optimum without trusting any solver state.

    Checks row feasibility, bound feasibility, the vertex fractionality
    bound and complementary slackness against ``solution.row_duals``.
    Violations are absolute; pass/fail uses tolerances scaled by row size.
    """
    tol = tolerances
    h = np.asarray(solution.values, dtype=float)
    A = problem.rows
    act = A @ h
    row_scale = 1.0 + np.abs(A).sum(axis=1) if problem.n_rows else np.zeros(0)

    row_viol = np.maximum(problem.row_lower - act, act - problem.row_upper)
    row_viol = np.maximum(row_viol, 0.0)
    row_ok = bool(np.all(row_viol <= tol.feasibility * row_scale))
    checks = [CheckResult("row_feasibility", row_ok, float(row_viol.max(initial=0.0)))]

    var_viol = np.maximum(np.maximum(problem.var_lower - h, h - problem.var_upper), 0.0)
    checks.append(CheckResult("bound_feasibility", bool(np.all(var_viol <= tol.feasibility)),
                              float(var_viol.max(initial=0.0))))

    frac = solution.fractional_count(problem, tol.fraction)
    excess = max(0, frac - problem.n_rows)
    checks.append(CheckResult("vertex", excess == 0, float(excess),
                              f"{frac} fractional values, {problem.n_rows} rows"))

    y = np.asarray(solution.row_duals, dtype=float)
    if y.shape != (problem.n_rows,):
        checks.append(CheckResult("complementary_slackness", False, np.inf, "dual vector has wrong length"))
        return CertificateReport(tuple(checks))
    d = problem.objective - A.T @ y
    near = tol.feasibility * 10
    at_lo = h <= problem.var_lower + near
    at_hi = h >= problem.var_upper - near
    var_cs = np.where(at_lo & at_hi, 0.0,
             np.where(at_lo, np.maximum(d, 0.0),
             np.where(at_hi, np.maximum(-d, 0.0), np.abs(d))))
    var_allow = tol.optimality * (1.0 + np.abs(problem.objective) + np.abs(A).T @ np.abs(y))

    band = near * row_scale
    r_lo = act <= problem.row_lower + band
    r_hi = act >= problem.row_upper - band
    row_cs = np.where(r_lo & r_hi, 0.0,
             np.where(r_lo, np.maximum(y, 0.0),
             np.where(r_hi, np.maximum(-y, 0.0), np.abs(y))))
    cs_ok = bool(np.all(var_cs <= var_allow) and np.all(row_cs <= tol.optimality * (1.0 + np.abs(y))))
    worst = max(float(var_cs.max(initial=0.0)), float(row_cs.max(initial=0.0)))
    checks.append(CheckResult("complementary_slackness", cs_ok, worst))
    return CertificateReport(tuple(checks))


# plain-text debug dump; not a stable format
_DUMP_MAGIC = "# maxprob-lp-dump 1"


def dump_problem(problem: LpProblem, dest) -> None:
    """Write ``problem`` as text, one line per constraint row."""
    fmt = lambda v: " ".join(repr(float(x)) for x in v)
    lines = [
        _DUMP_MAGIC,
        f"size {problem.n_vars} {problem.n_rows}",
        "objective " + fmt(problem.objective),
        "var_lower " + fmt(problem.var_lower),
        "var_upper " + fmt(problem.var_upper),
    ]
    for k in range(problem.n_rows):
        lines.append("row " + fmt((problem.row_lower[k], problem.row_upper[k], *problem.rows[k])))
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, os.PathLike)):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        dest.write(text)


def load_problem(src) -> LpProblem:
    """Read a problem written by :func:`dump_problem`."""
    if isinstance(src, (str, os.PathLike)):
        with open(src, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = src.read()
    fields: dict = {}
    rows, lo, hi = [], [], []
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, *rest = line.split()
        try:
            nums = [float(x) for x in rest]
        except ValueError as exc:
            raise MalformedProblemError(f"line {lineno}: {exc}") from None
        if key == "row":
            if len(nums) < 2:
                raise MalformedProblemError(f"line {lineno}: row needs bounds and coefficients")
            lo.append(nums[0])
            hi.append(nums[1])
            rows.append(nums[2:])
        elif key in ("size", "objective", "var_lower", "var_upper"):
            fields[key] = nums
        else:
            raise MalformedProblemError(f"line {lineno}: unknown record {key!r}")
    if "size" not in fields or "objective" not in fields:
        raise MalformedProblemError("dump is missing the size or objective record")
    n, m = (int(v) for v in fields["size"])
    if len(rows) != m or any(len(r) != n for r in rows):
        raise MalformedProblemError(f"expected {m} rows of {n} coefficients")
    return LpProblem(
        fields["objective"],
        np.array(rows, dtype=float).reshape(m, n),
        np.array(lo, dtype=float),
        np.array(hi, dtype=float),
        fields.get("var_lower", [0.0] * n),
        fields.get("var_upper", [1.0] * n),
    )
