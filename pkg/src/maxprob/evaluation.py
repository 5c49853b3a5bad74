"""Precision/recall scoring and the labeled-sample-size sweep."""

from __future__ import annotations

import csv
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classifier import ModeConfig, SolveError, harden, transduce
from .data import Dataset, draw_labeled, make_rng, partition

__all__ = [
    "AggregateRow",
    "MetricsRecord",
    "SweepConfig",
    "aggregate",
    "nearest_rank",
    "parse_sizes",
    "precision_recall",
    "run_sweep",
    "write_aggregate",
    "write_records",
    "RECORD_HEADER",
    "AGGREGATE_HEADER",
]

RECORD_HEADER = ("sample_size", "run", "precision", "recall", "objective", "status", "wall_ms")
AGGREGATE_HEADER = ("sample_size", "metric", "mean", "q10", "q90", "n_ok", "n_fail")


def _counts(predicted, truth, scope=None):
    predicted = np.asarray(predicted, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if predicted.shape != truth.shape:
        raise ValueError(f"length mismatch: {predicted.shape[0]} predictions, {truth.shape[0]} labels")
    if scope is not None:
        scope = np.asarray(scope)
        predicted, truth = predicted[scope], truth[scope]
    tp = int(np.count_nonzero(predicted & truth))
    fp = int(np.count_nonzero(predicted & ~truth))
    fn = int(np.count_nonzero(~predicted & truth))
    return tp, fp, fn


def precision_recall(predicted, truth, scope=None) -> tuple[float, float]:
    """Precision and recall over ``scope`` (all points when ``None``).

    An empty denominator yields 1.0 for that measure.
    """
    tp, fp, fn = _counts(predicted, truth, scope)
    precision = tp / (tp + fp) if tp + fp else 1.0
    recall = tp / (tp + fn) if tp + fn else 1.0
    return precision, recall


@dataclass(frozen=True)
class MetricsRecord:
    sample_size: int
    run: int
    precision: float
    recall: float
    objective: float
    status: str
    wall_ms: float = 0.0
    degenerate: bool = False

    @property
    def ok(self) -> bool:
        return self.status == "OPTIMAL"


def parse_sizes(text: str) -> tuple:
    """``"25:500:25"`` -> (25, 50, ..., 500); ``"25,50"`` -> (25, 50)."""
    if ":" in text:
        start, stop, step = (int(v) for v in text.split(":"))
        if step <= 0:
            raise ValueError("size step must be positive")
        return tuple(range(start, stop + 1, step))
    return tuple(int(v) for v in text.split(",") if v.strip())


@dataclass(frozen=True)
class SweepConfig:
    """Sample sizes, repetitions and per-run split for :func:`run_sweep`.

    Run ``r`` splits the data with seed ``(base_seed, r)`` and draws the
    labeled sample of size ``l`` with seed ``(base_seed, r, l)``.
    """

    sizes: tuple = tuple(range(25, 501, 25))
    repetitions: int = 100
    base_seed: int = 0
    mode: ModeConfig = field(default_factory=ModeConfig)
    t_size: int = 3100
    s_size: int | None = 6198
    threads: int = 1

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.sizes)
        if not sizes or sizes[0] < 1 or any(b <= a for a, b in zip(sizes, sizes[1:])):
            raise ValueError("sizes must be positive and strictly increasing")
        object.__setattr__(self, "sizes", sizes)
        if self.t_size < 1:
            raise ValueError("t_size must be at least 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")


def _one_repetition(dataset: Dataset, config: SweepConfig, run: int) -> list:
    pool, evaluation = partition(len(dataset), config.t_size, config.s_size,
                                 make_rng(config.base_seed, run))
    target = dataset.subset(evaluation)
    out = []
    for size in config.sizes:
        labeled = draw_labeled(dataset, pool, size, make_rng(config.base_seed, run, size))
        start = time.perf_counter()
        try:
            fuzzy = transduce(target, None, config.mode, sample=dataset.points[labeled])
        except SolveError as exc:
            out.append(MetricsRecord(size, run, math.nan, math.nan, math.nan, exc.status.value,
                                     (time.perf_counter() - start) * 1e3))
            continue
        elapsed = (time.perf_counter() - start) * 1e3
        pred = harden(fuzzy, config.mode.threshold)
        tp, fp, fn = _counts(pred, target.truth)
        p, r = precision_recall(pred, target.truth)
        out.append(MetricsRecord(size, run, p, r, fuzzy.objective, "OPTIMAL", elapsed,
                                 degenerate=(tp + fp == 0) or (tp + fn == 0)))
    return out


def run_sweep(dataset: Dataset, config: SweepConfig) -> list:
    """Repeat split / sample / solve / score for every size and repetition.

    The LP is solved over the evaluation part ``S`` only, with the mean taken
    from a labeled sample drawn from the class members of the pool ``T``,
    so labeled points never reach ``S``.  Failed solves become records with
    their status instead of aborting the sweep.  Records come back sorted by
    (sample_size, run) whatever the thread count.
    """
    if dataset.truth is None:
        raise ValueError("a sweep needs a dataset with truth labels")
    # validate the split before spending solver time
    partition(len(dataset), config.t_size, config.s_size, make_rng(config.base_seed))
    runs = range(config.repetitions)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            chunks = list(pool.map(lambda r: _one_repetition(dataset, config, r), runs))
    else:
        chunks = [_one_repetition(dataset, config, r) for r in runs]
    records = [rec for chunk in chunks for rec in chunk]
    records.sort(key=lambda rec: (rec.sample_size, rec.run))
    return records


def nearest_rank(values, q: float) -> float:
    """Smallest value with at least a fraction ``q`` of the data at or below it."""
    s = np.sort(np.asarray(values, dtype=float))
    if s.size == 0:
        raise ValueError("no values")
    rank = max(1, math.ceil(q * s.size - 1e-9))
    return float(s[min(rank, s.size) - 1])


@dataclass(frozen=True)
class AggregateRow:
    sample_size: int
    metric: str
    mean: float
    q10: float
    q90: float
    n_ok: int
    n_fail: int


def aggregate(records) -> list:
    """Mean and 10%/90% nearest-rank quantiles per size, for precision and recall.

    Failed runs are excluded from the statistics and counted in ``n_fail``.
    """
    records = list(records)
    if not records:
        raise ValueError("no records to aggregate")
    rows = []
    for size in sorted({r.sample_size for r in records}):
        group = [r for r in records if r.sample_size == size]
        ok = [r for r in group if r.ok]
        n_fail = len(group) - len(ok)
        for metric in ("precision", "recall"):
            vals = sorted(getattr(r, metric) for r in ok)
            if vals:
                mean = math.fsum(vals) / len(vals)
                rows.append(AggregateRow(size, metric, mean, nearest_rank(vals, 0.1),
                                         nearest_rank(vals, 0.9), len(ok), n_fail))
            else:
                rows.append(AggregateRow(size, metric, math.nan, math.nan, math.nan, 0, n_fail))
    return rows


def _fmt(v) -> str:
    return f"{v:.9g}"


def write_records(records, path, *, timing: bool = True) -> None:
    """Results CSV; ``timing=False`` writes ``wall_ms`` as 0 so reruns match byte for byte."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in records:
            w.writerow([r.sample_size, r.run, _fmt(r.precision), _fmt(r.recall), _fmt(r.objective),
                        r.status, _fmt(r.wall_ms if timing else 0.0)])


def write_aggregate(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(AGGREGATE_HEADER)
        for r in rows:
            w.writerow([r.sample_size, r.metric, _fmt(r.mean), _fmt(r.q10), _fmt(r.q90), r.n_ok, r.n_fail])
