"""Command-line entry point: ``maxprob {classify,synth,experiment,solve,replay}``.

Exit codes: 0 success, 1 usage or input error, 2 infeasible program,
3 solver stopped at its iteration limit.  Every command except ``solve``
and ``replay`` writes a JSON run manifest next to its outputs; ``replay``
re-runs a manifest and reproduces the same files byte for byte.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import asdict

import numpy as np

from . import __version__
from .classifier import (EpsilonPolicy, InfeasibleError, IterationLimitError, Mode, ModeConfig,
                         harden, transduce)
from .data import GENERATORS, CsvFormatError, draw_labeled, load_csv, make_rng, write_csv
from .evaluation import SweepConfig, aggregate, parse_sizes, run_sweep, write_aggregate, write_records
from .features import KernelKind, KernelSpec
from .lp import LpStatus, MalformedProblemError, Tolerances, load_problem, solve

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_LIMIT = 0, 1, 2, 3
MANIFEST_SUFFIX = ".manifest.json"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; that code is reserved for infeasibility
    def error(self, message):
        raise UsageError(message)


def _fmt(v) -> str:
    return f"{v:.9g}"


def _default_threads() -> int:
    raw = os.environ.get("MAXPROB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _add_input_flags(p):
    p.add_argument("--input", required=True, help="CSV file of points")
    hdr = p.add_mutually_exclusive_group()
    hdr.add_argument("--header", dest="has_header", action="store_const", const=True, default=None)
    hdr.add_argument("--no-header", dest="has_header", action="store_const", const=False)
    p.add_argument("--label-col", type=int, default=None,
                   help="column holding class labels (negative counts from the end)")
    p.add_argument("--member-value", type=float, default=None,
                   help="label value marking members (default: any nonzero label)")


def _add_mode_flags(p):
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.LINEAR.value)
    p.add_argument("--epsilon", type=float, default=None, help="fixed per-point band for every row")
    p.add_argument("--epsilon-policy", choices=[e.value for e in EpsilonPolicy], default=None,
                   help="band rule when --epsilon is absent (default depends on the mode)")
    p.add_argument("--kappa", type=float, default=1.0)
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--no-pin", dest="pin_labeled", action="store_false",
                   help="leave labeled points free instead of fixing them at 1")
    p.add_argument("--standardize", action="store_true")
    p.add_argument("--kernel", choices=[k.value for k in KernelKind], default=KernelKind.RBF.value)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--coef0", type=float, default=1.0)
    p.add_argument("--landmarks", type=int, default=None)
    p.add_argument("--landmark-seed", type=int, default=0)
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--tol-feas", type=float, default=1e-9)
    p.add_argument("--tol-opt", type=float, default=1e-9)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="maxprob", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"maxprob {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("classify", help="label every point of a CSV file")
    _add_input_flags(p)
    _add_mode_flags(p)
    src = p.add_mutually_exclusive_group()
    src.add_argument("--labeled", help="file of labeled row indices (0-based, comma or newline separated)")
    src.add_argument("--l", dest="sample_size", type=int,
                     help="draw this many labeled points from the class members")
    p.add_argument("--sample", default=None,
                   help="CSV of labeled points outside the dataset; their mean replaces that of --labeled/--l")
    p.add_argument("--seed", type=int, default=0, help="seed for --l sampling")
    p.add_argument("--output", required=True, help="per-point CSV: index,fuzzy,label")
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    p.add_argument("generator", help="halfspace, gaussian or ring")
    p.add_argument("--class", dest="n_class", type=int, default=300)
    p.add_argument("--other", dest="n_other", type=int, default=750)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("experiment", help="precision/recall sweep over labeled-sample sizes")
    _add_input_flags(p)
    _add_mode_flags(p)
    p.add_argument("--sizes", default="25:500:25", help="start:stop:step or a comma list")
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-size", type=int, default=3100)
    p.add_argument("--s-size", type=int, default=6198, help="0 puts every non-T point into S")
    p.add_argument("--threads", type=int, default=_default_threads(),
                   help="worker threads (default $MAXPROB_THREADS or 1)")
    p.add_argument("--timing", action="store_true",
                   help="record wall time (outputs then differ between runs)")
    p.add_argument("--output", required=True, help="records CSV")
    p.add_argument("--aggregate", default=None, help="aggregate CSV (default: <output stem>.aggregate.csv)")
    p.add_argument("--manifest", default=None)

    p = sub.add_parser("solve", help="solve a debug LP dump")
    p.add_argument("problem")
    p.add_argument("--max-iterations", type=int, default=None)
    p.add_argument("--output", default=None, help="write variable values here")

    p = sub.add_parser("replay", help="re-run the command recorded in a manifest")
    p.add_argument("manifest")
    return parser


def mode_config(args) -> ModeConfig:
    try:
        return _mode_config(args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _mode_config(args) -> ModeConfig:
    kernel = KernelSpec(KernelKind(args.kernel), gamma=args.gamma, degree=args.degree, offset=args.coef0)
    return ModeConfig(
        mode=Mode(args.mode), kernel=kernel, landmarks=args.landmarks,
        landmark_seed=args.landmark_seed, epsilon=args.epsilon,
        epsilon_policy=None if args.epsilon_policy is None else EpsilonPolicy(args.epsilon_policy),
        kappa=args.kappa, threshold=args.threshold, pin_labeled=args.pin_labeled,
        standardize=args.standardize,
        tolerances=Tolerances(feasibility=args.tol_feas, optimality=args.tol_opt),
        max_iterations=args.max_iterations,
    )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def write_manifest(path, args, resolved=None) -> None:
    record = {
        "tool": "maxprob",
        "version": __version__,
        "command": args.command,
        "args": {k: v for k, v in vars(args).items() if k != "command"},
        "resolved": _jsonable(resolved or {}),
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_dataset(args):
    try:
        return load_csv(args.input, has_header=args.has_header, label_col=args.label_col,
                        member_value=args.member_value)
    except FileNotFoundError:
        raise UsageError(f"input file not found: {args.input}") from None
    except CsvFormatError as exc:
        raise UsageError(str(exc)) from None


def _read_indices(path, n_points):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError:
        raise UsageError(f"labeled index file not found: {path}") from None
    try:
        idx = np.array([int(tok) for tok in text.replace(",", " ").split()], dtype=np.intp)
    except ValueError:
        raise UsageError(f"{path}: labeled indices must be integers") from None
    if idx.size == 0:
        raise UsageError(f"{path}: empty labeled sample")
    if idx.min() < 0 or idx.max() >= n_points:
        raise UsageError(f"{path}: labeled index out of range for {n_points} points")
    return np.unique(idx)


def cmd_classify(args) -> int:
    dataset = _load_dataset(args)
    config = mode_config(args)
    sample = None
    if args.sample is not None:
        try:
            sample = load_csv(args.sample, has_header=args.has_header).points
        except FileNotFoundError:
            raise UsageError(f"sample file not found: {args.sample}") from None
        except CsvFormatError as exc:
            raise UsageError(str(exc)) from None
        if sample.shape[1] != dataset.dim:
            raise UsageError(f"sample has {sample.shape[1]} columns, dataset has {dataset.dim}")
    if args.labeled is not None:
        labeled = _read_indices(args.labeled, len(dataset))
    elif args.sample_size is None:
        if sample is None:
            raise UsageError("give labeled points with --labeled, --l or --sample")
        labeled = np.zeros(0, dtype=np.intp)
    else:
        if dataset.truth is None:
            raise UsageError("--l needs a label column (--label-col)")
        try:
            labeled = draw_labeled(dataset, np.arange(len(dataset)), args.sample_size, make_rng(args.seed))
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        labeling = transduce(dataset, labeled, config, sample=sample)
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except IterationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    hard = harden(labeling, config.threshold)
    with open(args.output, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("index", "fuzzy", "label"))
        for i, (v, h) in enumerate(zip(labeling.values, hard)):
            w.writerow((i, _fmt(v), int(h)))
    write_manifest(args.manifest or args.output + MANIFEST_SUFFIX, args,
                   {"mode_config": asdict(config), "labeled_indices": labeled.tolist(),
                    "objective": _fmt(labeling.objective)})
    print(f"{len(dataset)} points, objective {labeling.objective:.9g}, "
          f"{int(hard.sum())} members", file=sys.stderr)
    return EXIT_OK


def cmd_synth(args) -> int:
    gen = GENERATORS.get(args.generator)
    if gen is None:
        raise UsageError(f"unknown generator {args.generator!r}; choose from {', '.join(GENERATORS)}")
    try:
        dataset = gen(args.seed, args.n_class, args.n_other, args.dim)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_csv(dataset, args.output)
    write_manifest(args.manifest or args.output + MANIFEST_SUFFIX, args)
    return EXIT_OK


def _aggregate_path(args):
    if args.aggregate:
        return args.aggregate
    stem, _ = os.path.splitext(args.output)
    return stem + ".aggregate.csv"


def cmd_experiment(args) -> int:
    dataset = _load_dataset(args)
    if dataset.truth is None:
        raise UsageError("experiment needs a dataset with a label column (--label-col)")
    try:
        sizes = parse_sizes(args.sizes)
        config = SweepConfig(sizes=sizes, repetitions=args.reps, base_seed=args.seed,
                             mode=mode_config(args), t_size=args.t_size,
                             s_size=args.s_size or None, threads=max(1, args.threads))
        records = run_sweep(dataset, config)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    write_records(records, args.output, timing=args.timing)
    write_aggregate(aggregate(records), _aggregate_path(args))
    resolved = asdict(config)
    resolved.pop("threads")  # results do not depend on it
    write_manifest(args.manifest or args.output + MANIFEST_SUFFIX, args, resolved)
    n_fail = sum(not r.ok for r in records)
    print(f"{len(records)} records, {n_fail} failed solves", file=sys.stderr)
    return EXIT_OK


def cmd_solve(args) -> int:
    try:
        problem = load_problem(args.problem)
    except FileNotFoundError:
        raise UsageError(f"problem file not found: {args.problem}") from None
    except MalformedProblemError as exc:
        raise UsageError(f"{args.problem}: {exc}") from None
    sol = solve(problem, max_iterations=args.max_iterations)
    print(f"status {sol.status.value}")
    if sol.status is LpStatus.INFEASIBLE:
        print(f"residual {_fmt(sol.infeasibility)}")
        return EXIT_INFEASIBLE
    print(f"objective {_fmt(sol.objective_value)}")
    print(f"iterations {sol.iterations}")
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.writelines(_fmt(v) + "\n" for v in sol.values)
    return EXIT_OK if sol.status is LpStatus.OPTIMAL else EXIT_LIMIT


def cmd_replay(args) -> int:
    try:
        with open(args.manifest, encoding="utf-8") as fh:
            record = json.load(fh)
        command = record["command"]
        recorded = argparse.Namespace(command=command, **record["args"])
    except FileNotFoundError:
        raise UsageError(f"manifest not found: {args.manifest}") from None
    except (ValueError, KeyError, TypeError) as exc:
        raise UsageError(f"{args.manifest}: not a run manifest ({exc})") from None
    if command not in COMMANDS or command == "replay":
        raise UsageError(f"{args.manifest}: cannot replay command {command!r}")
    return COMMANDS[command](recorded)


COMMANDS = {
    "classify": cmd_classify,
    "synth": cmd_synth,
    "experiment": cmd_experiment,
    "solve": cmd_solve,
    "replay": cmd_replay,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"maxprob: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"maxprob: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
