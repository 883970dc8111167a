"""Command-line front end: ``lpplab <command> [flags]``.

Exit codes: 0 success, 2 invalid arguments, 3 an audit or oracle found a
violation, 4 output could not be written.
"""

from __future__ import annotations

import argparse
import contextlib
import math
import sys
import time
from dataclasses import dataclass, field as dc_field
from typing import Optional

import numpy as np

from . import checks, store
from .construction import (build_construction, implication_audit, independence_audit,
                           lemma_partition_report)
from .errors import CampaignAborted, InsufficientDataError, LppError
from .field import derive_trial_field
from .montecarlo import (CampaignSpec, audit_trial, curve_from_values, default_workers,
                         event_table, event_trial, fit_power_law, fit_tail_exponent, run_trials,
                         scaled_values, scaling_samples, scaling_summary, trial_statistics)

EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, EXIT_IO = 0, 2, 3, 4
COMMANDS = ("tails", "exponents", "events", "audit", "lemma", "oracle", "verify")
STAT_FLAGS = {"tf-local": "tf_local", "tf-global": "tf_global",
              "temporal-upper": "temporal_upper", "temporal-lower": "temporal_lower"}
TAIL_BETAS = {"tf_local": (3.0, 1.5), "tf_global": (3.0, 1.5),
              "temporal_upper": (1.5, 3.0), "temporal_lower": (3.0, 1.5)}


class UsageError(Exception):
    pass


@dataclass
class Command:
    name: str
    params: dict
    out: str = "-"
    fmt: str = "jsonl"
    threads: int = 1
    timing: bool = False
    extra: dict = dc_field(default_factory=dict)


def parse_grid(text: str):
    """``start:stop:step`` (endpoints inclusive within 1e-9) or a comma list."""
    try:
        if ":" in text:
            start, stop, step = (float(s) for s in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + k * step, 12) for k in range(count)]
        return [float(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; use start:stop:step or a,b,c")


def _int_list(text):
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}")


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=_positive_int, default=None)
    common.add_argument("--threads", type=_positive_int, default=None)
    common.add_argument("--out", default="-")
    common.add_argument("--format", dest="fmt", choices=("jsonl", "csv", "both"), default="jsonl")
    common.add_argument("--timing", action="store_true",
                        help="record wall times (output is then no longer byte-reproducible)")

    geom = argparse.ArgumentParser(add_help=False)
    geom.add_argument("--r", type=int, required=True)
    geom.add_argument("--n", type=int, required=True)
    geom.add_argument("--t", type=float, required=True)
    geom.add_argument("--kappa-a", type=float, default=10.0)
    geom.add_argument("--kappa-d", type=float, default=1.0)
    geom.add_argument("--crossing", choices=("r", "2r"), default="2r")
    geom.add_argument("--epsilon", type=float, default=0.01)

    p = argparse.ArgumentParser(prog="lpplab", description="Exponential last passage percolation laboratory")
    sub = p.add_subparsers(dest="command", required=True)
    t = sub.add_parser("tails", parents=[common], help="empirical tail curve and decay fits")
    t.add_argument("--stat", choices=sorted(STAT_FLAGS), default="tf-local")
    t.add_argument("--r", type=int, default=None)
    t.add_argument("--n", type=int, required=True)
    t.add_argument("--t", type=parse_grid, default=None,
                   help="threshold grid; defaults depend on --stat")
    e = sub.add_parser("exponents", parents=[common], help="log-log scaling fit")
    e.add_argument("--stat", choices=("tf", "temporal"), default="tf")
    e.add_argument("--n-grid", type=_int_list, default=[128, 256, 512, 1024, 2048])
    sub.add_parser("events", parents=[common, geom], help="event frequencies on the construction")
    sub.add_parser("audit", parents=[common, geom], help="per-trial implication audit")
    lm = sub.add_parser("lemma", parents=[common, geom], help="rectangle partition report")
    lm.add_argument("--delta-inv", type=_positive_int, default=4)
    ind = sub.add_parser("independence", parents=[common, geom], help=argparse.SUPPRESS)
    ind.add_argument("--pairs", type=_positive_int, default=100)
    o = sub.add_parser("oracle", parents=[common], help="sweep versus exhaustive enumeration")
    o.add_argument("--max-side", type=_positive_int, default=8)
    sub.add_parser("verify", parents=[common], help="oracle plus invariant suite")
    return p


DEFAULT_GRIDS = {"tf_local": "0.8:2.4:0.2", "tf_global": "0.8:2.4:0.2",
                 "temporal_upper": "0.5:3.0:0.5", "temporal_lower": "5:9:0.5"}
DEFAULT_TRIALS = {"tails": 1000, "exponents": 400, "events": 500, "audit": 500, "lemma": 20,
                  "independence": 100, "oracle": 500, "verify": 200}


def parse_and_validate(argv) -> Command:
    args = build_parser().parse_args(argv)
    name = args.command
    trials = args.trials if args.trials is not None else DEFAULT_TRIALS[name]
    params = {"seed": args.seed, "trials": trials}
    if name == "tails":
        stat = STAT_FLAGS[args.stat]
        if stat == "tf_local":
            if args.r is None:
                raise UsageError("--r is required for --stat tf-local")
            if args.n < args.r:
                raise UsageError(f"--n ({args.n}) must be at least --r ({args.r})")
        grid = args.t if args.t is not None else parse_grid(DEFAULT_GRIDS[stat])
        if any(b <= a for a, b in zip(grid, grid[1:])) or not grid:
            raise UsageError("--t grid must be non-empty and strictly increasing")
        params.update(statistic=stat, n=args.n, r=args.r, t_grid=grid)
    elif name == "exponents":
        if len(args.n_grid) < 4 or any(b <= a for a, b in zip(args.n_grid, args.n_grid[1:])):
            raise UsageError("--n-grid needs at least 4 strictly increasing sizes")
        params.update(statistic=args.stat, n_grid=args.n_grid)
    elif name in ("events", "audit", "lemma", "independence"):
        if args.n < args.r:
            raise UsageError(f"--n ({args.n}) must be at least --r ({args.r})")
        params.update(r=args.r, n=args.n, t=args.t, kappa_a=args.kappa_a, kappa_d=args.kappa_d,
                      crossing=args.crossing, epsilon=args.epsilon)
        try:
            c = build_construction(args.r, args.t, args.n, kappa_a=args.kappa_a,
                                   kappa_d=args.kappa_d, crossing=args.crossing, epsilon=args.epsilon)
        except LppError as exc:
            raise UsageError(str(exc))
        params["u"], params["v"] = list(c.u), list(c.v)
        if name == "lemma":
            params["delta_inv"] = args.delta_inv
        if name == "independence":
            params["pairs"] = args.pairs
    elif name == "oracle":
        params["max_side"] = args.max_side
    threads = args.threads if args.threads is not None else default_workers()
    return Command(name, params, out=args.out, fmt=args.fmt, threads=threads, timing=args.timing)


def _construction(p):
    return build_construction(p["r"], p["t"], p["n"], kappa_a=p["kappa_a"], kappa_d=p["kappa_d"],
                              crossing=p["crossing"], epsilon=p["epsilon"])


def _spec(cmd, kind, **kw):
    p = cmd.params
    return CampaignSpec(kind, p["trials"], p["seed"], workers=cmd.threads, **kw)


def _timed(fn, timing):
    def run(i):
        t0 = time.perf_counter()
        payload = fn(i)
        return payload, ((time.perf_counter() - t0) * 1e3 if timing else None)
    return run


def _trial_records(cmd, fn, spec, indices=None):
    recs = run_trials(spec, _timed(fn, cmd.timing), indices)
    return [store.make_record(cmd.name, cmd.params, r.payload[0], r.trial_index, r.payload[1])
            for r in recs]


def _fits(curve, betas):
    fits = {}
    for beta in betas:
        try:
            fits[f"beta={beta:g}"] = fit_tail_exponent(curve, beta).as_dict()
        except InsufficientDataError as exc:
            fits[f"beta={beta:g}"] = {"error": str(exc)}
    return fits


def run_command(cmd: Command):
    """Compute ``(records, csv_header, csv_rows, violation)`` for a command."""
    p = cmd.params
    name = cmd.name
    if name == "tails":
        stat = p["statistic"]
        path = stat in ("tf_local", "tf_global")
        spec = _spec(cmd, "tail_curve", n=p["n"], r=p["r"], t_grid=tuple(p["t_grid"]), statistic=stat)
        recs = _trial_records(cmd, lambda i: trial_statistics(
            derive_trial_field(p["seed"], i), p["n"], p["r"], path), spec)
        values = scaled_values(stat, [r["payload"] for r in recs], p["n"], p["r"])
        curve = curve_from_values(stat, values, p["t_grid"])
        summary = {"curve": curve.as_dict(), "fits": _fits(curve, TAIL_BETAS[stat])}
        recs.append(store.make_record(name, p, summary))
        return recs, store.CURVE_HEADER, store.curve_rows(curve), False
    if name == "exponents":
        samples = scaling_samples(p["n_grid"], p["trials"], p["seed"], cmd.threads,
                                  path=p["statistic"] == "tf")
        recs = []
        for j, (n, rows) in enumerate(samples.items()):
            for k, payload in enumerate(rows):
                recs.append(store.make_record(name, p, dict(payload, n=n), j * p["trials"] + k))
        summary = scaling_summary(p["statistic"], samples)
        fit = fit_power_law(list(summary), list(summary.values()))
        recs.append(store.make_record(name, p, {"summary": [[n, s] for n, s in summary.items()],
                                                 "fit": fit.as_dict()}))
        rows = [[n, p["trials"], s] for n, s in summary.items()]
        return recs, store.SCALING_HEADER, rows, False
    if name == "events":
        spec = _spec(cmd, "event_table", n=p["n"], r=p["r"], t=p["t"], construction=_geom_kw(p))
        recs = _trial_records(cmd, event_trial(spec), spec)
        table = event_table([r["payload"] for r in recs])
        recs.append(store.make_record(name, p, {"events": table}))
        rows = [[k, v["successes"], v["trials"], v["p_hat"], v["ci_low"], v["ci_high"]]
                for k, v in table.items()]
        return recs, ["event", "successes", "trials", "p_hat", "ci_low", "ci_high"], rows, False
    if name == "audit":
        spec = _spec(cmd, "audit_suite", n=p["n"], r=p["r"], t=p["t"], construction=_geom_kw(p))
        recs = _trial_records(cmd, audit_trial(spec), spec)
        bad = [r["trial_index"] for r in recs if r["payload"]["violations"]]
        recs.append(store.make_record(name, p, {"trials": len(recs), "violating_trials": bad}))
        return recs, None, None, bool(bad)
    if name == "lemma":
        c = _construction(p)
        spec = _spec(cmd, "audit_suite", n=p["n"], r=p["r"], t=p["t"])
        recs = _trial_records(cmd, lambda i: lemma_partition_report(
            derive_trial_field(p["seed"], i), c, p["delta_inv"]).as_dict(), spec)
        bad = [r["trial_index"] for r in recs if not r["payload"]["holds"]]
        recs.append(store.make_record(name, p, {"violating_trials": bad}))
        return recs, None, None, bool(bad)
    if name == "independence":
        rep = independence_audit(p["seed"], _construction(p), p["pairs"])
        return [store.make_record(name, p, rep.as_dict())], None, None, rep.violations > 0
    if name == "oracle":
        res = checks.oracle_suite(p["trials"], p["seed"], p["max_side"])
        return [store.make_record(name, p, res)], None, None, res["mismatches"] > 0
    if name == "verify":
        res = checks.oracle_suite(p["trials"], p["seed"])
        inv = checks.invariant_suite(p["seed"])
        payload = {"oracle": res, "invariants": inv}
        bad = res["mismatches"] > 0 or not all(inv.values())
        return [store.make_record(name, p, payload)], None, None, bad
    raise UsageError(f"unknown command {name!r}")


def _geom_kw(p):
    return {"kappa_a": p["kappa_a"], "kappa_d": p["kappa_d"], "crossing": p["crossing"],
            "epsilon": p["epsilon"]}


@contextlib.contextmanager
def _open_out(path):
    if path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _csv_path(out):
    return out[:-6] + ".csv" if out.endswith(".jsonl") else out + ".csv"


def execute(cmd: Command) -> int:
    if cmd.out != "-":
        try:
            open(cmd.out, "a", encoding="utf-8").close()
        except OSError as exc:
            print(f"lpplab: cannot write output: {exc}", file=sys.stderr)
            return EXIT_IO
    try:
        recs, header, rows, violation = run_command(cmd)
    except CampaignAborted as exc:
        print(f"lpplab: campaign aborted after {len(exc.partial)} trials: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    except LppError as exc:
        print(f"lpplab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if cmd.fmt in ("jsonl", "both"):
            with _open_out(cmd.out) as fh:
                store.write_jsonl(fh, recs)
        if cmd.fmt in ("csv", "both") and header is not None:
            target = cmd.out if cmd.fmt == "csv" or cmd.out == "-" else _csv_path(cmd.out)
            with _open_out(target) as fh:
                store.write_csv(fh, header, rows)
    except OSError as exc:
        print(f"lpplab: cannot write output: {exc}", file=sys.stderr)
        return EXIT_IO
    if violation:
        print(f"lpplab: {cmd.name} found violations", file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv=None) -> int:
    try:
        cmd = parse_and_validate(sys.argv[1:] if argv is None else argv)
    except UsageError as exc:
        print(f"lpplab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0) and EXIT_USAGE
    return execute(cmd)


if __name__ == "__main__":
    sys.exit(main())
