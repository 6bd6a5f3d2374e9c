"""Command-line front end.

Subcommands::

    paretogof test             statistics and p-values for a data file
    paretogof critical-values  simulated critical-value tables
    paretogof efficiency       local Bahadur efficiencies
    paretogof lao              locally optimal alternative densities

Exit codes: 0 success, 2 invalid input, 3 I/O failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from collections.abc import Sequence

import numpy as np

from . import __version__
from .asymptotics import (
    LaoSpec,
    best_k,
    efficiency_table,
    lao_density,
    lao_efficiency_check,
    max_admissible_theta,
    reports_to_csv,
    reports_to_json,
)
from .distributions import ALTERNATIVES, Family
from .montecarlo import DEFAULT_LEVELS, DEFAULT_SIZES, SimulationPlan, TableStore, critical_values, null_plan
from .ustat import SampleError, StatKind, compute_statistic, read_sample

EXIT_OK, EXIT_INVALID, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4

# p-values are refused when reps * n**2 exceeds this many pair evaluations
SIMULATION_BUDGET = 5e10

log = logging.getLogger("paretogof")


class UsageError(Exception):
    pass


def _kinds(value: str) -> list[StatKind]:
    if value == "both":
        return [StatKind.INTEGRAL, StatKind.SUPREMUM]
    return [StatKind.parse(value)]


def _int_list(text: str) -> list[int]:
    out: list[int] = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        sep = ".." if ".." in part else "-" if "-" in part[1:] else None
        if sep:
            lo, hi = part.split(sep)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _float_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a list of numbers: {text!r}") from None


def _dump_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _clean(x):
    return None if x is None or not np.isfinite(x) else float(x)


# --------------------------------------------------------------------------
# subcommands


def cmd_test(args) -> str:
    if args.input is None:
        raise UsageError("--input is required (use '-' for stdin)")
    try:
        sample = read_sample(args.input)
    except OSError as exc:
        # an unreadable sample is an input problem, not a store failure
        raise UsageError(f"cannot read {args.input}: {exc.strerror or exc}") from None
    k = args.k
    if k < 2:
        raise UsageError("--k must be at least 2")
    kinds = _kinds(args.statistic)
    skipped = []
    if sample.n < k:
        raise UsageError(f"need at least k={k} observations, got {sample.n}")
    if sample.n < k + 1 and StatKind.INTEGRAL in kinds:
        if args.statistic != "both":
            raise UsageError(f"the integral statistic needs n >= k+1 = {k + 1} observations, got {sample.n}")
        kinds.remove(StatKind.INTEGRAL)
        skipped.append("integral")
        print(f"note: integral statistic skipped (needs n >= {k + 1})", file=sys.stderr)
    if sample.has_ties:
        print("note: sample contains tied observations", file=sys.stderr)

    store = TableStore(args.cache_dir)
    results = []
    for kind in kinds:
        res = compute_statistic(kind, sample, k)
        if args.reps > 0:
            if args.reps * sample.n**2 > SIMULATION_BUDGET:
                raise UsageError(
                    f"simulating a null table for n={sample.n} with {args.reps} replicates exceeds the budget; "
                    "lower --reps or pass --reps 0 to skip p-values"
                )
            plan = null_plan(kind, k, sample.n, args.reps, args.seed)
            if store.load(plan) is None:
                print(
                    f"note: simulating {args.reps} null replicates for the {kind.value} statistic at n={sample.n}",
                    file=sys.stderr,
                )
            dist = store.get_or_simulate(plan, args.workers)
            res = res.with_p_value(dist.p_value(res.value))
        results.append(res)

    if args.format == "json":
        return _dump_json(
            {"n": sample.n, "k": k, "reps": args.reps, "seed": args.seed, "skipped": skipped,
             "results": [r.to_dict() for r in results]}
        )
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["statistic", "k", "n", "value", "argmax_t", "p_value"])
        for r in results:
            w.writerow([r.kind.value, r.k, r.n, repr(r.value), "" if r.argmax_t is None else repr(r.argmax_t),
                        "" if r.p_value is None else repr(r.p_value)])
        return buf.getvalue()
    lines = [f"Pareto goodness-of-fit tests, k={k}, n={sample.n}", "",
             f"{'statistic':<10}{'value':>12}{'argmax t':>12}{'p-value':>10}"]
    for r in results:
        t = "-" if r.argmax_t is None else f"{r.argmax_t:.4f}"
        p = "-" if r.p_value is None else f"{r.p_value:.4f}"
        lines.append(f"{r.kind.value:<10}{r.value:>12.6f}{t:>12}{p:>10}")
    if args.reps > 0:
        lines.append("")
        lines.append(f"p-values from {args.reps} simulated null replicates (seed {args.seed})")
    return "\n".join(lines) + "\n"


def cmd_critical_values(args) -> str:
    levels = tuple(args.levels)
    sizes = tuple(args.sizes)
    store = TableStore(args.cache_dir)
    tables = []
    for kind in _kinds(args.statistic):
        plan = SimulationPlan(kind=kind, k=args.k, n=max(sizes), reps=args.reps, seed=args.seed, levels=levels)
        tables.append(critical_values(plan, sizes, store=store, workers=args.workers))
    if args.format == "json":
        return _dump_json([t.to_dict() for t in tables])
    if args.format == "csv":
        return "\n".join(f"# {t.kind.value} k={t.k}\n{t.to_csv()}" for t in tables)
    return "\n".join(t.to_text() for t in tables)


def cmd_efficiency(args) -> str:
    families = [Family.parse(f) for f in args.family] if args.family else list(ALTERNATIVES)
    ks = args.k_list
    if any(k < 2 or k > 8 for k in ks):
        raise UsageError("efficiency orders must lie in [2, 8]")
    kinds = _kinds(args.statistic)
    reports = efficiency_table(kinds, ks, families)
    best = best_k(reports)
    if args.format == "json":
        summary = [{"statistic": kv[0], "family": kv[1], "k": r.k, "efficiency": r.efficiency}
                   for kv, r in best.items()]
        return _dump_json({"reports": json.loads(reports_to_json(reports)), "best_k": summary})
    if args.format == "csv":
        return reports_to_csv(reports)
    out = []
    for kind in kinds:
        title = "integral statistic I_n" if kind is StatKind.INTEGRAL else "supremum statistic D_n"
        out.append(f"Local Bahadur efficiency, {title}")
        head = f"{'alternative':<12}" + "".join(f"{'k=' + str(k):>9}" for k in ks)
        if len(ks) > 1:
            head += f"{'max_k':>16}"
        out.append(head)
        for fam in families:
            row = [r for r in reports if r.kind is kind and r.family == fam.value]
            line = f"{fam.value:<12}" + "".join(f"{r.efficiency:>9.3f}" for r in row)
            if len(ks) > 1:
                b = best[(kind.value, fam.value)]
                line += f"{b.efficiency:>9.3f} (k={b.k})"
            out.append(line)
        out.append("")
    return "\n".join(out)


def cmd_lao(args) -> str:
    if args.theta < 0:
        raise UsageError("--theta must be nonnegative")
    x = np.geomspace(1.0, args.x_max, args.grid)
    blocks = []
    for kind in _kinds(args.statistic):
        t0 = args.t0 if kind is StatKind.SUPREMUM else None
        spec = LaoSpec(kind, args.k, c_proj=args.c_proj, c_log=args.c_log, t0=t0)
        if args.theta > max_admissible_theta(spec):
            raise UsageError(f"theta={args.theta} makes the {kind.value} LAO density negative")
        g = lao_density(spec, args.theta, x)
        blocks.append({
            "statistic": kind.value,
            "k": spec.k,
            "theta": args.theta,
            "c_proj": spec.c_proj,
            "c_log": spec.c_log,
            "t0": _clean(spec.t0),
            "max_theta": _clean(max_admissible_theta(spec)),
            "efficiency": lao_efficiency_check(spec),
            "x": [float(v) for v in x],
            "density": [float(v) for v in g],
        })
    if args.format == "json":
        return _dump_json(blocks)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["statistic", "k", "theta", "x", "density"])
        for b in blocks:
            for xv, gv in zip(b["x"], b["density"]):
                w.writerow([b["statistic"], b["k"], b["theta"], repr(xv), repr(gv)])
        return buf.getvalue()
    out = []
    for b in blocks:
        t0 = "" if b["t0"] is None else f", t0={b['t0']:.4f}"
        out.append(f"LAO density for the {b['statistic']} statistic, k={b['k']}, theta={b['theta']}{t0}")
        out.append(f"local efficiency check: {b['efficiency']:.8f}")
        out.append(f"{'x':>14}{'g(x, theta)':>18}")
        out.extend(f"{xv:>14.6g}{gv:>18.10g}" for xv, gv in zip(b["x"], b["density"]))
        out.append("")
    return "\n".join(out)


# --------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paretogof", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, statistic_default="both"):
        p.add_argument("--statistic", choices=["integral", "sup", "both"], default=statistic_default)
        p.add_argument("--format", choices=["text", "json", "csv"], default="text")
        p.add_argument("-v", "--verbose", action="store_true")

    def sim(p):
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--reps", type=int, default=10_000)
        p.add_argument("--cache-dir", default=None, help="table store (default: $PARETOGOF_CACHE_DIR or $CACHE_DIR)")
        p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("test", help="compute the statistics and p-values for a sample")
    p.add_argument("--input", "-i", default=None, help="file with one observation per line, '-' for stdin")
    p.add_argument("--k", type=int, default=3)
    common(p)
    sim(p)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("critical-values", help="simulate critical values")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--sizes", type=_int_list, default=list(DEFAULT_SIZES))
    p.add_argument("--levels", type=_float_list, default=list(DEFAULT_LEVELS))
    common(p)
    sim(p)
    p.set_defaults(func=cmd_critical_values)

    p = sub.add_parser("efficiency", help="local Bahadur efficiencies")
    p.add_argument("--k", dest="k_list", type=_int_list, default=[3], help="order(s): 3, 2-6 or 3,4")
    p.add_argument("--family", action="append", choices=[f.value for f in ALTERNATIVES])
    common(p)
    p.set_defaults(func=cmd_efficiency)

    p = sub.add_parser("lao", help="locally optimal alternative densities")
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--theta", type=float, default=0.05)
    p.add_argument("--c-proj", type=float, default=1.0)
    p.add_argument("--c-log", type=float, default=0.0)
    p.add_argument("--t0", type=float, default=None)
    p.add_argument("--grid", type=int, default=41)
    p.add_argument("--x-max", type=float, default=100.0)
    common(p)
    p.set_defaults(func=cmd_lao)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        out = args.func(args)
    except (UsageError, SampleError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(out)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
