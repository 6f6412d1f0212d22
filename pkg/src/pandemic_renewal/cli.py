"""Command-line interface: every table is CSV (default) or JSON on stdout or ``--out``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import data_ingest, exact_rw, poisson_model, stats
from .renewal import (
    DEFAULT_CAP,
    Estimate,
    ExponentialInterarrival,
    Probes,
    RandomWalkInterarrival,
    StepSource,
    exact_references,
    replicate_stream,
    run_ensemble,
)

FIGURE_STEPS = 300
FIGURE_SPLIT = 150
FIGURE_RATE_DENOMINATOR = 30


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return "" if value is None else str(value)


def _json_cell(value):
    if isinstance(value, (int, np.integer)) and not isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return float(format(v, ".12g")) if math.isfinite(v) else format(v, ".12g")
    return value


@dataclass
class OutputTable:
    columns: list[str]
    rows: list[list]

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("ragged table row")

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows([fmt(v) for v in row] for row in self.rows)
        return out.getvalue()

    def to_json(self) -> str:
        records = [{c: _json_cell(v) for c, v in zip(self.columns, row)} for row in self.rows]
        return json.dumps(records, indent=2) + "\n"

    def render(self, fmt_name: str) -> str:
        return self.to_json() if fmt_name == "json" else self.to_csv()


# ---------------------------------------------------------------------------
# commands


def _rate(args) -> float:
    if args.rate is not None and args.rate_denominator is not None:
        raise ValueError("give either --rate or --rate-denominator, not both")
    if args.rate_denominator is not None:
        if not args.rate_denominator > 0:
            raise ValueError("--rate-denominator must be positive")
        return 1.0 / args.rate_denominator
    if args.rate is None:
        raise ValueError("the exponential model needs --rate or --rate-denominator")
    return poisson_model.check_rate(args.rate)


def _even(value: float, floor: bool, name: str) -> int:
    if floor:
        return exact_rw.floor_even(value)
    if value != int(value) or int(value) % 2:
        raise ValueError(f"{name} must be an even integer (or pass --floor-even), got {value}")
    return int(value)


def cmd_tail(args) -> OutputTable:
    if args.model == "exp":
        rate = _rate(args)
        return OutputTable(["model", "rate", "t", "tail"], [["exp", rate, args.t, poisson_model.exp_tail(rate, args.t)]])
    t = _even(args.t, args.floor_even, "--t")
    return OutputTable(
        ["model", "t", "tail_exact", "tail_asymptotic"],
        [["rw", t, exact_rw.no_return_survival(t), exact_rw.no_return_survival_asymptotic(t)]],
    )


def cmd_pmf(args) -> OutputTable:
    if args.target == "poisson":
        if args.mean is not None:
            dist = poisson_model.count_pmf(1.0, args.mean, args.kmax)
        else:
            dist = poisson_model.count_pmf(_rate(args), args.horizon, args.kmax)
        return OutputTable(["k", "pmf"], [[k, p] for k, p in enumerate(dist.mass)])
    steps = _even(args.steps, args.floor_even, "--steps")
    if args.target == "rw-returns":
        mass = exact_rw.return_count_pmf(steps).mass
        return OutputTable(["r", "pmf"], [[r, p] for r, p in enumerate(mass)])
    lz = exact_rw.last_zero_pmf(steps)
    return OutputTable(["epoch", "pmf"], [[int(e), p] for e, p in zip(lz.epochs, lz.mass)])


def cmd_arcsine(args) -> OutputTable:
    steps = _even(args.steps, args.floor_even, "--steps")
    epoch = _even(args.epoch, args.floor_even, "--epoch")
    limit = 2 / math.pi * math.asin(math.sqrt(epoch / steps)) if steps else 1.0
    return OutputTable(
        ["steps", "epoch", "cdf_exact", "cdf_continuous_limit"],
        [[steps, epoch, exact_rw.last_zero_cdf(steps, epoch), limit]],
    )


def _model(args):
    if args.model == "exp":
        return ExponentialInterarrival(_rate(args))
    return RandomWalkInterarrival(cap=args.cap, unit_scale=args.unit_scale)


def cmd_simulate(args) -> OutputTable:
    model = _model(args)
    if args.gap is None:
        args.gap = [60.0] if args.model == "exp" else [50.0, 100.0]
    if args.last is None:
        args.last = [150.0]
    probes = Probes(gaps=args.gap, last_events=args.last)
    st = run_ensemble(model, args.horizon, args.reps, args.seed, probes, workers=args.workers)
    ref = exact_references(model, args.horizon, probes)

    def row(quantity, probe, est, exact):
        z = (est.value - exact) / est.std_error if est.std_error > 0 else None
        return [quantity, probe, est.value, est.std_error, exact, z]

    rows = [
        ["meta", "model", st.model, None, None, None],
        ["meta", "generator", st.generator, None, None, None],
        ["meta", "base_seed", st.base_seed, None, None, None],
        ["meta", "replicates", st.replicates, None, None, None],
        ["meta", "horizon", st.horizon, None, None, None],
        ["meta", "censored", st.censored, None, None, None],
    ]
    for g, est in st.gap_tail.items():
        rows.append(row("gap_tail", g, est, ref["gap_tail"][g]))
    for e, est in st.last_event_cdf.items():
        rows.append(row("last_event_cdf", e, est, ref["last_event_cdf"][e]))
    rows.append(row("count_mean", None, st.count_mean, ref["count_mean"]))
    exact_pmf = ref["count_pmf"]
    significant = np.flatnonzero(exact_pmf >= 1e-6)
    kmax = max(st.count_pmf.size - 1, int(significant[-1]) if significant.size else 0)
    for k in range(kmax + 1):
        p = float(st.count_pmf[k]) if k < st.count_pmf.size else 0.0
        se = float(st.count_pmf_se[k]) if k < st.count_pmf.size else 0.0
        exact = float(exact_pmf[k]) if k < exact_pmf.size else 0.0
        rows.append(row("count_pmf", k, Estimate(p, se), exact))
    return OutputTable(["quantity", "probe", "estimate", "std_error", "exact", "z"], rows)


def cmd_estimate(args) -> OutputTable:
    if args.example:
        record = data_ingest.parse_records(data_ingest.example_records_text(), args.origin)
    elif args.input:
        record = data_ingest.load_records(args.input, args.origin)
    else:
        raise ValueError("give an input file or --example")
    res = stats.ci_mean(data_ingest.to_sample(record), args.confidence, args.method)
    return OutputTable(
        ["n", "mean", "ci_low", "ci_high", "confidence", "method"],
        [[res.n, res.mean, res.ci_low, res.ci_high, res.confidence, res.method]],
    )


def figure_tables(seed: int) -> dict[str, OutputTable]:
    """Data behind the three figures: Poisson(10) counts, RW return counts, a sample RW path."""
    fig1 = poisson_model.count_pmf(1.0 / FIGURE_RATE_DENOMINATOR, FIGURE_STEPS)
    fig2 = exact_rw.return_count_pmf(FIGURE_STEPS)
    lz = exact_rw.last_zero_pmf(FIGURE_STEPS)
    cdf = np.cumsum(lz.mass)
    steps = StepSource(replicate_stream(seed, 0)).take(FIGURE_STEPS)
    position = np.concatenate([[0], np.cumsum(steps, dtype=np.int64)])
    return {
        "fig1.csv": OutputTable(["k", "pmf"], [[k, p] for k, p in enumerate(fig1.mass)]),
        "fig2.csv": OutputTable(["r", "pmf"], [[r, p] for r, p in enumerate(fig2.mass)]),
        "fig3.csv": OutputTable(
            ["step", "position", "last_zero_cdf"],
            [[n, int(position[n]), float(cdf[n // 2])] for n in range(FIGURE_STEPS + 1)],
        ),
    }


def cmd_figures(args) -> OutputTable:
    out_dir = Path(args.out or "figures")
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for name, table in figure_tables(args.seed).items():
        path = out_dir / name
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(table.to_csv())
        rows.append([str(path), len(table.rows)])
    return OutputTable(["file", "rows"], rows)


# ---------------------------------------------------------------------------
# argument parsing


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--format", choices=("csv", "json"), default=default("csv"))
    p.add_argument("--seed", type=_seed, default=default(0), help="unsigned 64-bit base seed")
    p.add_argument("--out", default=default(None), help="output file (figures: output directory)")
    return p


def _rate_flags(p):
    p.add_argument("--rate-denominator", type=float, help="rate = 1 / value (e.g. 30 for one event per 30 years)")
    p.add_argument("--rate", type=float, help="rate as a decimal")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pandemic-renewal",
        description="Poisson and random-walk renewal models of rare event occurrence.",
        parents=[_global_flags(False)],
    )
    common = _global_flags(True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tail", parents=[common], help="interarrival tail P(X > t)")
    p.add_argument("model", choices=("exp", "rw"))
    _rate_flags(p)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--floor-even", action="store_true", help="round odd rw epochs down instead of failing")
    p.set_defaults(func=cmd_tail)

    p = sub.add_parser("pmf", parents=[common], help="full pmf tables")
    p.add_argument("target", choices=("poisson", "rw-returns", "arcsine"))
    _rate_flags(p)
    p.add_argument("--mean", type=float, help="poisson mean (alternative to rate and horizon)")
    p.add_argument("--horizon", type=float, default=300.0)
    p.add_argument("--kmax", type=int)
    p.add_argument("--steps", type=float, default=300)
    p.add_argument("--floor-even", action="store_true")
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("arcsine", parents=[common], help="P(last return <= epoch) within steps")
    p.add_argument("--steps", type=float, default=FIGURE_STEPS)
    p.add_argument("--epoch", type=float, default=FIGURE_SPLIT)
    p.add_argument("--floor-even", action="store_true")
    p.set_defaults(func=cmd_arcsine)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo ensemble vs exact values")
    p.add_argument("model", nargs="?", choices=("exp", "rw"), default="rw")
    _rate_flags(p)
    p.add_argument("--horizon", type=float, default=300.0)
    p.add_argument("--reps", type=int, default=100_000)
    p.add_argument("--gap", type=float, action="append", help="probe P(first gap > value); repeatable")
    p.add_argument("--last", type=float, action="append", help="probe P(last event <= value); repeatable")
    p.add_argument("--workers", type=int, default=1, help="worker processes (output does not depend on it)")
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="rw step cap per draw")
    p.add_argument("--unit-scale", type=float, default=1.0, help="time units per rw step")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", parents=[common], help="mean interarrival and confidence interval")
    p.add_argument("input", nargs="?", help="year,label CSV file")
    p.add_argument("--example", action="store_true", help="use the bundled illustrative record")
    p.add_argument("--confidence", type=float, default=0.90)
    p.add_argument("--method", choices=stats.METHODS, default="exponential")
    p.add_argument("--origin", type=int, default=data_ingest.DEFAULT_ORIGIN)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("figures", parents=[common], help="write fig1.csv, fig2.csv, fig3.csv to --out")
    p.set_defaults(func=cmd_figures)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        table = args.func(args)
        text = table.render(args.format)
        if args.out and args.command != "figures":
            Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        else:
            sys.stdout.write(text)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
