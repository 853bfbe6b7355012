"""Command-line experiment runner.

Subcommands: simulate, estimate, envelope, plot, reproduce-paper.  A JSON
config (or a named preset) fixes the model, window, range grids, probe
lattice, replicate count and master seed; reruns with the same config and
seed produce byte-identical CSV outputs.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import experiments
from .patternio import read_summary
from .plotting import summary_slice_charts

__all__ = ["main"]


def _config_from_args(args) -> experiments.ExperimentConfig:
    if args.config:
        raw = experiments.load_config(args.config).raw
    elif args.preset:
        raw = experiments.preset_config(args.preset)
    else:
        raise experiments.ConfigError("provide --config or --preset")
    if args.seed is not None:
        raw["seed"] = args.seed
    if args.replicates is not None:
        raw["n_replicates"] = args.replicates
    return experiments.load_config(raw)


def _add_common(sub):
    sub.add_argument("--config", help="experiment JSON config path")
    sub.add_argument(
        "--preset",
        choices=experiments.PRESETS,
        help="use a built-in experiment preset instead of --config",
    )
    sub.add_argument("--seed", type=int, help="override the master seed")
    sub.add_argument("--replicates", type=int, help="override the replicate count")
    sub.add_argument("--out", default="out", help="output directory")
    sub.add_argument(
        "--jobs", type=int, default=None, help="parallel workers (or $STPP_LAB_JOBS)"
    )


def cmd_simulate(args) -> int:
    cfg = _config_from_args(args)
    manifest = experiments.run_simulate(cfg, args.out, experiments.default_jobs(args.jobs))
    print(f"wrote {len(manifest['outputs'])} pattern files to {args.out}")
    return 0


def cmd_estimate(args) -> int:
    cfg = _config_from_args(args)
    patterns = args.patterns or sorted(
        str(p)
        for p in Path(args.out).glob("pattern_*.csv")
        if not p.name.endswith("_unthinned.csv")
    )
    if not patterns:
        print("no pattern files found; run simulate first", file=sys.stderr)
        return 2
    experiments.run_estimate(cfg, patterns, args.out)
    print(f"estimated {len(patterns)} patterns; pooled_summary.csv in {args.out}")
    return 0


def cmd_envelope(args) -> int:
    cfg = _config_from_args(args)
    verdict = experiments.run_envelope(cfg, args.out)
    print(
        f"envelope ({verdict['statistic']}, n_sim={verdict['n_sim']}): "
        f"coverage of 1 = {verdict['coverage_of_one']:.3f} over "
        f"{verdict['defined_cells']} defined cells"
    )
    return 0


def cmd_plot(args) -> int:
    for summary_path in args.summaries:
        summary = read_summary(summary_path)
        stem = Path(summary_path).stem
        for p in summary_slice_charts(summary, args.out, stem=stem):
            print(f"wrote {p}")
    return 0


def cmd_reproduce_paper(args) -> int:
    """Run all three presets end to end: simulate, estimate, envelope, plot."""
    failures = 0
    for preset in experiments.PRESETS:
        out = Path(args.out) / preset
        raw = experiments.preset_config(
            preset,
            n_replicates=args.replicates or 20,
            seed=args.seed if args.seed is not None else 20260824,
        )
        raw["envelope"]["n_sim"] = max(20, (args.replicates or 20))
        cfg = experiments.load_config(raw)
        print(f"[{preset}] simulating {cfg.n_replicates} replicates")
        experiments.run_simulate(cfg, out, experiments.default_jobs(args.jobs))
        patterns = sorted(
            str(p)
            for p in out.glob("pattern_*.csv")
            if not p.name.endswith("_unthinned.csv")
        )
        experiments.run_estimate(cfg, patterns, out)
        verdict = experiments.run_envelope(cfg, out)
        summary_slice_charts(read_summary(out / "pooled_summary.csv"), out, stem="pooled")
        print(
            f"[{preset}] envelope coverage of 1: {verdict['coverage_of_one']:.3f} "
            f"({verdict['defined_cells']} defined cells)"
        )
        if preset == "poisson_paper" and verdict["coverage_of_one"] < 0.9:
            failures += 1
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stpp-lab",
        description="spatio-temporal inhomogeneous summary statistics harness",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("simulate", help="simulate replicate point patterns")
    _add_common(s)
    s.set_defaults(fn=cmd_simulate)

    s = subs.add_parser("estimate", help="estimate F/G/J/K grids for patterns")
    _add_common(s)
    s.add_argument("patterns", nargs="*", help="pattern CSV paths (default: <out>/pattern_*.csv)")
    s.set_defaults(fn=cmd_estimate)

    s = subs.add_parser("envelope", help="Monte Carlo envelope under the model")
    _add_common(s)
    s.set_defaults(fn=cmd_envelope)

    s = subs.add_parser("plot", help="render SVG slice charts from summary CSVs")
    s.add_argument("summaries", nargs="+", help="summary CSV paths")
    s.add_argument("--out", default="out", help="output directory")
    s.set_defaults(fn=cmd_plot)

    s = subs.add_parser(
        "reproduce-paper", help="run all three presets end to end at desk scale"
    )
    _add_common(s)
    s.set_defaults(fn=cmd_reproduce_paper)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except experiments.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
