"""Command-line entry point.

Three subcommands drive batch experiments:

* ``run``          -- execute the configured sweep, write summary CSV
* ``convergence``  -- emit per-iteration trace rows only
* ``sweep``        -- like run, with the swept parameter given on the line

``--plot`` additionally renders a PNG next to each CSV. Exit codes:
0 success, 2 configuration error, 3 I/O error.
"""

import argparse
import sys
from dataclasses import replace

from .config import SWEEPABLE, ExperimentSpec, load_config, parse_config
from .errors import ConfigError
from .experiments import run_experiment, trace_path_for
from . import figures


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="satvec",
        description="Satellite-terrestrial VEC offloading experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run the configured experiment")
    run.add_argument("--config", required=True, help="path to the config file")
    _common_flags(run)

    conv = sub.add_parser("convergence", help="emit per-iteration trace rows only")
    conv.add_argument("--config", required=True, help="path to the config file")
    _common_flags(conv)

    sweep = sub.add_parser("sweep", help="sweep one parameter from the command line")
    sweep.add_argument("--config", help="optional config file with defaults")
    sweep.add_argument("--param", required=True, choices=SWEEPABLE)
    sweep.add_argument("--values", required=True, help="comma-separated sweep values")
    _common_flags(sweep)
    return parser


def _common_flags(sub_parser):
    sub_parser.add_argument("--seed", type=int, help="override the config seed")
    sub_parser.add_argument("--out", help="override the output CSV path")
    sub_parser.add_argument(
        "--plot", action="store_true", help="render a PNG next to each CSV"
    )


def _load_spec(args) -> ExperimentSpec:
    if getattr(args, "config", None):
        spec = load_config(args.config)
    else:
        spec = parse_config("")
    if args.command == "sweep":
        lines = [f"sweep_param = {args.param}", f"sweep_values = {args.values}"]
        override = parse_config("\n".join(lines))
        spec = replace(
            spec, sweep_param=override.sweep_param, sweep_values=override.sweep_values
        )
    if args.seed is not None:
        spec = replace(spec, seed=args.seed)
    if args.out:
        spec = replace(spec, output_path=args.out)
    return spec


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        spec = _load_spec(args)
    except FileNotFoundError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2

    trace_only = args.command == "convergence"
    if trace_only:
        spec = replace(spec, schemes=("proposed",))
    try:
        summary, traces, written = run_experiment(spec, trace_only=trace_only)
        if args.plot:
            if trace_only:
                written.append(
                    figures.render_trace_figure(traces, _png_path(spec.output_path))
                )
            else:
                written.append(
                    figures.render_sweep_figure(summary, _png_path(spec.output_path))
                )
                if spec.emit_trace and traces:
                    tpath = trace_path_for(spec.output_path)
                    written.append(figures.render_trace_figure(traces, _png_path(tpath)))
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 3
    for path in written:
        print(f"wrote {path}")
    return 0


def _png_path(csv_path: str) -> str:
    stem, dot, _ = csv_path.rpartition(".")
    return (stem if dot else csv_path) + ".png"


if __name__ == "__main__":
    raise SystemExit(main())
