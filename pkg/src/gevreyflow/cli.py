"""Command-line entry point.

One subcommand per scenario, plus `all` for the six evolution scenarios
in sequence.  Each run parses a config (packaged default unless --config
is given), applies --set/--seed overrides, executes the runner, writes
report.json / series CSVs / runs.jsonl under <out>/<scenario>/, renders
one SVG per series under plots/, and prints one line per verdict.

Exit codes: 0 all verdicts passed, 2 at least one verdict failed,
1 execution error (bad config, blow-up, I/O).  `all` stops at the first
execution error but keeps going past verdict failures.
"""

from __future__ import annotations

import argparse
import os
import sys
from importlib import resources
from pathlib import Path

from .config import parse_config, parse_config_text
from .errors import GevreyError
from .harness import RUNNERS, ExperimentReport
from .reporting import PlotStyle, write_plot, write_report

_COMMANDS = {
    "conserve": "conservation",
    "sigma-scaling": "sigma-scaling",
    "damping": "damping",
    "iterate": "iteration",
    "radius": "radius",
    "coupled": "coupled",
    "inequalities": "inequalities",
}
_ALL_ORDER = ("conserve", "sigma-scaling", "damping", "iterate", "radius", "coupled")

_STATIC_STYLES = {
    ("conservation", "invariants"): PlotStyle(title="invariants", x_label="t"),
    ("conservation", "drift"): PlotStyle(title="relative invariant drift", x_label="t", y_log=True),
    ("sigma-scaling", "a_sigma"): PlotStyle(title="weighted functional", x_label="t", y_log=True),
    ("damping", "mass_decay"): PlotStyle(title="mass under damping", x_label="t", y_log=True),
    ("damping", "rate_residual"): PlotStyle(title="rate identity residual", x_label="t"),
    ("iteration", "mass_windows"): PlotStyle(title="window masses", x_label="window"),
    ("iteration", "decay"): PlotStyle(title="interpolated decay", x_label="t", y_log=True),
    ("iteration", "window_residuals"): PlotStyle(title="window residuals", x_label="window"),
    ("coupled", "mass_windows"): PlotStyle(title="window masses", x_label="window"),
    ("coupled", "decay"): PlotStyle(title="interpolated decay", x_label="t", y_log=True),
    ("coupled", "window_residuals"): PlotStyle(title="window residuals", x_label="window"),
    ("radius", "radius"): PlotStyle(title="analyticity radius", x_label="t"),
}


def _style_for(report: ExperimentReport, name: str) -> PlotStyle:
    if report.scenario == "sigma-scaling" and name == "drift_vs_sigma":
        slope = report.fits.get("scaling", {}).get("slope")
        note = f"slope {slope:.3f}" if slope is not None else ""
        return PlotStyle(title="drift against weight", x_label="sigma", x_log=True, y_log=True, annotation=note)
    style = _STATIC_STYLES.get((report.scenario, name))
    if style is not None:
        if report.scenario == "radius" and name == "radius":
            c = report.fits.get("calibration", {}).get("c")
            if c is not None:
                return PlotStyle(title=style.title, x_label=style.x_label, annotation=f"c = {c:.4g}")
        return style
    return PlotStyle(title=name)


def _default_config_text(command: str) -> str:
    name = command.replace("-", "_") + ".cfg"
    return resources.files("gevreyflow").joinpath("configs", name).read_text(encoding="utf-8")


def _load_config(command: str, args):
    overrides = list(args.set or [])
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.config is not None:
        return parse_config(args.config, overrides)
    return parse_config_text(_default_config_text(command), overrides)


def _out_root(args, cfg) -> Path:
    if args.out is not None:
        return Path(args.out)
    env = os.environ.get("GEVREYFLOW_OUT")
    if env:
        return Path(env)
    return Path(cfg.out_dir)


def _run_one(command: str, args) -> int:
    scenario = _COMMANDS[command]
    cfg = _load_config(command, args)
    report = RUNNERS[scenario](cfg)
    out_dir = _out_root(args, cfg) / scenario
    report_path = write_report(report, out_dir)
    for name, table in report.series.items():
        write_plot(table, _style_for(report, name), out_dir / "plots" / f"{name}.svg")
    if not args.quiet:
        for name, v in report.verdicts.items():
            status = "PASS" if v.passed else "FAIL"
            print(f"{scenario}: {name}: {status} (margin {v.margin:.3g}, tolerance {v.tolerance:.3g})")
        print(f"{scenario}: report {report_path}")
    return 0 if report.passed else 2


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="gevreyflow",
        description="Damped dispersive flows: conservation, decay, and radius experiments.",
    )
    sub = parser.add_subparsers(dest="command", metavar="SCENARIO")
    for command in (*_COMMANDS, "all"):
        p = sub.add_parser(command, help=f"run the {command} scenario" if command != "all" else "run the six evolution scenarios")
        p.add_argument("--config", metavar="PATH", help="config file (default: packaged scenario config)")
        p.add_argument("--out", metavar="DIR", help="output root (default: $GEVREYFLOW_OUT or config io.out_dir)")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key, repeatable")
        p.add_argument("--seed", type=int, help="override the run seed")
        p.add_argument("--quiet", action="store_true", help="suppress verdict lines")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 1

    try:
        if args.command == "all":
            if args.config is not None:
                print("error: --config cannot apply to all scenarios at once", file=sys.stderr)
                return 1
            worst = 0
            for command in _ALL_ORDER:
                worst = max(worst, _run_one(command, args))
            return worst
        return _run_one(args.command, args)
    except (GevreyError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
