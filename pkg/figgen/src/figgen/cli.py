"""figgen RUN_DIR [--panels LIST] [--fmt png|pdf] [--out DIR]

Renders every applicable panel from a run directory (frames.csv + summary)
or, for a directory holding sweep_table.csv, the tau-vs-parameter curve.
Images land next to the data by default and overwrite deterministically.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .loader import SchemaError, load_run, load_sweep_table
from .panels import RUN_PANELS, save, sbt_curve


def build_parser():
    parser = argparse.ArgumentParser(prog="figgen",
                                     description=__doc__.splitlines()[2])
    parser.add_argument("run_dir", help="run directory (or sweep directory)")
    parser.add_argument("--panels", default=None,
                        help=f"comma list from: {', '.join(RUN_PANELS)}, sbt-curve "
                             "(default: all applicable)")
    parser.add_argument("--fmt", choices=["png", "pdf"], default="png")
    parser.add_argument("--out", default=None,
                        help="output directory (default: the run directory)")
    return parser


def render_run(run_dir, panels=None, fmt="png", out_dir=None):
    artifact = load_run(run_dir)
    out = Path(out_dir) if out_dir else Path(run_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for name in panels or RUN_PANELS:
        if name not in RUN_PANELS:
            raise SchemaError(f"unknown panel '{name}' "
                              f"(available: {', '.join(RUN_PANELS)}, sbt-curve)")
        path = out / f"{name}.{fmt}"
        save(RUN_PANELS[name](artifact), path, fmt)
        written.append(path)
    return written


def render_sweep(sweep_dir, fmt="png", out_dir=None):
    rows = load_sweep_table(sweep_dir)
    out = Path(out_dir) if out_dir else Path(sweep_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"sbt-curve.{fmt}"
    save(sbt_curve(rows), path, fmt)
    return [path]


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    run_dir = Path(args.run_dir)
    panels = [p.strip() for p in args.panels.split(",")] if args.panels else None
    try:
        if (run_dir / "sweep_table.csv").exists() and (
                panels is None or panels == ["sbt-curve"]):
            written = render_sweep(run_dir, args.fmt, args.out)
        else:
            written = render_run(run_dir, panels, args.fmt, args.out)
    except (SchemaError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for path in written:
        print(path)
    return 0


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
