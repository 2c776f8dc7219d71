"""Command-line front end.

Subcommands: ``run``, ``semiclassical``, ``sweep``, ``convergence``,
``oracle-check``. Exit status: 0 success, 1 domain/config error, 2 capacity
error. Overrides (``--set key=value``) are applied after the config file is
parsed and are echoed in the run directory's ``config.echo``.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from .dense import dense_assemble, dense_evolve
from .errors import CapacityError, ConfigError, SimulationError
from .hamiltonian import HamiltonianOperator
from .hilbert import build_initial_state
from .krylov import PropagationPlan, evolve_and_sample
from .params import load_params
from .runner import SweepSpec, run_convergence_study, run_experiment, run_sweep


def _parse_overrides(pairs):
    overrides = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise ConfigError(f"override {pair!r} is not of the form KEY=VALUE")
        key, value = pair.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def _default_out():
    return Path("runs") / time.strftime("%Y%m%d-%H%M%S")


def _progress(frame):
    print(f"  t={frame.t:8.2f}  D_in={frame.D_in:6.3f}  D_bd={frame.D_bd:6.3f}  "
          f"S_cr={frame.S_cr:7.3f}  S_ed={frame.S_ed:7.3f}", file=sys.stderr)


def _add_common(parser, backend_choice=True):
    parser.add_argument("--config", required=True, help="flat key=value config file")
    parser.add_argument("--out", default=None, help="output run directory "
                        "(default: ./runs/<timestamp>)")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE", dest="sets",
                        help="override a config key (repeatable)")
    parser.add_argument("--quiet", action="store_true", help="suppress progress lines")
    parser.add_argument("--eom-dt", type=float, default=0.01,
                        help="semiclassical integrator step")
    if backend_choice:
        parser.add_argument("--backend", choices=["full", "semiclassical"],
                            default="full")


def build_parser():
    parser = argparse.ArgumentParser(prog="isingstring",
                                     description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    _add_common(sub.add_parser("run", help="single evolution + detector"))
    _add_common(sub.add_parser("semiclassical",
                               help="single run on the coherent-state backend"),
                backend_choice=False)
    sweep = sub.add_parser("sweep", help="one run per value of a parameter")
    _add_common(sweep)
    sweep.add_argument("--sweep-key", required=True,
                       choices=["g", "omega0", "h_x", "lambda", "n_max"])
    sweep.add_argument("--sweep-values", required=True,
                       help="comma-separated list of values")
    _add_common(sub.add_parser("convergence",
                               help="run at n_max and n_max + 1 and compare"))
    oracle = sub.add_parser("oracle-check",
                            help="compare krylov propagation against the dense "
                                 "eigendecomposition backend")
    oracle.add_argument("--config", required=True)
    oracle.add_argument("--set", action="append", metavar="KEY=VALUE", dest="sets")
    oracle.add_argument("--tol", type=float, default=1e-8)
    return parser


def _report_run(result):
    if result.sbt.detected:
        print(f"tau = {result.sbt.tau:.6g}  (lambda = {result.params.lambda_}, "
              f"fate: {result.fate})")
    else:
        print(f"no crossing in window (band margin {result.sbt.band_margin:.6g})")
    conv = result.convergence
    note = " [phonons frozen: n_max = 0]" if result.params.n_max == 0 else ""
    print(f"cutoff bound max(<n> + 2 std) = {conv.max_occupation_bound:.6g} "
          f"vs n_max = {conv.n_max_used}: "
          f"{'converged' if conv.passed else 'NOT converged'}{note}")
    if conv.paired_max_deviation is not None:
        print(f"paired n_max + 1 deviation: {conv.paired_max_deviation:.3e}")
    evo = result.evolution
    print(f"drift: norm {evo.max_norm_error:.3e}, "
          f"relative energy {evo.max_energy_drift:.3e}")
    if result.out_dir is not None:
        print(f"run directory: {result.out_dir}")


def _oracle_check(args) -> int:
    params = load_params(args.config, _parse_overrides(args.sets))
    H = HamiltonianOperator.build(params)
    psi0 = build_initial_state(params)
    exact = dense_evolve(dense_assemble(H), psi0, params.t_max)
    outputs, _ = evolve_and_sample(H, psi0, PropagationPlan.from_params(params))
    _, approx = outputs[-1]
    diff = float(np.max(np.abs(approx.amplitudes - exact.amplitudes)))
    print(f"max |amplitude difference| at t = {params.t_max}: {diff:.3e} "
          f"(threshold {args.tol:.1e})")
    if diff > args.tol:
        print("oracle check FAILED", file=sys.stderr)
        return 1
    print("oracle check passed")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "oracle-check":
            return _oracle_check(args)
        params = load_params(args.config, _parse_overrides(args.sets))
        out = Path(args.out) if args.out else _default_out()
        progress = None if args.quiet else _progress
        if args.command == "run":
            result = run_experiment(params, args.backend, out,
                                    eom_dt=args.eom_dt, progress=progress)
            _report_run(result)
        elif args.command == "semiclassical":
            result = run_experiment(params, "semiclassical", out,
                                    eom_dt=args.eom_dt, progress=progress)
            _report_run(result)
        elif args.command == "sweep":
            try:
                values = [float(v) for v in args.sweep_values.split(",") if v.strip()]
            except ValueError:
                raise ConfigError(f"cannot parse sweep values "
                                  f"{args.sweep_values!r}") from None
            spec = SweepSpec(params, args.sweep_key, values, args.backend)
            rows = run_sweep(spec, out, eom_dt=args.eom_dt, progress=progress)
            for row in rows:
                tau = "none" if row["tau"] is None else f"{row['tau']:.6g}"
                status = row["error"] or f"tau = {tau}, fate: {row['fate']}"
                print(f"{args.sweep_key} = {row['value']:g}: {status}")
            print(f"sweep table: {out / 'sweep_table.csv'}")
        elif args.command == "convergence":
            result = run_convergence_study(params, args.backend, out,
                                           eom_dt=args.eom_dt)
            _report_run(result)
        return 0
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
