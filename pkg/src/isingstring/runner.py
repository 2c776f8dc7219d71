"""Named experiments: single runs, parameter sweeps, cutoff-convergence studies.

Each run writes one directory: ``config.echo`` (effective parameters,
re-parseable), ``frames.csv`` (observable time series, fixed schema),
``summary.json`` (detector + convergence + drift records), ``manifest.json``
(code version). These files are the stable contract for post-processing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CapacityError, DomainError, SimulationError
from .hamiltonian import HamiltonianOperator
from .hilbert import build_initial_state
from .krylov import EvolutionReport, PropagationPlan, evolve_and_sample
from .observables import (MeasurementTables, classify_string_fate, csv_header,
                          csv_row, measure_frame)
from .params import SystemParams, format_config
from .sbt import SbtResult, detect_sbt
from .semiclassical import run_semiclassical

FULL = "full"
SEMICLASSICAL = "semiclassical"

DEFAULT_MEMORY_BUDGET = 8 << 30  # bytes

SWEEPABLE = ("g", "omega0", "h_x", "lambda", "n_max")


@dataclass
class ConvergenceReport:
    """Phonon-cutoff adequacy: n_max must exceed max_t,j (<n_j> + 2 std n_j)."""

    n_max_used: int
    max_occupation_bound: float
    passed: bool
    paired_max_deviation: float | None = None


@dataclass
class SweepSpec:
    base: SystemParams
    sweep_key: str
    values: list
    backend: str = FULL

    def __post_init__(self):
        if self.sweep_key not in SWEEPABLE:
            raise DomainError(f"sweep key must be one of {SWEEPABLE}, "
                              f"got '{self.sweep_key}'")
        if len(self.values) == 0:
            raise DomainError("sweep values must be nonempty")
        if self.backend not in (FULL, SEMICLASSICAL):
            raise DomainError(f"unknown backend '{self.backend}'")


@dataclass
class RunResult:
    params: SystemParams
    backend: str
    frames: list
    sbt: SbtResult
    fate: str | None
    convergence: ConvergenceReport
    evolution: EvolutionReport
    out_dir: Path | None = None


def required_bytes(dim: int, krylov_dim: int) -> int:
    # Krylov basis + a few work vectors, complex128
    return 16 * dim * (krylov_dim + 6)


def check_memory_budget(params: SystemParams, budget: int | None = None) -> None:
    budget = DEFAULT_MEMORY_BUDGET if budget is None else budget
    dim = (2 ** params.L) * (params.n_max + 1) ** params.L
    needed = required_bytes(dim, params.krylov_dim)
    if needed > budget:
        raise CapacityError(
            f"state dimension {dim} needs ~{needed / 2**30:.1f} GiB "
            f"(krylov_dim = {params.krylov_dim}), over the "
            f"{budget / 2**30:.1f} GiB budget")


def check_convergence(frames, n_max: int, paired_frames=None) -> ConvergenceReport:
    """Evaluate the cutoff criterion on sampled phonon statistics."""
    bound = 0.0
    for f in frames:
        bound = max(bound, float(np.max(f.n_mean + 2.0 * f.n_std)))
    report = ConvergenceReport(n_max_used=n_max, max_occupation_bound=bound,
                               passed=n_max > bound)
    if paired_frames is not None:
        report.paired_max_deviation = frames_max_deviation(frames, paired_frames)
    return report


_COMPARED_FIELDS = ("energy", "D_in", "D_bd", "Delta_in", "Delta_bd",
                    "S_cr", "S_ed", "D_bond", "sigma_z", "n_mean", "n_std")


def frames_max_deviation(frames_a, frames_b) -> float:
    if len(frames_a) != len(frames_b):
        raise DomainError("frame series have different lengths")
    dev = 0.0
    for fa, fb in zip(frames_a, frames_b):
        for name in _COMPARED_FIELDS:
            dev = max(dev, float(np.max(np.abs(np.asarray(getattr(fa, name))
                                               - np.asarray(getattr(fb, name))))))
    return dev


def fate_at_tau(frames, sbt: SbtResult, w: int) -> str | None:
    if not sbt.detected:
        return None
    for f in frames:
        if f.t >= sbt.tau - 1e-9:
            return classify_string_fate(f.S_cr, f.S_ed, w)
    return classify_string_fate(frames[-1].S_cr, frames[-1].S_ed, w)


def run_experiment(params: SystemParams, backend: str = FULL,
                   out_dir=None, memory_budget: int | None = None,
                   eom_dt: float = 0.01, progress=None) -> RunResult:
    """Evolve, measure, detect the string-breaking time, and persist."""
    if backend == FULL:
        check_memory_budget(params, memory_budget)
        H = HamiltonianOperator.build(params)
        psi0 = build_initial_state(params)
        tables = MeasurementTables(params.L, params.l, params.w)

        def observer(t, psi, energy, norm):
            frame = measure_frame(psi, params, energy, t=t, backend=FULL,
                                  tables=tables)
            if progress is not None:
                progress(frame)
            return frame

        frames, evolution = evolve_and_sample(H, psi0, PropagationPlan.from_params(params),
                                              observer)
    elif backend == SEMICLASSICAL:
        frames, evolution = run_semiclassical(params, dt=eom_dt)
        if progress is not None:
            for f in frames:
                progress(f)
    else:
        raise DomainError(f"unknown backend '{backend}'")

    sbt = detect_sbt(frames, params.lambda_)
    fate = fate_at_tau(frames, sbt, params.w)
    convergence = check_convergence(frames, params.n_max)
    result = RunResult(params=params, backend=backend, frames=frames, sbt=sbt,
                       fate=fate, convergence=convergence, evolution=evolution)
    if out_dir is not None:
        result.out_dir = write_run_dir(out_dir, result)
    return result


def run_convergence_study(params: SystemParams, backend: str = FULL,
                          out_dir=None, memory_budget=None,
                          eom_dt: float = 0.01) -> RunResult:
    """Run at n_max and again at n_max + 1; report the observable deviation."""
    result = run_experiment(params, backend, out_dir, memory_budget, eom_dt)
    paired = run_experiment(params.replace(n_max=params.n_max + 1), backend,
                            None, memory_budget, eom_dt)
    result.convergence.paired_max_deviation = frames_max_deviation(
        result.frames, paired.frames)
    if result.out_dir is not None:
        _write_summary(result.out_dir, result)
    return result


def summary_dict(result: RunResult) -> dict:
    conv = result.convergence
    evo = result.evolution
    return {
        "backend": result.backend,
        "lambda": result.params.lambda_,
        "tau": result.sbt.tau,
        "kind": result.sbt.kind,
        "band_margin": result.sbt.band_margin,
        "fate_at_tau": result.fate,
        "convergence": {
            "n_max": conv.n_max_used,
            "max_occupation_bound": conv.max_occupation_bound,
            "passed": conv.passed,
            "paired_max_deviation": conv.paired_max_deviation,
            "phonons_frozen": result.params.n_max == 0,
        },
        "drift": {
            "energy_initial": evo.energy_initial,
            "max_norm_error": evo.max_norm_error,
            "max_energy_drift": evo.max_energy_drift,
            "n_steps": evo.n_steps,
        },
        "n_frames": len(result.frames),
    }


def write_frames_csv(path, frames, L: int, n_bonds: int) -> None:
    lines = [",".join(csv_header(L, n_bonds))]
    lines.extend(csv_row(f) for f in frames)
    Path(path).write_text("\n".join(lines) + "\n")


def _write_summary(run_dir: Path, result: RunResult) -> None:
    (run_dir / "summary.json").write_text(
        json.dumps(summary_dict(result), indent=2, sort_keys=True) + "\n")


def write_run_dir(out_dir, result: RunResult) -> Path:
    run_dir = Path(out_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / "config.echo").write_text(format_config(result.params))
    write_frames_csv(run_dir / "frames.csv", result.frames,
                     result.params.L, result.params.n_bonds)
    _write_summary(run_dir, result)
    manifest = {"package": "isingstring", "version": __version__,
                "schema": 1, "backend": result.backend}
    (run_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return run_dir


def _value_for(key: str, value):
    return int(value) if key == "n_max" else float(value)


def _params_with(base: SystemParams, key: str, value) -> SystemParams:
    field = "lambda_" if key == "lambda" else key
    return base.replace(**{field: _value_for(key, value)})


def run_sweep(spec: SweepSpec, out_root, memory_budget=None, eom_dt=0.01,
              progress=None) -> list:
    """One run per sweep value; failures are recorded per row and do not
    abort the remaining values."""
    out_root = Path(out_root)
    out_root.mkdir(parents=True, exist_ok=True)
    rows = []
    for value in spec.values:
        row = {"value": float(value), "tau": None, "kind": None,
               "fate": None, "error": None}
        try:
            params = _params_with(spec.base, spec.sweep_key, value)
            run_dir = out_root / f"{spec.sweep_key}_{value!r}"
            result = run_experiment(params, spec.backend, run_dir,
                                    memory_budget, eom_dt, progress)
            row.update(tau=result.sbt.tau, kind=result.sbt.kind, fate=result.fate)
        except SimulationError as exc:
            row["error"] = str(exc)
        rows.append(row)
    lines = ["value,tau,kind,fate,error"]
    for row in rows:
        tau = "" if row["tau"] is None else format(row["tau"], ".17g")
        err = (row["error"] or "").replace("\n", " ").replace(",", ";")
        lines.append(f"{format(row['value'], '.17g')},{tau},"
                     f"{row['kind'] or ''},{row['fate'] or ''},{err}")
    (out_root / "sweep_table.csv").write_text("\n".join(lines) + "\n")
    return rows
