import json

import pytest

from isingstring.errors import CapacityError, DomainError
from isingstring.observables import csv_header
from isingstring.params import load_params
from isingstring.runner import (SweepSpec, check_convergence,
                                frames_max_deviation, run_convergence_study,
                                run_experiment, run_sweep)
from conftest import small_params


def quick_params(**overrides):
    base = dict(L=6, w=2, l=2, h_x=0.3, h_z=1.0, t_max=3.0, dt_sample=0.5,
                dt_step=0.1, g=0.0, n_max=0, krylov_dim=20, krylov_tol=1e-10)
    base.update(overrides)
    return small_params(**base)


def test_run_dir_contents(tmp_path):
    p = quick_params()
    result = run_experiment(p, "full", tmp_path / "run")
    run_dir = result.out_dir
    assert (run_dir / "config.echo").exists()
    assert load_params(run_dir / "config.echo") == p
    lines = (run_dir / "frames.csv").read_text().strip().splitlines()
    assert lines[0] == ",".join(csv_header(p.L, p.n_bonds))
    assert len(lines) == 1 + 7  # header + frames at t = 0 .. 3
    summary = json.loads((run_dir / "summary.json").read_text())
    assert summary["backend"] == "full"
    assert summary["lambda"] == 0.25
    assert set(summary["convergence"]) >= {"n_max", "max_occupation_bound", "passed"}
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["package"] == "isingstring"


def test_runs_are_byte_deterministic(tmp_path):
    p = quick_params(g=0.1, n_max=1, omega0=0.7)
    run_experiment(p, "full", tmp_path / "a")
    run_experiment(p, "full", tmp_path / "b")
    assert ((tmp_path / "a" / "frames.csv").read_bytes()
            == (tmp_path / "b" / "frames.csv").read_bytes())
    assert ((tmp_path / "a" / "summary.json").read_bytes()
            == (tmp_path / "b" / "summary.json").read_bytes())


def test_t_max_zero_single_frame():
    result = run_experiment(quick_params(t_max=0.0), "full")
    assert len(result.frames) == 1
    assert not result.sbt.detected


def test_memory_budget_names_dimension():
    p = quick_params(L=16, w=4, l=6, n_max=3)
    with pytest.raises(CapacityError, match=str(4**16 * 2**16)):
        run_experiment(p, "full")


def test_convergence_g_zero_passes_for_positive_cutoff():
    result = run_experiment(quick_params(n_max=1), "full")
    conv = result.convergence
    assert conv.max_occupation_bound == 0.0
    assert conv.passed
    # n_max = 0 cannot certify a frozen sector: inequality is strict
    assert not check_convergence(result.frames, 0).passed


def test_convergence_inadequate_cutoff_detected():
    # strong driving at a tiny cutoff: bound reaches the cutoff itself
    p = quick_params(L=4, w=2, l=1, g=0.8, omega0=0.4, n_max=1, t_max=4.0)
    result = run_experiment(p, "full")
    assert not result.convergence.passed


def test_paired_convergence_study(tmp_path):
    p = quick_params(L=4, w=2, l=1, g=0.05, omega0=1.0, n_max=2, t_max=2.0)
    result = run_convergence_study(p, "full", tmp_path / "conv")
    dev = result.convergence.paired_max_deviation
    assert dev is not None and dev < 1e-3
    summary = json.loads((result.out_dir / "summary.json").read_text())
    assert summary["convergence"]["paired_max_deviation"] == dev


def test_frames_max_deviation_requires_alignment():
    r = run_experiment(quick_params(t_max=1.0), "full")
    with pytest.raises(DomainError):
        frames_max_deviation(r.frames, r.frames[:-1])


def test_sweep_lambda(tmp_path):
    p = quick_params(L=8, w=4, l=2, t_max=30.0, dt_step=0.25, krylov_dim=30,
                     krylov_tol=1e-9)
    spec = SweepSpec(p, "lambda", [0.0, 0.25])
    rows = run_sweep(spec, tmp_path / "sweep")
    table = (tmp_path / "sweep" / "sweep_table.csv").read_text().splitlines()
    assert table[0] == "value,tau,kind,fate,error"
    assert len(rows) == 2 and len(table) == 3
    assert all(row["error"] is None for row in rows)
    # per-value run directories exist and are self-contained
    assert (tmp_path / "sweep" / "lambda_0.25" / "frames.csv").exists()


def test_sweep_records_failures_and_continues(tmp_path):
    p = quick_params(t_max=1.0)
    spec = SweepSpec(p, "g", [0.0, -1.0])  # negative coupling is invalid
    rows = run_sweep(spec, tmp_path / "sweep")
    assert rows[0]["error"] is None
    assert rows[1]["error"] is not None and "g" in rows[1]["error"]
    table = (tmp_path / "sweep" / "sweep_table.csv").read_text().splitlines()
    assert len(table) == 3


def test_sweep_validation():
    p = quick_params()
    with pytest.raises(DomainError):
        SweepSpec(p, "boundary", [1.0])
    with pytest.raises(DomainError):
        SweepSpec(p, "g", [])


def test_semiclassical_backend_through_runner(tmp_path):
    p = quick_params(g=0.1, omega0=1.0)
    result = run_experiment(p, "semiclassical", tmp_path / "semi")
    assert result.frames[0].backend == "semiclassical"
    rows = (tmp_path / "semi" / "frames.csv").read_text().splitlines()
    assert rows[1].endswith(",semiclassical")


def test_fate_label_attached_at_tau(tmp_path):
    p = quick_params(L=8, w=4, l=2, t_max=40.0, dt_step=0.25, krylov_dim=30,
                     krylov_tol=1e-9)
    result = run_experiment(p, "full")
    if result.sbt.detected:
        assert result.fate in ("breaking", "contraction", "ambiguous")
    else:
        assert result.fate is None
