"""Parse simulation run directories: frames.csv, summary.json, config.echo.

The frames schema is the fixed contract of the simulator: scalar columns
t, norm, energy, D_in, D_bd, Delta_in, Delta_bd, S_cr, S_ed followed by the
indexed families D_bond_*, sigma_z_*, n_mean_*, n_std_* and a trailing
backend tag.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

SCALAR_COLUMNS = ("t", "norm", "energy", "D_in", "D_bd", "Delta_in", "Delta_bd",
                  "S_cr", "S_ed")
FAMILIES = ("D_bond", "sigma_z", "n_mean", "n_std")


class SchemaError(ValueError):
    """Run-directory contents do not match the frames contract."""


def _family(header, prefix):
    n = 0
    while f"{prefix}_{n + 1}" in header:
        n += 1
    if n == 0:
        raise SchemaError(f"missing column family '{prefix}_*'")
    return [f"{prefix}_{j}" for j in range(1, n + 1)]


@dataclass
class RunArtifact:
    run_dir: Path
    scalars: dict          # column -> 1d array over time
    bands: dict            # family -> 2d array (n_times, n_series)
    backend: str
    params: dict           # parsed config.echo (strings)
    summary: dict

    @property
    def times(self) -> np.ndarray:
        return self.scalars["t"]

    @property
    def n_sites(self) -> int:
        return self.bands["sigma_z"].shape[1]

    @property
    def n_bonds(self) -> int:
        return self.bands["D_bond"].shape[1]

    @property
    def lam(self) -> float:
        return float(self.params.get("lambda", self.summary.get("lambda", 0.0)))

    @property
    def tau(self):
        return self.summary.get("tau")


def parse_flat_config(text: str) -> dict:
    entries = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line or "=" not in line:
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        entries[key] = value
    return entries


def load_run(run_dir) -> RunArtifact:
    run_dir = Path(run_dir)
    frames_path = run_dir / "frames.csv"
    if not frames_path.exists():
        raise SchemaError(f"no frames.csv in {run_dir}")
    with open(frames_path, newline="") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for column in SCALAR_COLUMNS:
            if column not in header:
                raise SchemaError(f"missing column '{column}' in {frames_path}")
        family_cols = {prefix: _family(header, prefix) for prefix in FAMILIES}
        rows = list(reader)
    if not rows:
        raise SchemaError(f"{frames_path} has no data rows")

    scalars = {c: np.array([float(r[c]) for r in rows]) for c in SCALAR_COLUMNS}
    bands = {prefix: np.array([[float(r[c]) for c in cols] for r in rows])
             for prefix, cols in family_cols.items()}
    backend = rows[0].get("backend", "full") if "backend" in header else "full"

    times = scalars["t"]
    if np.any(np.diff(times) <= 0):
        raise SchemaError("frame times are not strictly increasing")

    params = {}
    config_path = run_dir / "config.echo"
    if config_path.exists():
        params = parse_flat_config(config_path.read_text())
    summary = {}
    summary_path = run_dir / "summary.json"
    if summary_path.exists():
        summary = json.loads(summary_path.read_text())
    return RunArtifact(run_dir=run_dir, scalars=scalars, bands=bands,
                       backend=backend, params=params, summary=summary)


def load_sweep_table(sweep_dir):
    """Rows of a sweep_table.csv as a list of dicts with parsed numbers."""
    path = Path(sweep_dir) / "sweep_table.csv"
    if not path.exists():
        raise SchemaError(f"no sweep_table.csv in {sweep_dir}")
    rows = []
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            for column in ("value", "tau", "kind", "fate"):
                if column not in row:
                    raise SchemaError(f"missing column '{column}' in {path}")
            rows.append({
                "value": float(row["value"]),
                "tau": float(row["tau"]) if row["tau"] else None,
                "kind": row["kind"],
                "fate": row["fate"],
                "error": row.get("error") or None,
            })
    if not rows:
        raise SchemaError(f"{path} has no data rows")
    return rows
