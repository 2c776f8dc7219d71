"""Domain-wall, magnetization, and phonon observables of a state vector.

Every operator measured here is diagonal in the (sigma^z, n) product basis,
so each quantity is a weighted sum over |amplitude|^2. Bond j joins sites j
and j+1 (plus the seam bond (L, 1) for closed chains). The string region of
a run is fixed by (l, w): interior bonds l+1..l+w-1, boundary bonds l and
l+w, so the string must not touch the chain edge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SimulationError
from .hilbert import StateVector
from .params import CLOSED, SystemParams

BREAKING = "breaking"
CONTRACTION = "contraction"
AMBIGUOUS = "ambiguous"

_VAR_FLOOR = -1e-12


@dataclass
class ObservableFrame:
    """One time sample of every measured quantity."""

    t: float
    norm: float
    energy: float
    D_in: float
    D_bd: float
    Delta_in: float
    Delta_bd: float
    S_cr: float
    S_ed: float
    D_bond: np.ndarray
    sigma_z: np.ndarray
    n_mean: np.ndarray
    n_std: np.ndarray
    backend: str = "full"


def _probabilities(psi: StateVector):
    p = np.abs(psi.amplitudes) ** 2
    total = p.sum()
    if total <= 0:
        raise DomainError("cannot measure the zero vector")
    p /= total
    p2 = p.reshape(psi.space.dim_phonon, psi.space.dim_spin)
    return p2.sum(axis=0), p2.sum(axis=1)


def _site_down_prob(p_spin, L, j):
    view = p_spin.reshape(1 << (L - j), 2, 1 << (j - 1))
    return view[:, 1, :].sum()


def _bond_wall_prob(p_spin, L, j):
    if j < L:
        view = p_spin.reshape(1 << (L - j - 1), 2, 2, 1 << (j - 1))
        return view[:, 0, 1, :].sum() + view[:, 1, 0, :].sum()
    # seam bond (L, 1)
    view = p_spin.reshape(2, 1 << (L - 2), 2)
    return view[0, :, 1].sum() + view[1, :, 0].sum()


def _checked_std(mean_sq, mean):
    var = mean_sq - mean * mean
    if var < _VAR_FLOOR:
        raise SimulationError(f"variance {var!r} below roundoff floor")
    return float(np.sqrt(max(var, 0.0)))


def string_bond_range(l: int, w: int, L: int):
    """Validate the string geometry; both boundary bonds must exist."""
    if l < 1 or l + w > L - 1:
        raise DomainError(f"string (l = {l}, w = {w}) touches the chain edge of "
                          f"L = {L} sites; boundary bonds undefined")
    return list(range(l + 1, l + w)), (l, l + w)


class MeasurementTables:
    """Per-spin-configuration wall counts inside / at the edges of the string.

    These give the full distribution of the summed wall operators, which the
    variances need (the four-point correlator sums reduce to exactly this
    diagonal evaluation).
    """

    def __init__(self, L: int, l: int, w: int):
        interior, (left, right) = string_bond_range(l, w, L)
        dim = 1 << L
        idx = np.arange(dim, dtype=np.int32 if dim < 2**31 else np.int64)

        def wall(j):
            return (((idx >> (j - 1)) ^ (idx >> j)) & 1).astype(np.int8)

        d_in = np.zeros(dim, dtype=np.int8)
        for j in interior:
            d_in += wall(j)
        d_bd = wall(left) + wall(right)
        self.L, self.l, self.w = L, l, w
        self.d_in = d_in.astype(np.float64)
        self.d_bd = d_bd.astype(np.float64)


def domain_wall_profile(psi: StateVector, boundary: str = "open") -> np.ndarray:
    """<D_j> for every physical bond; D_j = (1 - sigma^z_j sigma^z_{j+1}) / 2."""
    L = psi.space.L
    p_spin, _ = _probabilities(psi)
    n_bonds = L if boundary == CLOSED else L - 1
    return np.array([_bond_wall_prob(p_spin, L, j) for j in range(1, n_bonds + 1)])


def string_aggregates(psi: StateVector, l: int, w: int):
    """(D_in, D_bd): summed walls inside the string and at its boundaries."""
    L = psi.space.L
    interior, (left, right) = string_bond_range(l, w, L)
    p_spin, _ = _probabilities(psi)
    d_in = sum(_bond_wall_prob(p_spin, L, j) for j in interior)
    d_bd = _bond_wall_prob(p_spin, L, left) + _bond_wall_prob(p_spin, L, right)
    return float(d_in), float(d_bd)


def string_variances(psi: StateVector, l: int, w: int):
    """(Delta_in, Delta_bd): standard deviations of the summed wall operators."""
    tables = MeasurementTables(psi.space.L, l, w)
    p_spin, _ = _probabilities(psi)
    return _variances_from_tables(p_spin, tables)


def _variances_from_tables(p_spin, tables):
    mean_in = p_spin @ tables.d_in
    mean_bd = p_spin @ tables.d_bd
    std_in = _checked_std(p_spin @ (tables.d_in * tables.d_in), mean_in)
    std_bd = _checked_std(p_spin @ (tables.d_bd * tables.d_bd), mean_bd)
    return std_in, std_bd


def magnetization_profile(psi: StateVector) -> np.ndarray:
    L = psi.space.L
    p_spin, _ = _probabilities(psi)
    return np.array([1.0 - 2.0 * _site_down_prob(p_spin, L, j) for j in range(1, L + 1)])


def magnetization_measures(psi: StateVector, l: int, w: int):
    """(<sigma^z_j> profile, S_cr, S_ed): core and edge magnetization of the string."""
    sigma_z = magnetization_profile(psi)
    s_cr, s_ed = _core_edge(sigma_z, l, w)
    return sigma_z, s_cr, s_ed


def _core_edge(sigma_z, l, w):
    if w < 2:
        raise DomainError(f"core/edge magnetization needs w >= 2, got w = {w}")
    s_ed = float(sigma_z[l] + sigma_z[l + w - 1])
    s_cr = float(np.sum(sigma_z[l + 1:l + w - 1]))
    return s_cr, s_ed


def phonon_statistics(psi: StateVector):
    """Per-site (<n_j>, std(n_j))."""
    L, n_max = psi.space.L, psi.space.n_max
    _, p_ph = _probabilities(psi)
    base = n_max + 1
    levels = np.arange(base, dtype=np.float64)
    n_mean = np.empty(L)
    n_std = np.empty(L)
    for j in range(1, L + 1):
        view = p_ph.reshape(base ** (L - j), base, base ** (j - 1))
        q = view.sum(axis=(0, 2))
        n_mean[j - 1] = q @ levels
        n_std[j - 1] = _checked_std(q @ (levels * levels), n_mean[j - 1])
    return n_mean, n_std


def classify_string_fate(s_cr: float, s_ed: float, w: int,
                         theta_core: float = 1.0, theta_edge: float = 1.0) -> str:
    """Label the configuration relative to the unbroken string baseline.

    Baseline: every string site down, so S_cr(0) = -(w-2), S_ed(0) = -2.
    Breaking flips core spins while the edges stay down; contraction flips
    the edges while the core stays down.
    """
    s_cr0 = -(w - 2)
    s_ed0 = -2.0
    core_up = s_cr - s_cr0 > theta_core
    edge_up = s_ed - s_ed0 > theta_edge
    if core_up and not edge_up:
        return BREAKING
    if edge_up and not core_up:
        return CONTRACTION
    return AMBIGUOUS


def measure_frame(psi: StateVector, params: SystemParams, energy: float,
                  t: float = 0.0, backend: str = "full",
                  tables: MeasurementTables | None = None) -> ObservableFrame:
    """Full observable sample of one state; ``energy`` is supplied by the caller."""
    L, l, w = params.L, params.l, params.w
    if tables is None:
        tables = MeasurementTables(L, l, w)
    norm = psi.norm
    p_spin, p_ph = _probabilities(psi)

    n_bonds = params.n_bonds
    d_bond = np.array([_bond_wall_prob(p_spin, L, j) for j in range(1, n_bonds + 1)])
    d_in = float(np.sum(d_bond[l:l + w - 1]))
    d_bd = float(d_bond[l - 1] + d_bond[l + w - 1])

    mean_in = p_spin @ tables.d_in
    mean_bd = p_spin @ tables.d_bd
    if abs(mean_in - d_in) > 1e-10 or abs(mean_bd - d_bd) > 1e-10:
        raise SimulationError("bond-profile and distribution routes disagree on "
                              f"string walls: {d_in} vs {mean_in}, {d_bd} vs {mean_bd}")
    delta_in = _checked_std(p_spin @ (tables.d_in * tables.d_in), mean_in)
    delta_bd = _checked_std(p_spin @ (tables.d_bd * tables.d_bd), mean_bd)

    sigma_z = np.array([1.0 - 2.0 * _site_down_prob(p_spin, L, j) for j in range(1, L + 1)])
    s_cr, s_ed = _core_edge(sigma_z, l, w)

    base = params.n_max + 1
    levels = np.arange(base, dtype=np.float64)
    n_mean = np.empty(L)
    n_std = np.empty(L)
    for j in range(1, L + 1):
        view = p_ph.reshape(base ** (L - j), base, base ** (j - 1))
        q = view.sum(axis=(0, 2))
        n_mean[j - 1] = q @ levels
        n_std[j - 1] = _checked_std(q @ (levels * levels), n_mean[j - 1])

    return ObservableFrame(t=t, norm=float(norm), energy=float(energy),
                           D_in=d_in, D_bd=d_bd,
                           Delta_in=delta_in, Delta_bd=delta_bd,
                           S_cr=s_cr, S_ed=s_ed,
                           D_bond=d_bond, sigma_z=sigma_z,
                           n_mean=n_mean, n_std=n_std, backend=backend)


# CSV contract: fixed column order, 17 significant digits, backend tag last.

def csv_header(L: int, n_bonds: int) -> list[str]:
    cols = ["t", "norm", "energy", "D_in", "D_bd", "Delta_in", "Delta_bd", "S_cr", "S_ed"]
    cols += [f"D_bond_{j}" for j in range(1, n_bonds + 1)]
    cols += [f"sigma_z_{j}" for j in range(1, L + 1)]
    cols += [f"n_mean_{j}" for j in range(1, L + 1)]
    cols += [f"n_std_{j}" for j in range(1, L + 1)]
    cols.append("backend")
    return cols


def csv_row(frame: ObservableFrame) -> str:
    values = [frame.t, frame.norm, frame.energy, frame.D_in, frame.D_bd,
              frame.Delta_in, frame.Delta_bd, frame.S_cr, frame.S_ed]
    for arr in (frame.D_bond, frame.sigma_z, frame.n_mean, frame.n_std):
        values.extend(float(x) for x in arr)
    return ",".join(format(v, ".17g") for v in values) + "," + frame.backend
