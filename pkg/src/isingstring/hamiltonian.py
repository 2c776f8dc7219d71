"""Matrix-free application of the spin-phonon chain Hamiltonian.

H = H_spin + H_ph + H_int with

    H_spin = - sum_bonds sigma^z_j sigma^z_{j+1} - h^x sum_j sigma^x_j
             - h^z sum_j sigma^z_j
    H_ph   = omega0 sum_j n_j
    H_int  = g sum_j (a^dag_j + a_j) sigma^z_j

truncated at n_max phonons per site (a^dag annihilates the top level, which
keeps H Hermitian on the truncated space). The ``lang_firsov`` variant applies
the polaron-transformed Hamiltonian in which the linear coupling is replaced
by displacement-dressed spin flips and the constant shift -g^2/omega0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numba import njit, prange

from .errors import DomainError, SimulationError
from .hilbert import HilbertSpace, StateVector
from .params import CLOSED, SystemParams

BARE = "bare"
LANG_FIRSOV = "lang_firsov"


def _index_dtype(dim):
    return np.int32 if dim < 2**31 else np.int64


def spin_zz_field_diagonal(L: int, h_z: float, boundary: str) -> np.ndarray:
    """Diagonal of -sum_bonds sz_j sz_{j+1} - h_z sum_j sz_j over all 2^L configurations."""
    dim = 1 << L
    idx = np.arange(dim, dtype=_index_dtype(dim))
    walls = np.zeros(dim, dtype=np.int8)
    ndown = np.zeros(dim, dtype=np.int8)
    prev = ((idx >> 0) & 1).astype(np.int8)
    first = prev
    ndown += prev
    for j in range(1, L):
        cur = ((idx >> j) & 1).astype(np.int8)
        walls += prev ^ cur
        ndown += cur
        prev = cur
    n_bonds = L - 1
    if boundary == CLOSED:
        walls += prev ^ first
        n_bonds += 1
    # aligned bonds contribute -1, walls +1; up spins -h_z, down +h_z
    return (2.0 * walls - n_bonds) + h_z * (2.0 * ndown - L)


def phonon_digit_table(L: int, n_max: int) -> np.ndarray:
    """digits[j, p] = occupation of site j+1 in phonon index p (int8)."""
    base = n_max + 1
    dim = base**L
    idx = np.arange(dim, dtype=np.int64)
    digits = np.empty((L, dim), dtype=np.int8)
    for j in range(L):
        digits[j] = (idx // base**j) % base
    return digits


def phonon_total_counts(L: int, n_max: int) -> np.ndarray:
    """Total occupation sum_j n_j for every phonon index, as float64."""
    base = n_max + 1
    dim = base**L
    idx = np.arange(dim, dtype=np.int64)
    counts = np.zeros(dim, dtype=np.int64)
    for j in range(L):
        counts += (idx // base**j) % base
    return counts.astype(np.float64)


@njit(cache=True)
def _matvec_serial(psi, out, spin_diag, ph_counts, hx, g, omega0, L, n_max,
                   strides, digits, sqrt_tab):
    dim = psi.shape[0]
    smask = spin_diag.shape[0] - 1
    with_flip = hx != 0.0
    with_phonon = (g != 0.0) and (n_max > 0)
    for i in range(dim):
        s = i & smask
        p = i >> L
        acc = (spin_diag[s] + omega0 * ph_counts[p]) * psi[i]
        if with_flip:
            for j in range(L):
                acc -= hx * psi[i ^ (1 << j)]
        if with_phonon:
            for j in range(L):
                n = digits[j, p]
                sz = 1.0 - 2.0 * ((s >> j) & 1)
                if n > 0:
                    acc += g * sz * sqrt_tab[n] * psi[i - strides[j]]
                if n < n_max:
                    acc += g * sz * sqrt_tab[n + 1] * psi[i + strides[j]]
        out[i] = acc


@njit(parallel=True, cache=True)
def _matvec_parallel(psi, out, spin_diag, ph_counts, hx, g, omega0, L, n_max,
                     strides, digits, sqrt_tab):
    # same arithmetic as _matvec_serial; each i writes only out[i], so the
    # result is independent of the thread partition
    dim = psi.shape[0]
    smask = spin_diag.shape[0] - 1
    with_flip = hx != 0.0
    with_phonon = (g != 0.0) and (n_max > 0)
    for i in prange(dim):
        s = i & smask
        p = i >> L
        acc = (spin_diag[s] + omega0 * ph_counts[p]) * psi[i]
        if with_flip:
            for j in range(L):
                acc -= hx * psi[i ^ (1 << j)]
        if with_phonon:
            for j in range(L):
                n = digits[j, p]
                sz = 1.0 - 2.0 * ((s >> j) & 1)
                if n > 0:
                    acc += g * sz * sqrt_tab[n] * psi[i - strides[j]]
                if n < n_max:
                    acc += g * sz * sqrt_tab[n + 1] * psi[i + strides[j]]
        out[i] = acc


# below this size the thread-dispatch overhead of the parallel kernel dominates
_PARALLEL_CUTOFF = 1 << 16


def displacement_matrix(gamma: float, n_max: int) -> np.ndarray:
    """exp(-2 gamma (a^dag - a)) on the truncated Fock space.

    The truncated generator is real antisymmetric, so the result is exactly
    orthogonal regardless of the cutoff.
    """
    dim = n_max + 1
    gen = np.zeros((dim, dim))
    for n in range(n_max):
        gen[n + 1, n] = np.sqrt(n + 1.0)
        gen[n, n + 1] = -np.sqrt(n + 1.0)
    return scipy.linalg.expm(-2.0 * gamma * gen)


@dataclass
class HamiltonianOperator:
    """Hermitian operator applied without materializing a matrix."""

    params: SystemParams
    space: HilbertSpace
    variant: str = BARE
    _spin_diag: np.ndarray = field(init=False, repr=False)
    _ph_counts: np.ndarray = field(init=False, repr=False)
    _displacement: np.ndarray | None = field(init=False, repr=False, default=None)

    def __post_init__(self):
        p = self.params
        if (self.space.L, self.space.n_max) != (p.L, p.n_max):
            raise DomainError("space does not match params (L, n_max)")
        if self.variant not in (BARE, LANG_FIRSOV):
            raise DomainError(f"unknown Hamiltonian variant {self.variant!r}")
        self._spin_diag = spin_zz_field_diagonal(p.L, p.h_z, p.boundary)
        self._ph_counts = phonon_total_counts(p.L, p.n_max)
        base = p.n_max + 1
        bpow = base ** np.arange(p.L, dtype=np.int64)
        self._strides = bpow * (1 << p.L)
        self._digits = (phonon_digit_table(p.L, p.n_max)
                        if p.g != 0.0 and p.n_max > 0
                        else np.zeros((p.L, 1), dtype=np.int8))
        self._sqrt_tab = np.sqrt(np.arange(p.n_max + 2, dtype=np.float64))
        if self.variant == LANG_FIRSOV:
            self._displacement = displacement_matrix(self.gamma, p.n_max)

    @classmethod
    def build(cls, params: SystemParams, variant: str = BARE) -> "HamiltonianOperator":
        return cls(params, HilbertSpace(params.L, params.n_max), variant)

    @property
    def gamma(self) -> float:
        p = self.params
        return -p.g / p.omega0 if p.g != 0.0 else 0.0

    def apply(self, psi: StateVector) -> StateVector:
        if psi.space != self.space:
            raise DomainError("state vector belongs to a different Hilbert space")
        return StateVector(self.apply_flat(psi.amplitudes), self.space)

    def apply_flat(self, amps: np.ndarray, out: np.ndarray | None = None) -> np.ndarray:
        if self.variant == LANG_FIRSOV:
            return self._apply_lang_firsov(amps)
        p = self.params
        if out is None:
            out = np.empty_like(amps)
        kernel = _matvec_parallel if amps.shape[0] >= _PARALLEL_CUTOFF else _matvec_serial
        kernel(amps, out, self._spin_diag, self._ph_counts,
               float(p.h_x), float(p.g), float(p.omega0),
               p.L, p.n_max, self._strides, self._digits, self._sqrt_tab)
        return out

    def _apply_lang_firsov(self, amps: np.ndarray) -> np.ndarray:
        p = self.params
        # the polaron shift -g^2/omega0 arises once per site
        shift = -p.L * p.g**2 / p.omega0
        diag = (np.add.outer(p.omega0 * self._ph_counts, self._spin_diag) + shift)
        out = diag.reshape(-1) * amps
        if p.h_x == 0.0:
            return out
        disp = self._displacement
        base = p.n_max + 1
        for j in range(1, p.L + 1):
            shape = (base ** (p.L - j), base, base ** (j - 1),
                     1 << (p.L - j), 2, 1 << (j - 1))
            arr = amps.reshape(shape)
            dst = out.reshape(shape)
            # sigma^+_j dressed with exp(-2 gamma (a^dag - a)); sigma^-_j with its transpose
            up_from_down = np.moveaxis(np.tensordot(disp, arr[:, :, :, :, 1, :], axes=(1, 1)), 0, 1)
            dn_from_up = np.moveaxis(np.tensordot(disp.T, arr[:, :, :, :, 0, :], axes=(1, 1)), 0, 1)
            dst[:, :, :, :, 0, :] -= p.h_x * up_from_down
            dst[:, :, :, :, 1, :] -= p.h_x * dn_from_up
        return out

    def energy_expectation(self, psi: StateVector) -> float:
        """Real part of <psi|H|psi>; the imaginary part must be negligible."""
        value = np.vdot(psi.amplitudes, self.apply_flat(psi.amplitudes))
        if abs(value.imag) >= 1e-10:
            raise SimulationError(f"energy expectation has imaginary part {value.imag:.3e}")
        return float(value.real)
