"""Truncated spin-phonon Hilbert space and basis-state construction.

Index layout: the flat index is ``phonon_index * 2**L + spin_index`` with
spin bit j-1 for site j (0 = up, sigma^z = +1; 1 = down) and phonon digit
j-1 for site j in base n_max+1. Spins occupy the low bits so that
spin-bond sweeps touch contiguous memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .params import SystemParams


@dataclass(frozen=True)
class HilbertSpace:
    L: int
    n_max: int

    def __post_init__(self):
        if self.L < 1:
            raise DomainError(f"invalid parameter 'L': need >= 1 site, got {self.L}")
        if self.n_max < 0:
            raise DomainError(f"invalid parameter 'n_max': must be >= 0, got {self.n_max}")

    @property
    def dim_spin(self) -> int:
        return 1 << self.L

    @property
    def dim_phonon(self) -> int:
        return (self.n_max + 1) ** self.L

    @property
    def dim(self) -> int:
        return self.dim_spin * self.dim_phonon

    def encode(self, spin_bits, phonon_occ) -> int:
        """Flat index of the basis state |spin_bits> |phonon_occ>."""
        if len(spin_bits) != self.L or len(phonon_occ) != self.L:
            raise DomainError(f"need {self.L} sites, got {len(spin_bits)} spins / "
                              f"{len(phonon_occ)} occupations")
        spin = 0
        phonon = 0
        base = self.n_max + 1
        for j in reversed(range(self.L)):
            b = spin_bits[j]
            n = phonon_occ[j]
            if b not in (0, 1):
                raise DomainError(f"spin bit at site {j + 1} must be 0 or 1, got {b}")
            if not 0 <= n <= self.n_max:
                raise DomainError(f"phonon occupation {n} at site {j + 1} outside "
                                  f"[0, {self.n_max}]")
            spin = (spin << 1) | b
            phonon = phonon * base + n
        return phonon * self.dim_spin + spin

    def decode(self, index: int):
        """Inverse of :meth:`encode`; returns (spin_bits, phonon_occ) tuples."""
        if not 0 <= index < self.dim:
            raise DomainError(f"index {index} outside [0, {self.dim})")
        spin = index & (self.dim_spin - 1)
        phonon = index >> self.L
        base = self.n_max + 1
        bits = tuple((spin >> j) & 1 for j in range(self.L))
        occ = []
        for _ in range(self.L):
            occ.append(phonon % base)
            phonon //= base
        return bits, tuple(occ)


@dataclass
class StateVector:
    """Complex amplitudes over the full spin (x) phonon basis."""

    amplitudes: np.ndarray
    space: HilbertSpace

    def __post_init__(self):
        if self.amplitudes.shape != (self.space.dim,):
            raise DomainError(f"amplitude array has shape {self.amplitudes.shape}, "
                              f"expected ({self.space.dim},)")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.space)

    @classmethod
    def basis_state(cls, space: HilbertSpace, index: int) -> "StateVector":
        amps = np.zeros(space.dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps, space)


def string_spin_bits(params: SystemParams) -> tuple:
    """Per-site bits of the initial configuration: l up, w down, rest up."""
    return tuple(1 if params.l < j <= params.l + params.w else 0
                 for j in range(1, params.L + 1))


def build_initial_state(params: SystemParams, phonon_occ="vacuum") -> StateVector:
    """Product state with the down-spin string on sites l+1..l+w.

    ``phonon_occ`` is either the string ``"vacuum"`` (all modes in their
    ground state) or a per-site occupation tuple within the cutoff.
    """
    space = HilbertSpace(params.L, params.n_max)
    if isinstance(phonon_occ, str):
        if phonon_occ != "vacuum":
            raise DomainError(f"unknown phonon preparation {phonon_occ!r}")
        occ = (0,) * params.L
    else:
        occ = tuple(phonon_occ)
    index = space.encode(string_spin_bits(params), occ)
    return StateVector.basis_state(space, index)
