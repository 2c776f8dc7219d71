"""Brute-force dense backend used to verify the matrix-free path.

Only meant for small spaces (dim <= 4096): the operator is materialized
column by column from the matrix-free ``apply``, and propagation uses the
Hermitian eigendecomposition, exact to numerical precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, SimulationError
from .hilbert import HilbertSpace, StateVector

MAX_DENSE_DIM = 4096


@dataclass
class DenseOperator:
    matrix: np.ndarray
    space: HilbertSpace

    def eigensystem(self):
        if not hasattr(self, "_eig"):
            self._eig = np.linalg.eigh(self.matrix)
        return self._eig


def dense_assemble(H, max_dim: int = MAX_DENSE_DIM) -> DenseOperator:
    """Materialize H: column k is apply(H, e_k)."""
    dim = H.space.dim
    if dim > max_dim:
        raise CapacityError(f"dense assembly limited to dim <= {max_dim}, got {dim}")
    matrix = np.empty((dim, dim), dtype=np.complex128)
    basis = np.zeros(dim, dtype=np.complex128)
    for k in range(dim):
        basis[k] = 1.0
        matrix[:, k] = H.apply_flat(basis.copy())
        basis[k] = 0.0
    defect = np.max(np.abs(matrix - matrix.conj().T))
    if defect > 1e-12 * max(1.0, np.max(np.abs(matrix))):
        raise SimulationError(f"assembled operator is not Hermitian (defect {defect:.3e})")
    return DenseOperator(matrix, H.space)


def dense_evolve(Hd: DenseOperator, psi0: StateVector, t: float) -> StateVector:
    """exp(-i H t) psi0 via eigendecomposition."""
    evals, evecs = Hd.eigensystem()
    coeff = evecs.conj().T @ psi0.amplitudes
    amps = evecs @ (np.exp(-1j * t * evals) * coeff)
    return StateVector(amps, psi0.space)


def dense_eigenvalues(Hd: DenseOperator) -> np.ndarray:
    return Hd.eigensystem()[0]
