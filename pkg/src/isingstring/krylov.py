"""Lanczos (Krylov) propagation of |psi(t+dt)> = exp(-i H dt) |psi(t)>.

The step builds an orthonormal Krylov basis with full reorthogonalization,
exponentiates the small tridiagonal projection, and stops as soon as the
a-posteriori error estimate (change of the iterate plus the residual
coupling beta_m |u_m|) drops below the tolerance. Lanczos breakdown means
the basis spans an invariant subspace and the result is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DomainError, PropagationError
from .hilbert import StateVector
from .params import SystemParams

_BREAKDOWN = 1e-13


@dataclass(frozen=True)
class PropagationPlan:
    dt_step: float
    dt_sample: float
    t_max: float
    krylov_dim: int
    krylov_tol: float

    def __post_init__(self):
        if self.dt_step <= 0 or self.dt_sample <= 0:
            raise DomainError("dt_step and dt_sample must be > 0")
        if self.t_max < 0:
            raise DomainError("t_max must be >= 0")
        if self.krylov_dim < 2:
            raise DomainError("krylov_dim must be >= 2")
        if self.krylov_tol <= 0:
            raise DomainError("krylov_tol must be > 0")
        ratio = self.dt_sample / self.dt_step
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise DomainError(f"dt_sample = {self.dt_sample} is not an integer "
                              f"multiple of dt_step = {self.dt_step}")

    @classmethod
    def from_params(cls, p: SystemParams) -> "PropagationPlan":
        return cls(p.dt_step, p.dt_sample, p.t_max, p.krylov_dim, p.krylov_tol)

    @property
    def n_inner(self) -> int:
        return int(round(self.dt_sample / self.dt_step))

    @property
    def n_samples(self) -> int:
        return int(math.floor(self.t_max / self.dt_sample + 1e-9))


@dataclass
class EvolutionReport:
    """Norm / energy bookkeeping accumulated over one evolution."""

    energy_initial: float
    max_norm_error: float = 0.0
    max_energy_drift: float = 0.0  # relative to max(1, |E0|)
    n_steps: int = 0
    n_samples: int = 0


def krylov_step_flat(apply_flat, amps: np.ndarray, dt: float,
                     krylov_dim: int, krylov_tol: float,
                     workspace: np.ndarray | None = None) -> np.ndarray:
    """One exp(-i H dt) step on a raw amplitude array."""
    dim = amps.shape[0]
    beta0 = np.linalg.norm(amps)
    if abs(beta0 - 1.0) > 1e-8:
        raise PropagationError(f"input state norm {beta0!r} is not 1 within 1e-8")
    m_max = min(krylov_dim, dim)
    if workspace is not None and workspace.shape >= (m_max, dim):
        V = workspace
    else:
        V = np.empty((m_max, dim), dtype=np.complex128)
    V[0] = amps / beta0
    alphas = np.zeros(m_max)
    betas = np.zeros(m_max)
    u_prev = None
    for k in range(m_max):
        w = apply_flat(V[k])
        pre_norm = np.linalg.norm(w)
        coeff = (V[:k + 1] @ w.conj()).conj()
        w -= V[:k + 1].T @ coeff
        norm_w = np.linalg.norm(w)
        if norm_w < 0.5 * pre_norm:  # heavy cancellation: one more pass
            extra = (V[:k + 1] @ w.conj()).conj()
            w -= V[:k + 1].T @ extra
            norm_w = np.linalg.norm(w)
        alphas[k] = coeff[k].real
        betas[k] = norm_w
        m = k + 1
        evals, evecs = scipy.linalg.eigh_tridiagonal(alphas[:m], betas[:m - 1])
        u = evecs @ (np.exp(-1j * dt * evals) * evecs[0])
        scale = max(1.0, float(np.max(np.abs(alphas[:m]))))
        happy = norm_w <= _BREAKDOWN * scale
        if u_prev is None:
            stag = np.inf
        else:
            stag = math.hypot(float(np.linalg.norm(u[:m - 1] - u_prev)), abs(u[m - 1]))
        err = 0.0 if happy else min(stag, norm_w * abs(u[m - 1]) * min(1.0, abs(dt)))
        if happy or err <= krylov_tol:
            result = V[:m].T @ (beta0 * u)
            out_norm = np.linalg.norm(result)
            if abs(out_norm - 1.0) >= 1e-8:
                raise PropagationError(f"krylov step lost norm: |psi| = {out_norm!r}")
            result /= out_norm
            return result
        u_prev = u
        if m < m_max:
            V[m] = w / norm_w
    raise PropagationError(
        f"krylov step did not converge: error estimate {err:.3e} > tol "
        f"{krylov_tol:.1e} with basis size {m_max}; decrease dt_step or "
        f"increase krylov_dim")


def krylov_step(H, psi: StateVector, dt_step: float, krylov_dim: int,
                krylov_tol: float, workspace: np.ndarray | None = None) -> StateVector:
    if psi.space != H.space:
        raise DomainError("state vector belongs to a different Hilbert space")
    new = krylov_step_flat(H.apply_flat, psi.amplitudes, dt_step, krylov_dim,
                           krylov_tol, workspace)
    return StateVector(new, psi.space)


def evolve_and_sample(H, psi0: StateVector, plan: PropagationPlan, observer=None):
    """Propagate psi0 and invoke ``observer(t, psi, energy=..., norm=...)`` at
    t = 0, dt_sample, 2 dt_sample, ..., t_max. Returns (outputs, report)."""
    if psi0.space != H.space:
        raise DomainError("state vector belongs to a different Hilbert space")
    if observer is None:
        observer = lambda t, psi, energy, norm: (t, psi.copy())

    n_inner = plan.n_inner
    dt = plan.dt_sample / n_inner
    psi = psi0.copy()

    energy0 = H.energy_expectation(psi)
    report = EvolutionReport(energy_initial=energy0)
    e_scale = max(1.0, abs(energy0))

    def emit(t, psi):
        nrm = psi.norm
        energy = H.energy_expectation(psi)
        report.max_norm_error = max(report.max_norm_error, abs(nrm - 1.0))
        report.max_energy_drift = max(report.max_energy_drift,
                                      abs(energy - energy0) / e_scale)
        report.n_samples += 1
        return observer(t, psi, energy=energy, norm=nrm)

    outputs = [emit(0.0, psi)]
    sample_times = [k * plan.dt_sample for k in range(1, plan.n_samples + 1)]
    leftover = plan.t_max - plan.n_samples * plan.dt_sample
    if leftover > 1e-9 * max(1.0, plan.t_max):
        sample_times.append(plan.t_max)
    workspace = np.empty((min(plan.krylov_dim, psi0.space.dim), psi0.space.dim),
                         dtype=np.complex128)
    last_good = 0.0
    for t_target in sample_times:
        span = t_target - last_good
        steps = max(1, int(round(span / dt)))
        step_dt = span / steps
        try:
            for _ in range(steps):
                psi = krylov_step(H, psi, step_dt, plan.krylov_dim, plan.krylov_tol,
                                  workspace)
                report.n_steps += 1
        except PropagationError as exc:
            raise PropagationError(f"{exc}; last good sample at t = {last_good}") from None
        outputs.append(emit(t_target, psi))
        last_good = t_target
    return outputs, report
