"""Coupled classical-quantum dynamics: dense spins + coherent phonon amplitudes.

The phonons enter through one complex amplitude alpha_j per site (coherent
states in the polaron frame). Spin-flip terms are dressed by the phases
theta_j = -4 gamma Im(alpha_j) and reduced by exp(-2 gamma^2), with
gamma = -g / omega0; the amplitudes are driven by the transverse
magnetization. Valid for weak coupling / fast phonons where phonon
entanglement is negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, PropagationError
from .hamiltonian import spin_zz_field_diagonal
from .hilbert import HilbertSpace, StateVector, string_spin_bits
from .krylov import EvolutionReport
from .observables import MeasurementTables, measure_frame
from .params import SystemParams

MAX_SPIN_DIM = 1 << 20


@dataclass
class SemiclassicalState:
    psi_spin: np.ndarray  # complex, length 2^L, normalized
    alpha: np.ndarray     # complex, length L
    t: float = 0.0

    def copy(self) -> "SemiclassicalState":
        return SemiclassicalState(self.psi_spin.copy(), self.alpha.copy(), self.t)


def _gamma(params: SystemParams) -> float:
    return -params.g / params.omega0 if params.g != 0.0 else 0.0


def transverse_scale(params: SystemParams) -> float:
    """Renormalized spin-flip amplitude exp(-2 gamma^2) * h_x."""
    g = _gamma(params)
    return math.exp(-2.0 * g * g) * params.h_x


def effective_spin_hamiltonian_apply(psi_spin: np.ndarray, alpha: np.ndarray,
                                     params: SystemParams,
                                     spin_diag: np.ndarray | None = None) -> np.ndarray:
    """Apply the alpha-dependent Hermitian spin Hamiltonian."""
    L = params.L
    if psi_spin.shape != (1 << L,) or alpha.shape != (L,):
        raise DomainError("psi_spin / alpha sizes inconsistent with L")
    if spin_diag is None:
        spin_diag = spin_zz_field_diagonal(L, params.h_z, params.boundary)
    gamma = _gamma(params)
    scalar = params.omega0 * float(np.sum(np.abs(alpha) ** 2))
    if params.g != 0.0:
        scalar -= params.L * params.g**2 / params.omega0  # per-site polaron shift
    out = (spin_diag + scalar) * psi_spin
    kappa = transverse_scale(params)
    if kappa != 0.0:
        theta = -4.0 * gamma * alpha.imag
        phase = np.exp(-1j * theta)
        for j in range(1, L + 1):
            view = psi_spin.reshape(1 << (L - j), 2, 1 << (j - 1))
            dst = out.reshape(1 << (L - j), 2, 1 << (j - 1))
            dst[:, 0, :] -= kappa * phase[j - 1] * view[:, 1, :]
            dst[:, 1, :] -= kappa * np.conj(phase[j - 1]) * view[:, 0, :]
    return out


def sigma_plus_expectations(psi_spin: np.ndarray, L: int) -> np.ndarray:
    """<sigma^+_j> = sum over configurations of conj(psi_up) psi_down, per site."""
    out = np.empty(L, dtype=np.complex128)
    for j in range(1, L + 1):
        view = psi_spin.reshape(1 << (L - j), 2, 1 << (j - 1))
        out[j - 1] = np.vdot(view[:, 0, :], view[:, 1, :])
    return out


def eom_derivative(psi_spin, alpha, params, spin_diag=None):
    """(d psi / dt, d alpha / dt) of the coupled equations of motion."""
    gamma = _gamma(params)
    dpsi = -1j * effective_spin_hamiltonian_apply(psi_spin, alpha, params, spin_diag)
    if gamma == 0.0 or params.h_x == 0.0:
        dalpha = -1j * params.omega0 * alpha
    else:
        theta = -4.0 * gamma * alpha.imag
        phase = np.exp(-1j * theta)
        sp = sigma_plus_expectations(psi_spin, params.L)
        drive = 2.0 * gamma * transverse_scale(params) * (sp * phase - np.conj(sp * phase))
        dalpha = -1j * (params.omega0 * alpha + drive)
    return dpsi, dalpha


def eom_step(state: SemiclassicalState, params: SystemParams, dt: float,
             spin_diag=None) -> SemiclassicalState:
    """One fourth-order Runge-Kutta step; magnetization feedback is evaluated
    on the stage spin state, not frozen over the step."""
    psi, alpha = state.psi_spin, state.alpha
    k1p, k1a = eom_derivative(psi, alpha, params, spin_diag)
    k2p, k2a = eom_derivative(psi + 0.5 * dt * k1p, alpha + 0.5 * dt * k1a, params, spin_diag)
    k3p, k3a = eom_derivative(psi + 0.5 * dt * k2p, alpha + 0.5 * dt * k2a, params, spin_diag)
    k4p, k4a = eom_derivative(psi + dt * k3p, alpha + dt * k3a, params, spin_diag)
    new_psi = psi + (dt / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
    new_alpha = alpha + (dt / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
    drift = abs(np.linalg.norm(new_psi) - 1.0)
    if drift > 1e-6:
        raise PropagationError(f"spin norm drift {drift:.3e} in one step; reduce dt")
    if drift < 1e-8:
        new_psi /= np.linalg.norm(new_psi)
    return SemiclassicalState(new_psi, new_alpha, state.t + dt)


def run_semiclassical(params: SystemParams, spin_bits=None, alpha0=None,
                      dt: float = 0.01):
    """Integrate the equations of motion and sample observable frames.

    Phonon columns report the coherent-state statistics: mean |alpha_j|^2 and
    standard deviation |alpha_j|. Returns (frames, report); the report's
    energy drift refers to <H_eff>, a diagnostic of integration quality.
    """
    L = params.L
    if (1 << L) > MAX_SPIN_DIM:
        raise CapacityError(f"dense spin vector of dim 2^{L} exceeds the "
                            f"2^20 semiclassical guard")
    n_inner = params.dt_sample / dt
    if abs(n_inner - round(n_inner)) > 1e-9 * max(1.0, n_inner):
        raise DomainError(f"dt_sample = {params.dt_sample} is not an integer "
                          f"multiple of the integrator dt = {dt}")
    n_inner = int(round(n_inner))

    space = HilbertSpace(L, 0)
    if spin_bits is None:
        spin_bits = string_spin_bits(params)
    psi0 = np.zeros(space.dim_spin, dtype=np.complex128)
    psi0[space.encode(spin_bits, (0,) * L)] = 1.0
    alpha = (np.zeros(L, dtype=np.complex128) if alpha0 is None
             else np.asarray(alpha0, dtype=np.complex128).copy())
    if alpha.shape != (L,):
        raise DomainError(f"alpha0 must have length L = {L}")

    spin_diag = spin_zz_field_diagonal(L, params.h_z, params.boundary)
    tables = MeasurementTables(L, params.l, params.w)
    state = SemiclassicalState(psi0, alpha, 0.0)

    def frame_at(t, state):
        h_psi = effective_spin_hamiltonian_apply(state.psi_spin, state.alpha,
                                                 params, spin_diag)
        energy = float(np.vdot(state.psi_spin, h_psi).real)
        psi = StateVector(state.psi_spin, space)
        frame = measure_frame(psi, params.replace(n_max=0), energy, t=t,
                              backend="semiclassical", tables=tables)
        frame.n_mean = np.abs(state.alpha) ** 2
        frame.n_std = np.abs(state.alpha)
        return frame

    frames = [frame_at(0.0, state)]
    report = EvolutionReport(energy_initial=frames[0].energy)
    e_scale = max(1.0, abs(report.energy_initial))
    n_samples = int(math.floor(params.t_max / params.dt_sample + 1e-9))
    for k in range(1, n_samples + 1):
        for i in range(n_inner):
            state = eom_step(state, params, dt, spin_diag)
            report.n_steps += 1
        state.t = k * params.dt_sample  # suppress float accumulation
        frame = frame_at(state.t, state)
        frames.append(frame)
        report.max_norm_error = max(report.max_norm_error, abs(frame.norm - 1.0))
        report.max_energy_drift = max(report.max_energy_drift,
                                      abs(frame.energy - report.energy_initial) / e_scale)
    report.n_samples = len(frames)
    return frames, report
