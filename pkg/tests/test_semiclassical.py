import numpy as np
import pytest

from isingstring.errors import CapacityError, DomainError, PropagationError
from isingstring.hamiltonian import HamiltonianOperator
from isingstring.hilbert import HilbertSpace
from isingstring.runner import frames_max_deviation, run_experiment
from isingstring.semiclassical import (SemiclassicalState,
                                       effective_spin_hamiltonian_apply,
                                       eom_step, run_semiclassical,
                                       sigma_plus_expectations, transverse_scale)
from conftest import small_params


def random_spin(L, rng):
    psi = rng.normal(size=1 << L) + 1j * rng.normal(size=1 << L)
    return psi / np.linalg.norm(psi)


def test_effective_hamiltonian_reduces_to_spin_chain_at_g_zero(rng):
    p = small_params(L=4, w=2, l=1, g=0.0, h_x=0.3, h_z=0.6, n_max=0)
    H = HamiltonianOperator.build(p)
    psi = random_spin(4, rng)
    alpha = np.zeros(4, dtype=np.complex128)
    out = effective_spin_hamiltonian_apply(psi, alpha, p)
    assert np.max(np.abs(out - H.apply_flat(psi))) < 1e-14
    # nonzero alpha at g = 0 only adds the classical oscillator energy
    alpha = rng.normal(size=4) + 1j * rng.normal(size=4)
    out = effective_spin_hamiltonian_apply(psi, alpha, p)
    shift = p.omega0 * np.sum(np.abs(alpha) ** 2)
    assert np.max(np.abs(out - H.apply_flat(psi) - shift * psi)) < 1e-12


def test_real_alpha_gives_renormalized_sigma_x(rng):
    # all alpha real: theta = 0 and the flip term is -exp(-2 gamma^2) h_x sigma^x
    p = small_params(L=3, w=1, l=1, g=0.4, omega0=0.8, h_x=0.5, h_z=0.3, n_max=0)
    psi = random_spin(3, rng)
    alpha = rng.normal(size=3).astype(np.complex128)
    out = effective_spin_hamiltonian_apply(psi, alpha, p)
    kappa = transverse_scale(p)
    ref_params = p.replace(h_x=kappa, g=0.0)
    H_ref = HamiltonianOperator.build(ref_params)
    scalar = p.omega0 * np.sum(np.abs(alpha) ** 2) - p.L * p.g**2 / p.omega0
    assert np.max(np.abs(out - H_ref.apply_flat(psi) - scalar * psi)) < 1e-12


def test_transverse_renormalization_value():
    p = small_params(L=2, w=1, l=0, g=0.2, omega0=1.0, h_x=1.0)
    assert transverse_scale(p) == pytest.approx(np.exp(-0.08), abs=1e-15)
    assert transverse_scale(p) == pytest.approx(0.9231, abs=1e-4)


def test_sigma_plus_expectation_values():
    space = HilbertSpace(2, 0)
    # (|up> + |down>)/sqrt(2) on site 1, site 2 up: <sigma^+_1> = 1/2
    psi = np.zeros(4, dtype=np.complex128)
    psi[space.encode((0, 0), (0, 0))] = 1 / np.sqrt(2)
    psi[space.encode((1, 0), (0, 0))] = 1 / np.sqrt(2)
    sp = sigma_plus_expectations(psi, 2)
    assert sp[0] == pytest.approx(0.5, abs=1e-15)
    assert sp[1] == pytest.approx(0.0, abs=1e-15)


def test_decoupled_oscillator_rotation(rng):
    # h_x = 0 and z-basis product spins: alpha_j(t) = alpha_j(0) exp(-i omega0 t)
    p = small_params(L=3, w=1, l=1, h_x=0.0, h_z=0.9, g=0.3, omega0=0.7, n_max=0)
    space = HilbertSpace(3, 0)
    psi0 = np.zeros(8, dtype=np.complex128)
    psi0[space.encode((0, 1, 0), (0, 0, 0))] = 1.0
    alpha0 = rng.normal(size=3) + 1j * rng.normal(size=3)
    state = SemiclassicalState(psi0, alpha0.copy(), 0.0)
    dt, n = 0.01, 150
    for _ in range(n):
        state = eom_step(state, p, dt)
    expected = alpha0 * np.exp(-1j * p.omega0 * n * dt)
    assert np.max(np.abs(state.alpha - expected)) < 1e-8
    # spin state only collects phases: occupation probabilities frozen
    assert np.max(np.abs(np.abs(state.psi_spin) - np.abs(psi0))) < 1e-9


def test_g_zero_matches_full_quantum_backend():
    p = small_params(L=4, w=2, l=1, g=0.0, n_max=0, h_x=0.2, h_z=1.0,
                     t_max=5.0, dt_sample=0.5, dt_step=0.05, krylov_tol=1e-11)
    full = run_experiment(p, "full")
    semi_frames, _ = run_semiclassical(p, dt=0.002)
    assert frames_max_deviation(full.frames, semi_frames) < 1e-6


def test_weak_coupling_tracks_full_quantum():
    p = small_params(L=4, w=2, l=1, g=0.05, n_max=2, omega0=1.0, h_x=0.2, h_z=1.0,
                     t_max=5.0, dt_sample=0.5, dt_step=0.05)
    full = run_experiment(p, "full")
    semi_frames, _ = run_semiclassical(p, dt=0.005)
    dev = max(np.max(np.abs(fa.sigma_z - fb.sigma_z))
              for fa, fb in zip(full.frames, semi_frames))
    assert dev < 0.05


def test_capacity_guard():
    p = small_params(L=21, w=2, l=9, n_max=0)
    with pytest.raises(CapacityError):
        run_semiclassical(p)


def test_step_size_error_on_wild_step(rng):
    p = small_params(L=4, w=2, l=1, h_x=0.5, h_z=1.0, g=0.0, n_max=0)
    state = SemiclassicalState(random_spin(4, rng), np.zeros(4, dtype=complex), 0.0)
    with pytest.raises(PropagationError):
        eom_step(state, p, 2.0)


def test_dt_must_divide_sample_interval():
    p = small_params(L=3, w=1, l=1, t_max=1.0, dt_sample=0.5)
    with pytest.raises(DomainError):
        run_semiclassical(p, dt=0.3)


def test_energy_drift_shrinks_under_refinement():
    p = small_params(L=4, w=2, l=1, g=0.15, omega0=0.7, h_x=0.4, h_z=1.0,
                     n_max=0, t_max=2.0, dt_sample=0.5)
    _, coarse = run_semiclassical(p, dt=0.02)
    _, fine = run_semiclassical(p, dt=0.01)
    assert fine.max_energy_drift < coarse.max_energy_drift


def test_frames_report_coherent_phonon_statistics():
    p = small_params(L=4, w=2, l=1, g=0.2, omega0=0.5, h_x=0.2, h_z=1.0,
                     n_max=0, t_max=1.0, dt_sample=0.5)
    frames, _ = run_semiclassical(p, dt=0.01)
    assert frames[0].backend == "semiclassical"
    assert np.array_equal(frames[0].n_mean, np.zeros(4))  # vacuum start
    late = frames[-1]
    assert np.array_equal(late.n_std, np.sqrt(late.n_mean))  # Poisson statistics


def test_initial_frame_matches_full_quantum_exactly():
    # sigma^z-diagonal quantities agree exactly at t = 0; the energy column is
    # frame-dependent for g > 0 (polaron shift -L g^2/omega0)
    p = small_params(L=5, w=2, l=2, g=0.1, omega0=0.5, n_max=2, t_max=0.0)
    full = run_experiment(p, "full")
    semi_frames, _ = run_semiclassical(p, dt=0.01)
    fa, fb = full.frames[0], semi_frames[0]
    for name in ("D_in", "D_bd", "Delta_in", "Delta_bd", "S_cr", "S_ed"):
        assert getattr(fa, name) == getattr(fb, name)
    assert np.array_equal(fa.D_bond, fb.D_bond)
    assert np.array_equal(fa.sigma_z, fb.sigma_z)
    assert np.array_equal(fa.n_mean, fb.n_mean)
    assert fb.energy - fa.energy == pytest.approx(-p.L * p.g**2 / p.omega0, abs=1e-12)
    # at g = 0 the frames coincide entirely, energy included
    p0 = p.replace(g=0.0)
    full0 = run_experiment(p0, "full")
    semi0, _ = run_semiclassical(p0, dt=0.01)
    assert frames_max_deviation(full0.frames[:1], semi0[:1]) < 1e-12
