import numpy as np
import pytest

from isingstring.dense import dense_assemble, dense_evolve
from isingstring.errors import DomainError, PropagationError
from isingstring.hamiltonian import HamiltonianOperator
from isingstring.hilbert import StateVector, build_initial_state
from isingstring.krylov import PropagationPlan, evolve_and_sample, krylov_step
from conftest import random_state, small_params


def test_stationary_basis_state_gets_pure_phase():
    p = small_params(L=3, w=1, l=1, h_x=0.0, h_z=0.8, g=0.0, n_max=0)
    H = HamiltonianOperator.build(p)
    psi = build_initial_state(p)
    index = int(np.flatnonzero(psi.amplitudes)[0])
    energy = H.energy_expectation(psi)
    out = krylov_step(H, psi, 0.37, p.krylov_dim, 1e-12)
    assert np.max(np.abs(np.abs(out.amplitudes) - np.abs(psi.amplitudes))) < 1e-13
    assert out.amplitudes[index] == pytest.approx(np.exp(-1j * energy * 0.37), abs=1e-12)


def test_rabi_oscillation():
    p = small_params(L=1, w=1, l=0, h_x=0.2, h_z=0.0, g=0.0, n_max=0)
    H = HamiltonianOperator.build(p)
    psi = StateVector.basis_state(H.space, 0)
    dt, n = 0.1, 80
    for k in range(1, n + 1):
        psi = krylov_step(H, psi, dt, 10, 1e-12)
        sz = abs(psi.amplitudes[0]) ** 2 - abs(psi.amplitudes[1]) ** 2
        assert sz == pytest.approx(np.cos(2 * 0.2 * k * dt), abs=1e-9)


def test_matches_dense_exponential(rng):
    p = small_params(L=3, w=1, l=1, h_x=0.3, h_z=0.4, omega0=0.6, g=0.15, n_max=1,
                     t_max=5.0, dt_step=0.05, dt_sample=0.5)
    H = HamiltonianOperator.build(p)
    psi0 = random_state(H.space, rng)
    exact = dense_evolve(dense_assemble(H), psi0, 5.0)
    outputs, _ = evolve_and_sample(H, psi0, PropagationPlan.from_params(p))
    _, approx = outputs[-1]
    assert np.max(np.abs(approx.amplitudes - exact.amplitudes)) < 1e-8


def test_small_space_breakdown_is_exact(rng):
    # krylov_dim far above dim: Lanczos must terminate on the invariant subspace
    p = small_params(L=2, w=1, l=0, h_x=0.5, h_z=0.3, n_max=0, krylov_dim=25)
    H = HamiltonianOperator.build(p)
    psi = random_state(H.space, rng)
    out = krylov_step(H, psi, 3.0, 25, 1e-10)
    exact = dense_evolve(dense_assemble(H), psi, 3.0)
    assert np.max(np.abs(out.amplitudes - exact.amplitudes)) < 1e-12


def test_time_reversal(rng):
    p = small_params(L=4, w=2, l=1, h_x=0.3, h_z=0.5, n_max=1, g=0.1, omega0=0.4)
    H = HamiltonianOperator.build(p)
    psi0 = random_state(H.space, rng)
    psi = psi0
    for _ in range(10):
        psi = krylov_step(H, psi, 0.2, 30, 1e-10)
    for _ in range(10):
        psi = krylov_step(H, psi, -0.2, 30, 1e-10)
    assert np.linalg.norm(psi.amplitudes - psi0.amplitudes) < 1e-6


def test_step_too_large_raises(rng):
    p = small_params(L=4, w=2, l=1, h_x=0.9, h_z=0.5, n_max=0)
    H = HamiltonianOperator.build(p)
    psi = random_state(H.space, rng)
    with pytest.raises(PropagationError, match="dt_step"):
        krylov_step(H, psi, 50.0, 3, 1e-12)


def test_unnormalized_input_rejected(rng):
    p = small_params(L=3, w=1, l=1)
    H = HamiltonianOperator.build(p)
    psi = random_state(H.space, rng)
    psi.amplitudes *= 1.5
    with pytest.raises(PropagationError):
        krylov_step(H, psi, 0.1, 10, 1e-9)


def test_plan_validation():
    with pytest.raises(DomainError):
        PropagationPlan(dt_step=0.3, dt_sample=0.5, t_max=1.0, krylov_dim=10,
                        krylov_tol=1e-9)
    plan = PropagationPlan(dt_step=0.1, dt_sample=0.5, t_max=2.0, krylov_dim=10,
                           krylov_tol=1e-9)
    assert plan.n_inner == 5 and plan.n_samples == 4


def test_zero_t_max_single_frame():
    p = small_params(L=3, w=1, l=1, t_max=0.0)
    H = HamiltonianOperator.build(p)
    outputs, report = evolve_and_sample(H, build_initial_state(p),
                                        PropagationPlan.from_params(p))
    assert len(outputs) == 1 and outputs[0][0] == 0.0
    assert report.n_steps == 0


def test_sample_grid_and_conservation():
    p = small_params(L=6, w=2, l=2, h_x=0.4, h_z=0.7, t_max=10.0, dt_sample=0.5,
                     dt_step=0.1, krylov_tol=1e-10)
    H = HamiltonianOperator.build(p)
    outputs, report = evolve_and_sample(H, build_initial_state(p),
                                        PropagationPlan.from_params(p))
    times = [t for t, _ in outputs]
    assert times == pytest.approx([0.5 * k for k in range(21)])
    assert report.max_norm_error < 1e-8
    assert report.max_energy_drift < 1e-6


def test_step_halving_stability():
    base = small_params(L=5, w=2, l=1, h_x=0.4, h_z=0.7, t_max=4.0, dt_sample=0.5,
                        dt_step=0.25, krylov_tol=1e-9)
    H = HamiltonianOperator.build(base)

    def final_state(p):
        outputs, _ = evolve_and_sample(H, build_initial_state(p),
                                       PropagationPlan.from_params(p))
        return outputs[-1][1].amplitudes

    coarse = final_state(base)
    fine = final_state(base.replace(dt_step=0.125))
    assert np.max(np.abs(coarse - fine)) < 10 * base.krylov_tol * (4.0 / base.dt_step)


def test_abort_reports_last_good_time(rng):
    p = small_params(L=4, w=2, l=1, h_x=0.9, t_max=3.0, dt_sample=1.0, dt_step=1.0,
                     krylov_dim=3, krylov_tol=1e-14)
    H = HamiltonianOperator.build(p)
    with pytest.raises(PropagationError, match="last good sample at t = 0"):
        evolve_and_sample(H, build_initial_state(p), PropagationPlan.from_params(p))
