import numpy as np
import pytest

from rydgate.dynamics import (IntegrationError, apply_phase_jump, integrate,
                              propagate_columns)
from rydgate.hamiltonian import Couplings, assemble_hamiltonian
from rydgate.pulses import Family, PulseShape
from rydgate.spaces import build_space


def flat_pulse(tau, delta0=0.0):
    return PulseShape(family=Family.GAUSSIAN, tau=tau, delta0=delta0, amp=0.0)


def gaussian_pulse(tau=7.69):
    return PulseShape(family=Family.GAUSSIAN, tau=tau, delta0=1.1978,
                      amp=-1.8511, width=1.6863)


def test_resonant_rabi_oscillation():
    # one driven atom, no interaction: P_r(t) = sin^2(t/2)
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=0.0), flat_pulse(2 * np.pi))
    traj = integrate(ham, space.basis_state("01"), tolerance=1e-10,
                     grid_points=400)
    expected = np.sin(traj.times / 2.0) ** 2
    assert np.max(np.abs(traj.ryd_population[:, 1] - expected)) < 1e-8
    assert np.max(np.abs(traj.ryd_population[:, 0])) < 1e-12


def test_00_is_stationary():
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=21.1), gaussian_pulse())
    traj = integrate(ham, space.basis_state("00"), tolerance=1e-10)
    assert np.max(np.abs(traj.final_state - space.basis_state("00"))) < 1e-10
    assert abs(traj.norm[-1] - 1.0) < 1e-10


def test_blockade_enhanced_rabi_frequency():
    # strong blockade: |11> <-> W oscillates at sqrt(2) * Omega
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=1e4),
                               flat_pulse(2 * np.pi / np.sqrt(2.0)))
    traj = integrate(ham, space.basis_state("11"), tolerance=1e-9,
                     grid_points=400)
    # full transfer and return at the collectively enhanced period
    half = traj.ryd_population.sum(axis=1)[200]
    assert half == pytest.approx(1.0, abs=2e-3)
    assert abs(traj.final_state[space.index_of((1, 1))]) == pytest.approx(1.0, abs=2e-3)


def test_norm_conservation_without_decay():
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=21.1), gaussian_pulse())
    for alpha in ("01", "11"):
        traj = integrate(ham, space.basis_state(alpha), tolerance=1e-10)
        assert abs(traj.norm[-1] - 1.0) < 1e-8


def test_tolerance_halving_within_error_estimate():
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=21.1), gaussian_pulse())
    psi0 = space.basis_state("11")
    coarse = integrate(ham, psi0, tolerance=2e-8)
    fine = integrate(ham, psi0, tolerance=1e-8)
    change = np.max(np.abs(coarse.final_state - fine.final_state))
    assert change < coarse.error_estimate


def test_phase_jump_identities():
    space = build_space()
    rng = np.random.default_rng(5)
    psi = rng.normal(size=9) + 1j * rng.normal(size=9)
    assert np.array_equal(apply_phase_jump(psi, 0.0, space), psi)
    assert np.max(np.abs(apply_phase_jump(psi, 2 * np.pi, space) - psi)) < 1e-12


def test_phase_jump_counts_rydberg_atoms():
    space = build_space()
    theta = 0.7
    psi = np.ones(9, dtype=complex)
    jumped = apply_phase_jump(psi, theta, space)
    assert jumped[space.index_of((0, 0))] == pytest.approx(1.0)
    assert jumped[space.index_of((1, 2))] == pytest.approx(np.exp(1j * theta))
    assert jumped[space.index_of((2, 2))] == pytest.approx(np.exp(2j * theta))


def test_jump_pulse_equals_manual_segments():
    space = build_space()
    tau, theta = 8.53, -2.35
    pulse = PulseShape(family=Family.DELTA_JUMP, tau=tau, delta0=0.39,
                       jump_points=((tau / 2, theta),))
    ham = assemble_hamiltonian(space, Couplings(v=21.1), pulse)
    auto = integrate(ham, space.basis_state("11"), tolerance=1e-11).final_state

    half = propagate_columns(ham, space.basis_state("11"),
                             t_span=(0.0, tau / 2), tolerance=1e-11)
    half = apply_phase_jump(half, theta, space)
    manual = propagate_columns(ham, half, t_span=(tau / 2, tau), tolerance=1e-11)
    assert np.max(np.abs(auto - manual)) < 1e-10


def test_decay_removes_norm_only():
    space = build_space()
    gamma = 3e-4
    ham = assemble_hamiltonian(space, Couplings(v=21.1, gamma=gamma),
                               gaussian_pulse(), ("decay",))
    traj = integrate(ham, space.basis_state("11"), tolerance=1e-10)
    assert traj.norm[-1] < 1.0
    assert traj.norm[-1] > 0.99
    assert np.all(np.diff(traj.norm) <= 1e-12)  # norm never grows


def test_multi_column_propagation_matches_single():
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=21.1), gaussian_pulse())
    cols = np.stack([space.basis_state("01"), space.basis_state("11")], axis=1)
    batch = propagate_columns(ham, cols, tolerance=1e-11)
    single = propagate_columns(ham, space.basis_state("01"), tolerance=1e-11)
    assert np.max(np.abs(batch[:, 0] - single)) < 1e-9


def test_invalid_tolerance_rejected():
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=21.1), gaussian_pulse())
    with pytest.raises(ValueError):
        integrate(ham, space.basis_state("11"), tolerance=0.0)


def test_step_underflow_reports_pathological_pulse():
    # an absurd constant detuning forces the step below machine resolution
    space = build_space()
    pulse = flat_pulse(8.0, delta0=1e17)
    ham = assemble_hamiltonian(space, Couplings(v=21.1), pulse)
    with pytest.raises(IntegrationError):
        integrate(ham, space.basis_state("01"), tolerance=1e-10, grid_points=10)
