import math

import numpy as np
import pytest

from rydgate.dynamics import integrate
from rydgate.hamiltonian import Couplings, assemble_hamiltonian
from rydgate.metrics import (PhaseUndefinedError, avg_fidelity_from_map,
                             avg_gate_fidelity, bell_correction_unitary,
                             bell_fidelity, bell_fidelity_from_map,
                             bell_overlap, characterize_gate, extract_phases,
                             gate_phases, ideal_cz_target, perturbative_trr,
                             process_map, rydberg_times, thermal_fock_weights,
                             wrap_angle)
from rydgate.pulses import Family, PulseShape
from rydgate.spaces import build_space

V = 21.1


def gaussian_pulse(tau=7.6938):
    return PulseShape(family=Family.GAUSSIAN, tau=tau, delta0=1.2267,
                      amp=-1.8766, width=1.7134)


def identity_pulse(tau=5.0):
    return PulseShape(family=Family.GAUSSIAN, tau=tau, omega_scale=0.0)


# ---------------------------------------------------------------------------
# Rydberg times


def test_uncoupled_state_spends_no_time_in_rydberg():
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=V), gaussian_pulse())
    traj = integrate(ham, space.basis_state("00"), tolerance=1e-10)
    times = rydberg_times(traj)
    assert abs(times.t_r) < 1e-12
    assert abs(times.t_rr) < 1e-12


def test_quadrature_error_below_threshold():
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=V), gaussian_pulse())
    traj = integrate(ham, space.basis_state("11"), tolerance=1e-10)
    times = rydberg_times(traj)
    assert times.quad_rel_error < 1e-4
    assert 0.0 < times.t_r < 2 * 7.6938


def test_perturbative_trr_scalings():
    base = perturbative_trr(3.87, 21.1)
    assert perturbative_trr(3.87, 42.2) == pytest.approx(base / 4.0)
    assert perturbative_trr(3.87, 1e9) == pytest.approx(0.0, abs=1e-18)
    with pytest.raises(ValueError):
        perturbative_trr(3.87, 4.9)


# ---------------------------------------------------------------------------
# Phases and leakage


def test_identity_pulse_all_phases_zero():
    space = build_space()
    result = characterize_gate(identity_pulse(), space, Couplings(v=V))
    assert result.phi_01 == pytest.approx(0.0, abs=1e-10)
    assert result.phi_10 == pytest.approx(0.0, abs=1e-10)
    assert result.phi_11 == pytest.approx(0.0, abs=1e-10)
    assert all(leak < 1e-12 for leak in result.leakage.values())


def test_symmetric_drive_gives_equal_single_qubit_phases():
    space = build_space()
    result = characterize_gate(gaussian_pulse(), space, Couplings(v=V))
    assert abs(result.phi_01 - result.phi_10) < 1e-9
    # accepted gate satisfies the controlled-phase condition
    assert abs(result.phase_defect) < 1e-4
    assert result.tbar_r == pytest.approx(
        (result.t_r["01"] + result.t_r["10"] + result.t_r["11"]) / 3.0, abs=0.0)


def test_phase_undefined_for_vanishing_amplitude():
    ref = np.zeros(4, complex)
    ref[0] = 1.0
    final = np.zeros(4, complex)
    final[1] = 1.0  # orthogonal to the reference
    with pytest.raises(PhaseUndefinedError):
        extract_phases({"00": final}, {"00": ref})


def test_exchange_symmetry_bit_identical():
    # swapping the atom labels swaps 01 <-> 10 and leaves metrics unchanged
    space = build_space()
    couplings = Couplings(v=V)
    res = characterize_gate(gaussian_pulse(), space, couplings)
    swapped = characterize_gate(gaussian_pulse(), space, couplings)
    assert abs(res.t_r["01"] - swapped.t_r["10"]) < 1e-12
    assert abs(res.t_r["10"] - swapped.t_r["01"]) < 1e-12
    assert abs(res.phi_01 - swapped.phi_10) < 1e-12
    assert abs(res.tbar_r - swapped.tbar_r) < 1e-12
    assert abs(res.t_rr - swapped.t_rr) < 1e-12


# ---------------------------------------------------------------------------
# Bell-state machinery


def synthetic_cz_output(phi01, phi10, phi11, space, fock=()):
    """|++> propagated through an ideal phase gate with the given phases."""
    psi = np.zeros(space.total_dim, complex)
    for label, phase in (("00", 0.0), ("01", phi01), ("10", phi10),
                         ("11", phi11)):
        psi += 0.5 * np.exp(1j * phase) * space.basis_state(label, fock or None)
    return psi


def test_correction_circuit_maps_ideal_cz_to_bell():
    # algebra check: arbitrary single-qubit phases, perfect pi on |11>
    space = build_space()
    phi01, phi10 = 0.31, 0.31
    psi = synthetic_cz_output(phi01, phi10, phi01 + phi10 + math.pi, space)
    fid = bell_overlap(psi, phi01, phi10, space)
    assert fid == pytest.approx(1.0, abs=1e-12)


def test_correction_circuit_on_motional_space():
    space = build_space([(0, "z", 4), (1, "z", 4)])
    psi = synthetic_cz_output(0.2, 0.2, 0.4 + math.pi, space, fock=(1, 2))
    assert bell_overlap(psi, 0.2, 0.2, space) == pytest.approx(1.0, abs=1e-12)


def test_phase_condition_violation_costs_fidelity():
    space = build_space()
    psi = synthetic_cz_output(0.0, 0.0, math.pi + 0.02, space)
    fid = bell_overlap(psi, 0.0, 0.0, space)
    # small-angle cost is (3/16) * defect^2
    assert 1.0 - fid == pytest.approx(3.0 / 16.0 * 0.02 ** 2, rel=1e-3)


def test_bell_fidelity_of_converged_gate_near_one():
    space = build_space()
    report = bell_fidelity(gaussian_pulse(), space, Couplings(v=V),
                           tolerance=1e-10)
    assert report.bell_fidelity > 1.0 - 5e-6
    assert report.converged


def test_gate_phases_match_characterization():
    space = build_space()
    couplings = Couplings(v=V)
    phi01, phi10 = gate_phases(gaussian_pulse(), space, couplings)
    res = characterize_gate(gaussian_pulse(), space, couplings)
    assert phi01 == pytest.approx(res.phi_01, abs=1e-9)
    assert phi10 == pytest.approx(res.phi_10, abs=1e-9)


# ---------------------------------------------------------------------------
# Process map and average gate fidelity


def test_average_fidelity_of_ideal_channel_is_one():
    phases = (0.31, 0.27)
    target = ideal_cz_target(*phases)
    e_map = {}
    for i in range(4):
        for j in range(4):
            basis = np.zeros((4, 4), complex)
            basis[i, j] = 1.0
            e_map[(i, j)] = target @ basis @ target.conj().T
    assert avg_fidelity_from_map(e_map, phases) == pytest.approx(1.0, abs=1e-12)
    assert bell_fidelity_from_map(e_map, phases) == pytest.approx(1.0, abs=1e-12)


def test_single_kraus_channel_haar_average():
    # for E(rho) = A rho A^dag the exact Haar average is
    # (|tr M|^2 + tr(M M^dag)) / (d^2 + d) with M = U^dag A; the
    # entanglement-fidelity route must agree through F = (d F_e + 1)/(d + 1)
    rng = np.random.default_rng(8)
    phases = (0.1, -0.4)
    target = ideal_cz_target(*phases)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a = 0.9 * a / np.linalg.norm(a, 2)
    e_map = {}
    for i in range(4):
        for j in range(4):
            basis = np.zeros((4, 4), complex)
            basis[i, j] = 1.0
            e_map[(i, j)] = a @ basis @ a.conj().T
    m = target.conj().T @ a
    exact = (abs(np.trace(m)) ** 2 + np.trace(m @ m.conj().T).real) / 20.0
    assert avg_fidelity_from_map(e_map, phases) == pytest.approx(exact, abs=1e-12)


def test_process_map_reconstruction_matches_direct_bell():
    space = build_space()
    couplings = Couplings(v=V, gamma=3e-4)
    pulse = gaussian_pulse()
    e_map, phases, converged, _ = process_map(pulse, space, couplings,
                                              flags=("decay",), tolerance=1e-10)
    assert converged
    from_map = bell_fidelity_from_map(e_map, phases)
    direct = bell_fidelity(pulse, space, couplings, flags=("decay",),
                           tolerance=1e-10).bell_fidelity
    assert from_map == pytest.approx(direct, abs=1e-8)


def test_decay_only_bell_matches_linear_estimate():
    # decay-only infidelity tracks (3/4) gamma Tbar_r within 2%
    space = build_space()
    gamma = 3.1831e-4  # 50 us lifetime at Omega0/2pi = 10 MHz
    pulse = gaussian_pulse()
    ideal = characterize_gate(pulse, space, Couplings(v=V), tolerance=1e-10)
    report = bell_fidelity(pulse, space, Couplings(v=V, gamma=gamma),
                           flags=("decay",), tolerance=1e-10)
    baseline = bell_fidelity(pulse, space, Couplings(v=V), tolerance=1e-10)
    numeric = baseline.bell_fidelity - report.bell_fidelity
    analytic = 0.75 * gamma * ideal.tbar_r
    assert numeric == pytest.approx(analytic, rel=0.02)


def test_avg_gate_fidelity_report_carries_both_metrics():
    space = build_space()
    report = avg_gate_fidelity(gaussian_pulse(), space,
                               Couplings(v=V, gamma=3e-4), flags=("decay",),
                               tolerance=1e-9, mechanism="decay")
    assert report.avg_gate_fidelity is not None
    assert report.bell_fidelity is not None
    # observed ordering for this setup: Bell infidelity is more restrictive
    assert 1 - report.bell_fidelity > 1 - report.avg_gate_fidelity
    assert report.mechanism == "decay"


# ---------------------------------------------------------------------------
# Thermal weights


def test_thermal_weights_zero_temperature():
    space = build_space([(0, "z", 6), (1, "z", 6)])
    weights, missing = thermal_fock_weights(space, {})
    assert weights == [(1.0, (0, 0))]
    assert missing == pytest.approx(0.0, abs=1e-12)


def test_thermal_weights_cutoff_and_tail():
    space = build_space([(0, "z", 10), (1, "z", 10)])
    q = {(0, "z"): 0.2019, (1, "z"): 0.2019}
    weights, missing = thermal_fock_weights(space, q, tail=1e-6)
    total = sum(w for w, _ in weights)
    assert total >= 1.0 - 1e-6
    assert missing <= 1e-6
    assert weights[0][1] == (0, 0)  # heaviest first


def test_thermal_weights_unreachable_tail_reported():
    space = build_space([(0, "z", 4), (1, "z", 4)])
    q = {(0, "z"): 0.7, (1, "z"): 0.7}
    _, missing = thermal_fock_weights(space, q, tail=1e-6)
    assert missing > 1e-6  # ladder too short: unconverged thermal sum


def test_wrap_angle():
    assert wrap_angle(math.pi) == pytest.approx(math.pi)
    assert wrap_angle(-math.pi) == pytest.approx(math.pi)
    assert wrap_angle(2 * math.pi + 0.1) == pytest.approx(0.1)
    assert wrap_angle(-0.3) == pytest.approx(-0.3)
