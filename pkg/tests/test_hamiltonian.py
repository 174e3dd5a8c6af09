import numpy as np
import pytest
import sympy

from rydgate.hamiltonian import (Couplings, assemble_hamiltonian,
                                 vdw_taylor_coefficients)
from rydgate.pulses import Family, PulseShape
from rydgate.spaces import build_space, operators


def flat_pulse(tau=8.0, delta0=0.0):
    return PulseShape(family=Family.GAUSSIAN, tau=tau, delta0=delta0, amp=0.0)


def test_idealized_matrix_matches_hand_built():
    # H = sum_i [ (Omega/2)(sigma+ + sigma-) - Delta n_i ] + V n1 n2
    space = build_space()
    v, delta = 21.1, 0.37
    ham = assemble_hamiltonian(space, Couplings(v=v), flat_pulse(delta0=delta))
    got = ham(1.3)

    sp = np.zeros((3, 3), complex)
    sp[2, 1] = 1.0
    n = np.zeros((3, 3), complex)
    n[2, 2] = 1.0
    eye = np.eye(3)
    drive = 0.5 * (sp + sp.conj().T)
    expected = (np.kron(drive, eye) + np.kron(eye, drive)
                - delta * (np.kron(n, eye) + np.kron(eye, n))
                + v * np.kron(n, n))
    assert np.max(np.abs(got - expected)) == 0.0


def test_hermitian_without_decay():
    space = build_space([(0, "z", 6), (1, "z", 6)])
    couplings = Couplings(v=21.1, omega_z=0.005, eta_z=0.66)
    pulse = PulseShape(family=Family.GAUSSIAN, tau=8.0, delta0=0.4, amp=1.5,
                       width=1.7)
    ham = assemble_hamiltonian(space, couplings, pulse, ("recoil", "trap"))
    for t in np.linspace(0.0, 8.0, 17):
        h = ham(t).toarray()
        assert np.max(np.abs(h - h.conj().T)) < 1e-12


def test_decay_contributes_anti_hermitian_diagonal():
    space = build_space()
    gamma = 1.0 / (2 * np.pi * 10e6 * 50e-6)  # lifetime 50 us at 10 MHz drive
    ham = assemble_hamiltonian(space, Couplings(v=21.1, gamma=gamma),
                               flat_pulse(), ("decay",))
    imag_diag = np.imag(np.diag(ham(0.5)))
    r_counts = space.rydberg_counts()
    assert np.array_equal(imag_diag, -0.5 * gamma * r_counts)


def test_vdw_taylor_coefficients_match_symbolic_expansion():
    u = sympy.symbols("u")
    series = sympy.series((1 + u) ** -6, u, 0, 6).removeO()
    expected = [int(series.coeff(u, k)) for k in range(1, 6)]
    assert vdw_taylor_coefficients(5) == expected
    assert vdw_taylor_coefficients(2) == [-6, 21]


def test_vdw_first_order_matrix():
    # order-1 expansion equals V (1 + 6 (x2 - x1)/R) n1 n2
    space = build_space([(0, "x", 4), (1, "x", 4)])
    v, ratio = 21.1, 0.0113
    couplings = Couplings(v=v, omega_x=0.01, xzpf_over_r=ratio)
    ham = assemble_hamiltonian(space, couplings, flat_pulse(),
                               ("vdw_position_dependence",), vdw_taylor_order=1)
    ops = operators(space)
    p_rr = (ops.number[0] @ ops.number[1]).toarray()
    x1 = ops.position(0, "x").toarray()
    x2 = ops.position(1, "x").toarray()
    expected = v * (np.eye(space.total_dim) + 6.0 * ratio * (x2 - x1)) @ p_rr
    static = ham.static.toarray()
    assert np.max(np.abs(static - expected)) < 1e-12


def test_flag_space_mismatch_errors():
    bare = build_space()
    with pytest.raises(ValueError):
        assemble_hamiltonian(bare, Couplings(v=21.1), flat_pulse(), ("recoil",))
    with pytest.raises(ValueError):
        assemble_hamiltonian(bare, Couplings(v=21.1), flat_pulse(), ("trap",))
    with pytest.raises(ValueError):
        assemble_hamiltonian(bare, Couplings(v=21.1), flat_pulse(),
                             ("vdw_position_dependence",))
    z_only = build_space([(0, "z", 4), (1, "z", 4)])
    with pytest.raises(ValueError):
        assemble_hamiltonian(z_only, Couplings(v=21.1, omega_z=0.005),
                             flat_pulse(), ("vdw_position_dependence",))
    with pytest.raises(ValueError):
        assemble_hamiltonian(bare, Couplings(v=21.1), flat_pulse(), ("noise",))


def test_zero_recoil_reduces_to_plain_drive():
    # k = 0 makes the displacement the exact identity: bit-identical drive
    space = build_space([(0, "z", 5), (1, "z", 5)])
    with_recoil = assemble_hamiltonian(
        space, Couplings(v=21.1, omega_z=0.005, eta_z=0.0), flat_pulse(),
        ("recoil", "trap"))
    without = assemble_hamiltonian(
        space, Couplings(v=21.1, omega_z=0.005), flat_pulse(), ("trap",))
    diff = (with_recoil.rabi - without.rabi).toarray()
    assert np.array_equal(diff, np.zeros_like(diff))


def test_phase_jump_diagonal():
    space = build_space()
    ham = assemble_hamiltonian(space, Couplings(v=21.1), flat_pulse())
    diag = ham.phase_jump_diagonal(0.7)
    assert np.allclose(diag, np.exp(1j * 0.7 * space.rydberg_counts()))
