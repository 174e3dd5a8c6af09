import math

import numpy as np
import pytest

from rydgate.budget import SystemConfig
from rydgate.spaces import (HilbertSpace, MotionalAxis, build_space,
                            displacement_matrix, ladder, operators)


def test_dimensions():
    assert build_space().total_dim == 9
    assert build_space([(0, "z", 10), (1, "z", 10)]).total_dim == 900
    assert build_space([(0, "x", 4), (1, "x", 4)]).total_dim == 144


def test_index_bijection_roundtrip():
    space = build_space([(0, "z", 5), (1, "z", 3), (0, "x", 4)])
    rng = np.random.default_rng(4)
    for _ in range(200):
        idx = int(rng.integers(space.total_dim))
        assert space.index_of(space.multi_of(idx)) == idx


def test_invalid_spaces_rejected():
    with pytest.raises(ValueError):
        build_space([(0, "z", 0)])
    with pytest.raises(ValueError):
        build_space([(0, "z", 4), (0, "z", 6)])
    with pytest.raises(ValueError):
        MotionalAxis(2, "z", 4)
    with pytest.raises(ValueError):
        MotionalAxis(0, "w", 4)


def test_operator_identities():
    space = build_space([(0, "z", 6), (1, "z", 6)])
    ops = operators(space)
    for i in (0, 1):
        sp = ops.sigma_plus[i].toarray()
        sm = ops.sigma_minus[i].toarray()
        n = ops.number[i].toarray()
        assert np.array_equal(sp, sm.conj().T)
        assert np.array_equal(n, n.conj().T)
        assert np.array_equal(n @ n, n)


def test_ladder_commutator_truncation():
    n = 7
    a = ladder(n)
    comm = a @ a.conj().T - a.conj().T @ a
    # canonical commutator on all but the top truncated level
    assert np.allclose(np.diag(comm)[:-1], 1.0, atol=1e-14)
    assert np.isclose(np.diag(comm)[-1], 1.0 - n, atol=1e-12)


def test_displacement_zero_kick_is_identity():
    d = displacement_matrix(0.0, 8)
    assert np.array_equal(d, np.eye(8))


def table1_eta():
    return SystemConfig().lamb_dicke_z


def test_displacement_ground_state_overlap_matches_gaussian():
    # <0|exp(ikz)|0> = exp(-eta^2/2) for the measured trap and mass
    eta = table1_eta()
    d = displacement_matrix(eta, 12)
    assert abs(d[0, 0] - math.exp(-eta ** 2 / 2.0)) < 1e-10


def test_displacement_generates_coherent_state():
    # column 0 is the coherent state |alpha> with alpha = i eta
    eta = table1_eta()
    d = displacement_matrix(eta, 14)
    alpha = 1j * eta
    expected = np.array([
        np.exp(-abs(alpha) ** 2 / 2.0) * alpha ** n / math.sqrt(math.factorial(n))
        for n in range(14)
    ])
    assert np.max(np.abs(d[:, 0] - expected)) < 1e-9


def test_displacement_truncation_leakage_with_padding():
    # built on a ladder padded by 8 levels, the columns of the first
    # N_phys levels stay unitary to better than 1e-6 at the setup's eta
    eta = table1_eta()
    n_phys, n_pad = 10, 8
    d = displacement_matrix(eta, n_phys + n_pad)
    for n in range(n_phys):
        leakage = 1.0 - np.sum(np.abs(d[:, n]) ** 2)
        assert leakage < 1e-6


def test_basis_state_labels():
    space = build_space([(0, "z", 3), (1, "z", 3)])
    psi = space.basis_state("1r", (2, 1))
    idx = int(np.argmax(np.abs(psi)))
    assert space.multi_of(idx) == (1, 2, 2, 1)
    with pytest.raises(ValueError):
        space.basis_state("12")
