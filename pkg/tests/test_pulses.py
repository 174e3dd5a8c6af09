import math

import numpy as np
import pytest

from rydgate.pulses import (DCRABBasis, Family, PulseShape, bandwidth_estimate,
                            dcrab_pulse, eval_delta, eval_omega,
                            random_frequencies)


def sample_pulses():
    return [
        PulseShape(family=Family.DELTA_JUMP, tau=8.5, delta0=0.39,
                   jump_points=((4.25, -2.35),)),
        PulseShape(family=Family.TRIANGLE, tau=7.7, delta0=1.1, height=-1.9,
                   base=7.0),
        PulseShape(family=Family.GAUSSIAN, tau=7.7, delta0=1.2, amp=-1.85,
                   width=1.69),
        PulseShape(family=Family.GAUSSIAN_RAMPED, tau=8.16, delta0=1.35,
                   amp=-1.98, width=1.84, kappa=0.31),
        PulseShape(family=Family.DCRAB, tau=7.8, delta0=0.4,
                   amplitudes=(0.5, -0.2, 0.1), frequencies=(0.11, 0.23, 0.31)),
    ]


def test_constant_envelope_families():
    pulse = PulseShape(family=Family.GAUSSIAN, tau=7.7, amp=1.0)
    for t in (0.3, 3.85, 7.4):
        assert eval_omega(pulse, t) == 1.0
    assert eval_omega(pulse, -0.1) == 0.0
    assert eval_omega(pulse, 7.8) == 0.0


def test_ramped_envelope():
    pulse = PulseShape(family=Family.GAUSSIAN_RAMPED, tau=7.7, kappa=0.31)
    assert eval_omega(pulse, 0.0) == 0.0
    assert eval_omega(pulse, pulse.tau) == 0.0
    assert abs(eval_omega(pulse, pulse.tau / 2) - 1.0) < 1e-9
    mid = eval_omega(pulse, 0.31)
    assert 0 < mid < 1


def test_gaussian_detuning_values():
    pulse = PulseShape(family=Family.GAUSSIAN, tau=8.0, delta0=0.4, amp=1.5,
                       width=0.9)
    assert eval_delta(pulse, 4.0) == pytest.approx(1.9)
    tail = eval_delta(pulse, 4.0 + 3 * 0.9)
    assert abs(tail - 0.4) <= 1.5 * math.exp(-4.5) + 1e-12


def test_triangle_detuning_values():
    pulse = PulseShape(family=Family.TRIANGLE, tau=8.0, delta0=0.3, height=2.0,
                       base=2.0)
    assert eval_delta(pulse, 4.0) == pytest.approx(2.3)
    assert eval_delta(pulse, 2.9) == pytest.approx(0.3)
    assert eval_delta(pulse, 0.0) == pytest.approx(0.3)


def test_detuning_symmetry_about_midpoint():
    rng = np.random.default_rng(11)
    for pulse in sample_pulses():
        s = rng.uniform(0.0, pulse.tau / 2, size=1000)
        left = np.asarray(pulse.delta(pulse.tau / 2 - s))
        right = np.asarray(pulse.delta(pulse.tau / 2 + s))
        assert np.max(np.abs(left - right)) < 1e-12


def test_evaluation_is_deterministic():
    for pulse in sample_pulses():
        t = np.linspace(0, pulse.tau, 97)
        first = (np.asarray(pulse.omega(t)), np.asarray(pulse.delta(t)))
        second = (np.asarray(pulse.omega(t)), np.asarray(pulse.delta(t)))
        assert np.array_equal(first[0], second[0])
        assert np.array_equal(first[1], second[1])


def test_dcrab_zero_amplitudes_is_baseline():
    pulse = PulseShape(family=Family.DCRAB, tau=7.0, delta0=0.37,
                       amplitudes=(0.0, 0.0), frequencies=(0.2, 0.4))
    t = np.linspace(0, 7.0, 301)
    assert np.array_equal(np.asarray(pulse.delta(t)), np.full(301, 0.37))


def test_bandwidth_delta_jump_unbounded():
    pulse = PulseShape(family=Family.DELTA_JUMP, tau=8.5, delta0=0.4,
                       jump_points=((4.25, 1.0),))
    assert bandwidth_estimate(pulse) == math.inf


def test_bandwidth_scales_inversely_with_width():
    def bw(width):
        return bandwidth_estimate(PulseShape(
            family=Family.GAUSSIAN, tau=40.0, delta0=0.0, amp=1.0, width=width))
    ratio = bw(0.5) / bw(1.0)
    assert ratio == pytest.approx(2.0, rel=0.05)


def test_bandwidth_triangle_same_order_as_gaussian():
    gauss = PulseShape(family=Family.GAUSSIAN, tau=40.0, amp=1.0, width=1.0)
    tri = PulseShape(family=Family.TRIANGLE, tau=40.0, height=1.0, base=4.0)
    ratio = bandwidth_estimate(tri) / bandwidth_estimate(gauss)
    assert 0.2 < ratio < 5.0


def test_flat_detuning_has_zero_bandwidth():
    pulse = PulseShape(family=Family.GAUSSIAN, tau=8.0, delta0=0.5, amp=0.0)
    assert bandwidth_estimate(pulse) == 0.0


def test_serialization_roundtrip():
    for pulse in sample_pulses():
        clone = PulseShape.from_dict(pulse.to_dict())
        assert clone == pulse


def test_baseline_shift():
    pulse = PulseShape(family=Family.GAUSSIAN, tau=8.0, delta0=0.4, amp=1.0)
    shifted = pulse.with_baseline_shift(0.25)
    assert shifted.delta0 == pytest.approx(0.65)
    assert shifted.amp == pulse.amp


def test_validation_errors():
    with pytest.raises(ValueError):
        PulseShape(family=Family.GAUSSIAN, tau=-1.0)
    with pytest.raises(ValueError):
        PulseShape(family=Family.TRIANGLE, tau=5.0, base=6.0)
    with pytest.raises(ValueError):
        PulseShape(family=Family.GAUSSIAN_RAMPED, tau=5.0, kappa=0.0)
    with pytest.raises(ValueError):
        PulseShape(family=Family.DELTA_JUMP, tau=5.0, jump_points=((5.5, 1.0),))
    with pytest.raises(ValueError):
        PulseShape(family=Family.DCRAB, tau=5.0, amplitudes=(1.0,),
                   frequencies=())
    with pytest.raises(ValueError):
        PulseShape(family=Family.GAUSSIAN, tau=5.0, omega_scale=1.5)


def test_random_frequencies_bounded():
    rng = np.random.default_rng(3)
    freqs = random_frequencies(rng, 50, 0.477)
    assert len(freqs) == 50
    assert all(0.0 < f <= 0.477 for f in freqs)


def test_dcrab_basis_assembly():
    basis = DCRABBasis(frequencies=(0.1, 0.2), amplitudes=(0.3, -0.1))
    pulse = dcrab_pulse(6.0, 0.5, basis)
    assert pulse.delta(3.0) == pytest.approx(0.5 + 0.3 - 0.1)
    assert basis.n_components == 2
