"""Parameterized drive pulses: Rabi envelope Omega(t) and detuning Delta(t).

All quantities are dimensionless: time in units of 1/Omega0, frequencies in
units of Omega0, so the envelope peaks at 1. Five families are supported:

* ``delta_jump``     constant detuning plus instantaneous laser-phase jumps,
* ``triangle``       isosceles triangular detuning peak on a baseline,
* ``gaussian``       Gaussian detuning peak, constant envelope,
* ``gaussian_ramped``Gaussian detuning with tanh ramp-on/off of the envelope,
* ``dcrab``          baseline plus a randomized symmetric cosine basis.

Every family's detuning is symmetric about tau/2 by construction, matching
the symmetric-gate setting; the phase jump of ``delta_jump`` is handled as a
discrete event by the propagator (see :mod:`rydgate.dynamics`), never as a
numerical spike.
"""

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np


class Family(str, enum.Enum):
    DELTA_JUMP = "delta_jump"
    TRIANGLE = "triangle"
    GAUSSIAN = "gaussian"
    GAUSSIAN_RAMPED = "gaussian_ramped"
    DCRAB = "dcrab"


@dataclass(frozen=True)
class DCRABBasis:
    """Randomized truncated cosine basis for the detuning correction.

    Cosines about tau/2 are even, so the symmetry constraint holds by
    construction; frequencies are drawn once per super-iteration and bounded
    by ``f_max``.
    """

    frequencies: tuple[float, ...]
    amplitudes: tuple[float, ...]
    delta0: float = 0.0

    @property
    def n_components(self) -> int:
        return len(self.frequencies)


def random_frequencies(rng: np.random.Generator, n_components: int,
                       f_max: float) -> tuple[float, ...]:
    """Draw ``n_components`` ordinary frequencies uniformly from (0, f_max]."""
    u = rng.uniform(0.0, 1.0, size=n_components)
    return tuple(f_max * (1.0 - u))


@dataclass(frozen=True)
class PulseShape:
    """One drive pulse: family, duration tau and family-specific parameters.

    Parameters
    ----------
    family : Family
        Pulse family.
    tau : float
        Gate duration in units of 1/Omega0.
    delta0 : float
        Detuning baseline (all families sit on a baseline).
    amp, width : float
        Gaussian peak height and width (gaussian / gaussian_ramped).
    height, base : float
        Triangle height and full base width (triangle).
    kappa : float
        tanh ramp time scale of the envelope (gaussian_ramped).
    jump_points : tuple[(time, theta), ...]
        Instantaneous laser-phase jumps (delta_jump); each multiplies the
        state by exp(i theta) per atom in |r>.
    amplitudes, frequencies : tuple[float, ...]
        dcrab cosine components.
    omega_scale : float
        Overall envelope scale in [0, 1]; 0 turns the drive off entirely
        (identity gate), 1 is the full Rabi frequency.
    """

    family: Family
    tau: float
    delta0: float = 0.0
    amp: float = 0.0
    width: float = 1.0
    height: float = 0.0
    base: float = 1.0
    kappa: float = 0.0
    jump_points: tuple[tuple[float, float], ...] = ()
    amplitudes: tuple[float, ...] = ()
    frequencies: tuple[float, ...] = ()
    omega_scale: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.omega_scale <= 1.0:
            raise ValueError("omega_scale must lie in [0, 1]")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.family is Family.TRIANGLE and not (0 < self.base <= self.tau):
            raise ValueError("triangle base must lie in (0, tau]")
        if self.family is Family.GAUSSIAN_RAMPED and self.kappa <= 0:
            raise ValueError("gaussian_ramped requires kappa > 0")
        if self.family is Family.DCRAB and len(self.amplitudes) != len(self.frequencies):
            raise ValueError("dcrab amplitudes and frequencies must align")
        for t_j, _ in self.jump_points:
            if not 0 < t_j < self.tau:
                raise ValueError("jump point must lie strictly inside (0, tau)")

    # -- evaluation ---------------------------------------------------------

    def omega(self, t):
        """Rabi envelope at time t (scalar or array); 0 outside [0, tau]."""
        t = np.asarray(t, dtype=float)
        inside = (t >= 0.0) & (t <= self.tau)
        if self.family is Family.GAUSSIAN_RAMPED:
            val = np.tanh(np.clip(t, 0.0, None) / self.kappa) * \
                np.tanh(np.clip(self.tau - t, 0.0, None) / self.kappa)
        else:
            val = np.ones_like(t)
        out = np.where(inside, self.omega_scale * val, 0.0)
        return out if out.ndim else float(out)

    def delta(self, t):
        """Detuning at time t (scalar or array)."""
        t = np.asarray(t, dtype=float)
        s = t - self.tau / 2.0
        if self.family is Family.GAUSSIAN or self.family is Family.GAUSSIAN_RAMPED:
            val = self.delta0 + self.amp * np.exp(-s * s / (2.0 * self.width ** 2))
        elif self.family is Family.TRIANGLE:
            val = self.delta0 + self.height * np.clip(1.0 - np.abs(s) / (self.base / 2.0), 0.0, None)
        elif self.family is Family.DCRAB:
            val = np.full_like(t, self.delta0)
            for a, f in zip(self.amplitudes, self.frequencies):
                val = val + a * np.cos(2.0 * math.pi * f * s)
        else:  # delta_jump: constant baseline, jumps handled as events
            val = np.full_like(t, self.delta0)
        return val if val.ndim else float(val)

    # -- transforms ---------------------------------------------------------

    def with_baseline_shift(self, shift: float) -> "PulseShape":
        """Copy of this pulse with the detuning baseline offset by ``shift``."""
        return replace(self, delta0=self.delta0 + shift)

    def replace(self, **updates) -> "PulseShape":
        return replace(self, **updates)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        d = {"family": self.family.value, "tau": self.tau, "delta0": self.delta0}
        if self.omega_scale != 1.0:
            d["omega_scale"] = self.omega_scale
        if self.family in (Family.GAUSSIAN, Family.GAUSSIAN_RAMPED):
            d.update(amp=self.amp, width=self.width)
        if self.family is Family.GAUSSIAN_RAMPED:
            d.update(kappa=self.kappa)
        if self.family is Family.TRIANGLE:
            d.update(height=self.height, base=self.base)
        if self.family is Family.DELTA_JUMP:
            d.update(jump_points=[list(jp) for jp in self.jump_points])
        if self.family is Family.DCRAB:
            d.update(amplitudes=list(self.amplitudes), frequencies=list(self.frequencies))
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PulseShape":
        kw = dict(d)
        kw["family"] = Family(kw["family"])
        if "jump_points" in kw:
            kw["jump_points"] = tuple((float(t), float(th)) for t, th in kw["jump_points"])
        for key in ("amplitudes", "frequencies"):
            if key in kw:
                kw[key] = tuple(float(x) for x in kw[key])
        return cls(**kw)


def eval_omega(pulse: PulseShape, t):
    return pulse.omega(t)


def eval_delta(pulse: PulseShape, t):
    return pulse.delta(t)


def bandwidth_estimate(pulse: PulseShape, n_grid: int = 8192) -> float:
    """99%-energy spectral width of Delta(t) - Delta0, as a frequency.

    A delta_jump pulse has a flat spectrum and is reported as ``inf``; a pulse
    whose detuning never leaves the baseline has zero bandwidth.
    """
    if pulse.family is Family.DELTA_JUMP and pulse.jump_points:
        return math.inf
    t = np.linspace(0.0, pulse.tau, n_grid, endpoint=False)
    signal = np.asarray(pulse.delta(t)) - pulse.delta0
    power = np.abs(np.fft.rfft(signal)) ** 2
    total = power.sum()
    if total <= 0.0:
        return 0.0
    freqs = np.fft.rfftfreq(n_grid, d=pulse.tau / n_grid)
    k = int(np.searchsorted(np.cumsum(power), 0.99 * total))
    return float(freqs[min(k, len(freqs) - 1)])


def dcrab_pulse(tau: float, delta0: float, basis: DCRABBasis) -> PulseShape:
    """Assemble a dcrab PulseShape from a basis and baseline."""
    return PulseShape(
        family=Family.DCRAB,
        tau=tau,
        delta0=delta0,
        amplitudes=tuple(basis.amplitudes),
        frequencies=tuple(basis.frequencies),
    )
