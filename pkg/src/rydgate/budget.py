"""Physical-units layer: experiment parameters and their dimensionless
couplings, closed-form infidelity estimates, mechanism-isolated simulations
and the assembled gate error budget.

All dynamics run dimensionless (hbar = 1, peak Rabi frequency = 1); this
module owns every conversion in and out of SI units.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import HBAR, K_B, SR88_MASS
from .hamiltonian import Couplings
from .metrics import (FidelityReport, avg_fidelity_from_map,
                      bell_fidelity, bell_fidelity_from_map,
                      characterize_gate, process_map, thermal_fock_weights)
from .pulses import PulseShape
from .spaces import build_space

MECHANISMS = ("decay", "recoil", "vdw")

# Per-axis Fock truncation of the mechanism simulations ("up to 10 harmonic
# oscillator modes") and its convergence probe increment.
DEFAULT_FOCK_DIM = 10
CONVERGENCE_PROBE = 2
CONVERGENCE_LIMIT = 0.05

# The combined simulation carries one ladder along the laser axis and one
# along the interatomic axis per atom; the x ladder can be much shorter
# because the interaction force barely excites it.
FULL_SIM_FOCK = {"z": 10, "x": 3}


@dataclass(frozen=True)
class SystemConfig:
    """Experimental parameters (defaults: the strontium-88 setup).

    Frequencies are ordinary frequencies (cycles per second): ``rabi_over_2pi``
    is the peak Rabi frequency Omega0/2pi, ``trap_*_over_2pi`` the trap
    frequencies. ``c6_over_h`` keeps its sign; the interaction strength is
    V = -C6 / R^6.
    """

    rabi_over_2pi: float = 10e6  # Hz
    trap_x_over_2pi: float = 100e3  # Hz
    trap_y_over_2pi: float = 100e3  # Hz
    trap_z_over_2pi: float = 50e3  # Hz
    rydberg_lifetime: float = 50e-6  # s
    wavelength: float = 323e-9  # m
    c6_over_h: float = -154e9 * 1e-36  # Hz m^6
    distance: float = 3e-6  # m
    mass: float = SR88_MASS  # kg
    temperature: float = 0.0  # K

    def __post_init__(self):
        for name in ("rabi_over_2pi", "trap_x_over_2pi", "trap_y_over_2pi",
                     "trap_z_over_2pi", "rydberg_lifetime", "wavelength",
                     "distance", "mass"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    # -- derived quantities (SI, angular frequencies in rad/s) -------------

    @property
    def omega0(self) -> float:
        return 2.0 * math.pi * self.rabi_over_2pi

    @property
    def gamma(self) -> float:
        return 1.0 / self.rydberg_lifetime

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    def trap_omega(self, axis: str) -> float:
        return 2.0 * math.pi * {
            "x": self.trap_x_over_2pi,
            "y": self.trap_y_over_2pi,
            "z": self.trap_z_over_2pi,
        }[axis]

    @property
    def v_over_hbar(self) -> float:
        """Interaction strength V / hbar = -2 pi (C6/h) / R^6, rad/s."""
        return -2.0 * math.pi * self.c6_over_h / self.distance ** 6

    @property
    def v_over_omega0(self) -> float:
        return self.v_over_hbar / self.omega0

    @property
    def recoil_rate(self) -> float:
        """hbar k^2 / 2m in rad/s (recoil energy over hbar)."""
        return HBAR * self.wavenumber ** 2 / (2.0 * self.mass)

    def zero_point_length(self, axis: str) -> float:
        """sqrt(hbar / (2 m omega)), the x = zpf (a + a^dag) scale."""
        return math.sqrt(HBAR / (2.0 * self.mass * self.trap_omega(axis)))

    def oscillator_length(self, axis: str) -> float:
        """sqrt(hbar / (m omega))."""
        return math.sqrt(HBAR / (self.mass * self.trap_omega(axis)))

    @property
    def lamb_dicke_z(self) -> float:
        return self.wavenumber * self.zero_point_length("z")

    def boltzmann_q(self, axis: str, temperature: float) -> float:
        """exp(-hbar omega / k_B T) for one trap axis (0 at T = 0)."""
        if temperature <= 0:
            return 0.0
        return math.exp(-HBAR * self.trap_omega(axis) / (K_B * temperature))

    def seconds(self, dimensionless_time: float) -> float:
        """Convert a time in units of 1/Omega0 to seconds."""
        return dimensionless_time / self.omega0

    def couplings(self) -> Couplings:
        return Couplings(
            v=self.v_over_omega0,
            gamma=self.gamma / self.omega0,
            omega_x=self.trap_omega("x") / self.omega0,
            omega_y=self.trap_omega("y") / self.omega0,
            omega_z=self.trap_omega("z") / self.omega0,
            eta_z=self.lamb_dicke_z,
            xzpf_over_r=self.zero_point_length("x") / self.distance,
        )


def thermal_coth(omega: float, temperature: float) -> float:
    """coth(hbar omega / 2 k_B T); equals 1 at T = 0 and 2<n>+1 otherwise."""
    if temperature <= 0:
        return 1.0
    return 1.0 / math.tanh(HBAR * omega / (2.0 * K_B * temperature))


def ground_state_occupation(omega: float, temperature: float) -> float:
    """Thermal probability of the motional ground state, 1 - exp(-hbar
    omega / k_B T); omega in rad/s."""
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0:
        return 1.0
    return 1.0 - math.exp(-HBAR * omega / (K_B * temperature))


# ---------------------------------------------------------------------------
# Closed-form infidelity estimates


def analytic_decay_infidelity(tbar_r: float, gamma: float) -> float:
    """Bell infidelity from Rydberg decay, (3/4) Tbar_r gamma (linear
    regime). Times in seconds, gamma in 1/s."""
    if gamma * tbar_r >= 0.1:
        raise ValueError("decay estimate is valid only for gamma * Tbar_r < 0.1")
    return 0.75 * tbar_r * gamma


def analytic_recoil_infidelity(config: SystemConfig, tbar_r: float,
                               temperature: float | None = None) -> float:
    """Bell infidelity from photon recoil,
    (15/32) (hbar k^2 / 2m) omega_z Tbar_r^2 coth(hbar omega_z / 2 k_B T)."""
    t_kelvin = config.temperature if temperature is None else temperature
    omega_z = config.trap_omega("z")
    if omega_z * tbar_r > 0.5:
        warnings.warn("trap frequency approaches the sideband-resolved regime; "
                      "the recoil estimate breaks down", stacklevel=2)
    return (15.0 / 32.0) * config.recoil_rate * omega_z * tbar_r ** 2 \
        * thermal_coth(omega_z, t_kelvin)


def recoil_phase_shift(config: SystemConfig) -> float:
    """Detuning shift compensating the recoil energy, (hbar k^2/2m)/2pi in Hz."""
    return config.recoil_rate / (2.0 * math.pi)


def analytic_vdw_infidelity(config: SystemConfig, t_rr: float,
                            temperature: float | None = None) -> float:
    """Bell infidelity from the interaction force on the doubly-excited
    state, (27/4) (T_rr V / hbar)^2 (hbar / m omega_x) / R^2 * coth(...)."""
    t_kelvin = config.temperature if temperature is None else temperature
    omega_x = config.trap_omega("x")
    return 6.75 * (t_rr * config.v_over_hbar) ** 2 \
        * (HBAR / (config.mass * omega_x)) / config.distance ** 2 \
        * thermal_coth(omega_x, t_kelvin)


def coherent_overlap(config: SystemConfig, tbar_r: float) -> complex:
    """Return amplitude of the recoil-kicked motional ground state,
    exp[-i (hbar k^2/2m) Tbar_r - (1/2)(hbar k^2/2m) omega_z Tbar_r^2].

    The first term is a pure phase (the recoil energy shift, absorbed into
    the detuning); the second is the ground-state return loss.
    """
    e_rec = config.recoil_rate
    omega_z = config.trap_omega("z")
    return complex(np.exp(-1j * e_rec * tbar_r
                          - 0.5 * e_rec * omega_z * tbar_r ** 2))


# ---------------------------------------------------------------------------
# Mechanism-isolated simulations


@dataclass
class MechanismResult:
    mechanism: str
    temperature: float
    bell_infidelity: float | None
    avg_infidelity: float | None
    converged: bool
    weight_tail: float = 0.0
    probe_shift: float = 0.0  # relative change of the N -> N+2 probe


def _mechanism_space(mechanism: str, fock_dim: int):
    if mechanism == "decay":
        return build_space(), frozenset({"decay"})
    if mechanism == "recoil":
        axes = [(0, "z", fock_dim), (1, "z", fock_dim)]
        return build_space(axes), frozenset({"recoil", "trap"})
    if mechanism == "vdw":
        axes = [(0, "x", fock_dim), (1, "x", fock_dim)]
        return build_space(axes), frozenset({"trap", "vdw_position_dependence"})
    raise ValueError(f"unknown mechanism {mechanism!r}")


def _prepared_pulse(config: SystemConfig, pulse: PulseShape, flags) -> PulseShape:
    """Absorb the recoil energy shift into the detuning baseline when the
    recoil coupling is active."""
    if "recoil" in flags:
        return pulse.with_baseline_shift(config.recoil_rate / config.omega0)
    return pulse


def _run_model(config, pulse, space, flags, temperature, tolerance,
               weight_tail, metrics="both"):
    if metrics == "bell":
        rep = bell_fidelity(pulse, space, config, temperature=temperature,
                            flags=flags, tolerance=tolerance,
                            weight_tail=weight_tail)
        return 1.0 - rep.bell_fidelity, None, rep.converged, rep.weight_tail
    e_map, phases, converged, missing = process_map(
        pulse, space, config, temperature=temperature, flags=flags,
        tolerance=tolerance, weight_tail=weight_tail)
    bell = bell_fidelity_from_map(e_map, phases)
    avg = avg_fidelity_from_map(e_map, phases)
    return 1.0 - bell, 1.0 - avg, converged, missing


def mechanism_simulation(mechanism: str, config: SystemConfig, pulse: PulseShape,
                         temperature: float = 0.0,
                         fock_dim: int = DEFAULT_FOCK_DIM,
                         tolerance: float = 1e-9,
                         weight_tail: float = 1e-6,
                         convergence_probe: bool = True,
                         max_escalations: int = 2,
                         metrics: str = "both") -> MechanismResult:
    """Numeric Bell and average infidelity with only one error mechanism
    enabled: decay on the bare internal space (atoms at fixed positions),
    recoil with one-dimensional traps along the laser axis, the interaction
    force with one-dimensional traps along the interatomic axis.

    Motional results are probed by re-running with two extra Fock levels;
    the ladder escalates by two levels while the probe moves the result by
    more than 5%. A point still unconverged after ``max_escalations`` (or
    whose thermal weight tail cannot be reached within the ladder) is
    flagged and its value suppressed.
    """
    space, flags = _mechanism_space(mechanism, fock_dim)
    run_pulse = _prepared_pulse(config, pulse, flags)

    if mechanism == "decay":
        # no motional degrees of freedom: temperature does not enter
        bell, avg, _, _ = _run_model(config, run_pulse, space, flags, 0.0,
                                     tolerance, weight_tail, metrics)
        return MechanismResult(mechanism, temperature, bell, avg, True)

    if temperature > 0:
        q = {(ax.atom, ax.axis): config.boltzmann_q(ax.axis, temperature)
             for ax in space.motional_axes}
        _, missing = thermal_fock_weights(space, q, weight_tail)
        if missing > weight_tail:
            return MechanismResult(mechanism, temperature, None, None, False,
                                   weight_tail=missing)

    current = _run_model(config, run_pulse, space, flags, temperature,
                         tolerance, weight_tail, metrics)
    if not convergence_probe:
        bell, avg, converged, missing = current
        return MechanismResult(mechanism, temperature, bell, avg, converged,
                               weight_tail=missing)

    probe_shift = math.inf
    for _ in range(max_escalations + 1):
        fock_dim += CONVERGENCE_PROBE
        probe_space, _ = _mechanism_space(mechanism, fock_dim)
        probe = _run_model(config, run_pulse, probe_space, flags, temperature,
                           tolerance, weight_tail, metrics)
        probe_shift = abs(probe[0] - current[0]) / max(abs(current[0]), 1e-12)
        if probe_shift <= CONVERGENCE_LIMIT and probe[2]:
            bell, avg, _, missing = probe
            return MechanismResult(mechanism, temperature, bell, avg, True,
                                   weight_tail=missing, probe_shift=probe_shift)
        current = probe
    return MechanismResult(mechanism, temperature, None, None, False,
                           weight_tail=current[3], probe_shift=probe_shift)


def full_simulation(config: SystemConfig, pulse: PulseShape,
                    fock_dims: dict = None,
                    tolerance: float = 1e-9) -> MechanismResult:
    """All error sources simultaneously: decay, recoil with z traps, and
    the position-dependent interaction with x traps (zero temperature)."""
    fock_dims = dict(FULL_SIM_FOCK, **(fock_dims or {}))
    axes = [(atom, axis, fock_dims[axis]) for atom in (0, 1) for axis in ("z", "x")]
    space = build_space(axes)
    flags = frozenset({"decay", "recoil", "trap", "vdw_position_dependence"})
    run_pulse = _prepared_pulse(config, pulse, flags)
    bell, avg, converged, missing = _run_model(
        config, run_pulse, space, flags, 0.0, tolerance, 1e-6)
    return MechanismResult("full", 0.0, bell, avg, converged, weight_tail=missing)


# ---------------------------------------------------------------------------
# Assembled budget


@dataclass
class ErrorBudget:
    """Per-mechanism analytic and numeric infidelities, their exact sum,
    and the combined full simulation at zero temperature."""

    temperatures: tuple
    tbar_r: float  # seconds, from the idealized gate characterization
    t_rr: float  # seconds
    bell_numeric: dict = field(default_factory=dict)  # (mechanism, T) -> value
    avg_numeric: dict = field(default_factory=dict)
    bell_analytic: dict = field(default_factory=dict)
    converged: dict = field(default_factory=dict)
    bell_full: float | None = None
    avg_full: float | None = None

    def summed(self, metric: str, temperature: float) -> float:
        values = self.bell_numeric if metric == "bell" else self.avg_numeric
        return sum(values[(m, temperature)] for m in MECHANISMS)

    def rows(self):
        """Table rows: (row label, metric, temperature, value, converged)."""
        out = []
        for metric, table in (("bell", self.bell_numeric), ("avg", self.avg_numeric)):
            for temp in self.temperatures:
                for mech in MECHANISMS:
                    out.append((mech, metric, temp, table[(mech, temp)],
                                self.converged[(mech, temp)]))
                out.append(("summed", metric, temp, self.summed(metric, temp), True))
            full = self.bell_full if metric == "bell" else self.avg_full
            if full is not None:
                out.append(("full", metric, 0.0, full, True))
        for temp in self.temperatures:
            for mech in MECHANISMS:
                out.append((mech, "bell_analytic", temp,
                            self.bell_analytic[(mech, temp)], True))
        return out


def analytic_infidelity(mechanism: str, config: SystemConfig, tbar_r: float,
                        t_rr: float, temperature: float) -> float:
    if mechanism == "decay":
        return analytic_decay_infidelity(tbar_r, config.gamma)
    if mechanism == "recoil":
        return analytic_recoil_infidelity(config, tbar_r, temperature)
    if mechanism == "vdw":
        return analytic_vdw_infidelity(config, t_rr, temperature)
    raise ValueError(f"unknown mechanism {mechanism!r}")


def full_budget(config: SystemConfig, pulse: PulseShape,
                temperatures=(0.0, 1.5e-6),
                fock_dim: int = DEFAULT_FOCK_DIM,
                tolerance: float = 1e-9,
                include_full_simulation: bool = True,
                convergence_probe: bool = True) -> ErrorBudget:
    """Assemble the gate error budget: per-mechanism numeric infidelities
    (Bell and average) at each temperature, the matching analytic estimates,
    their sum, and the all-mechanism simulation at zero temperature."""
    ideal = characterize_gate(pulse, build_space(),
                              replace(config.couplings(), gamma=0.0),
                              tolerance=1e-10)
    tbar_s = config.seconds(ideal.tbar_r)
    trr_s = config.seconds(ideal.t_rr)

    budget = ErrorBudget(temperatures=tuple(temperatures), tbar_r=tbar_s,
                         t_rr=trr_s)
    for temp in temperatures:
        for mech in MECHANISMS:
            res = mechanism_simulation(mech, config, pulse, temperature=temp,
                                       fock_dim=fock_dim, tolerance=tolerance,
                                       convergence_probe=convergence_probe)
            budget.bell_numeric[(mech, temp)] = res.bell_infidelity
            budget.avg_numeric[(mech, temp)] = res.avg_infidelity
            budget.converged[(mech, temp)] = res.converged
            budget.bell_analytic[(mech, temp)] = analytic_infidelity(
                mech, config, tbar_s, trr_s, temp)
    if include_full_simulation:
        res = full_simulation(config, pulse, tolerance=tolerance)
        budget.bell_full = res.bell_infidelity
        budget.avg_full = res.avg_infidelity
    return budget


# ---------------------------------------------------------------------------
# Mechanism sweeps (analytic-versus-numeric agreement curves)


def decay_sweep(config: SystemConfig, pulse: PulseShape, gammas,
                tolerance: float = 1e-9):
    """Decay-only infidelity versus decay rate (1/s); rows
    (gamma, temperature, numeric, analytic, converged)."""
    ideal = characterize_gate(pulse, build_space(),
                              replace(config.couplings(), gamma=0.0),
                              tolerance=1e-10)
    tbar_s = config.seconds(ideal.tbar_r)
    rows = []
    for gamma in gammas:
        if gamma == 0.0:
            rows.append((gamma, 0.0, 0.0, 0.0, True))
            continue
        cfg = replace(config, rydberg_lifetime=1.0 / gamma)
        res = mechanism_simulation("decay", cfg, pulse, tolerance=tolerance,
                                   metrics="bell")
        rows.append((gamma, 0.0, res.bell_infidelity,
                     analytic_decay_infidelity(tbar_s, gamma), True))
    return rows


def trap_sweep(mechanism: str, config: SystemConfig, pulse: PulseShape,
               trap_over_2pi_grid, temperatures=(0.0,),
               fock_dim: int = DEFAULT_FOCK_DIM, tolerance: float = 1e-9):
    """Recoil or interaction-force infidelity versus trap frequency; rows
    (trap frequency Hz, temperature, numeric, analytic, converged).
    Unconverged points carry a None numeric value."""
    if mechanism not in ("recoil", "vdw"):
        raise ValueError("trap sweep applies to the recoil and vdw mechanisms")
    field_name = "trap_z_over_2pi" if mechanism == "recoil" else "trap_x_over_2pi"
    ideal = characterize_gate(pulse, build_space(),
                              replace(config.couplings(), gamma=0.0),
                              tolerance=1e-10)
    tbar_s = config.seconds(ideal.tbar_r)
    trr_s = config.seconds(ideal.t_rr)
    rows = []
    for trap in trap_over_2pi_grid:
        cfg = replace(config, **{field_name: float(trap)})
        for temp in temperatures:
            res = mechanism_simulation(mechanism, cfg, pulse, temperature=temp,
                                       fock_dim=fock_dim, tolerance=tolerance,
                                       metrics="bell")
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                ana = analytic_infidelity(mechanism, cfg, tbar_s, trr_s, temp)
            rows.append((float(trap), temp, res.bell_infidelity, ana,
                         res.converged))
    return rows
