"""Gate-level quantities extracted from propagations: Rydberg-time
integrals, acquired phases, the phase-gate condition, Bell-state fidelity
and average gate fidelity.

Fidelities follow the lost-norm convention: population removed by decay or
left outside the computational basis counts fully as infidelity (no
renormalization of the reduced state).
"""

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import simpson

from .dynamics import Trajectory, integrate, propagate_columns
from .hamiltonian import Couplings, EffectiveHamiltonian, assemble_hamiltonian
from .pulses import PulseShape
from .spaces import HilbertSpace

COMPUTATIONAL = ("00", "01", "10", "11")

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
_BELL = np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0)

_MIN_PHASE_AMPLITUDE = 1e-6


class PhaseUndefinedError(ValueError):
    """Return amplitude too small to carry a meaningful phase."""


class RydbergTimes(NamedTuple):
    t_r: float
    t_rr: float
    quad_rel_error: float


@dataclass
class GateResult:
    """Per-initial-state gate characterization (dimensionless times)."""

    amplitudes: dict
    phi_01: float
    phi_10: float
    phi_11: float
    t_r: dict
    tbar_r: float
    t_rr: float
    norm: dict
    leakage: dict
    quad_rel_error: float

    @property
    def phase_defect(self) -> float:
        """phi_11 - phi_01 - phi_10 - pi, wrapped to (-pi, pi]; zero when
        the controlled-phase condition holds."""
        return wrap_angle(self.phi_11 - self.phi_01 - self.phi_10 - math.pi)


@dataclass
class FidelityReport:
    temperature: float = 0.0
    mechanism: str = ""
    bell_fidelity: float | None = None
    avg_gate_fidelity: float | None = None
    converged: bool = True
    weight_tail: float = 0.0


def wrap_angle(x: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    return float(-((-x + math.pi) % (2.0 * math.pi) - math.pi))


# ---------------------------------------------------------------------------
# Rydberg-time quadrature


def rydberg_times(traj: Trajectory) -> RydbergTimes:
    """Quadrature of <n_1 + n_2> and <n_1 n_2> over the recorded grid.

    The relative quadrature error is estimated by re-integrating on every
    second grid point (grid halving); it must stay below 1e-4 for the
    default 2000-interval grid.
    """
    total = traj.ryd_population.sum(axis=1)
    t = traj.times
    t_r = float(simpson(total, x=t))
    t_rr = float(simpson(traj.double_ryd, x=t))
    t_r_half = float(simpson(total[::2], x=t[::2]))
    scale = max(abs(t_r), 1e-12)
    return RydbergTimes(t_r, t_rr, abs(t_r - t_r_half) / scale)


def perturbative_trr(t_r_11: float, v_over_omega0: float) -> float:
    """Second-order strong-blockade estimate of the doubly-excited time,
    (1 / (sqrt(2) V))^2 * T_r^11 in units where hbar Omega0 = 1."""
    if v_over_omega0 <= 5.0:
        raise ValueError("perturbative estimate requires V / (hbar Omega0) > 5")
    return t_r_11 / (2.0 * v_over_omega0 ** 2)


# ---------------------------------------------------------------------------
# Phases and leakage


def extract_phases(finals: dict, references: dict):
    """Phases and leakage of the returning computational amplitudes.

    ``finals[alpha]`` is the propagated state for initial state alpha;
    ``references[alpha]`` the corresponding initial vector. Phases are
    measured relative to the '00' branch when present. Leakage is the
    population outside the returning state excluding norm lost to decay:
    1 - |<ref|psi>|^2 / ||psi||^2.

    Returns (phi_01, phi_10, phi_11, leakage, amplitudes).
    """
    amplitudes = {}
    leakage = {}
    for alpha, psi in finals.items():
        ovl = complex(np.vdot(references[alpha], psi))
        nrm = float(np.vdot(psi, psi).real)
        amplitudes[alpha] = ovl
        leakage[alpha] = 1.0 - abs(ovl) ** 2 / nrm
        if abs(ovl) < _MIN_PHASE_AMPLITUDE:
            raise PhaseUndefinedError(
                f"return amplitude for |{alpha}> is {abs(ovl):.2e}; phase undefined")
    ref_phase = np.angle(amplitudes["00"]) if "00" in amplitudes else 0.0
    phi = {a: float(np.angle(amplitudes[a]) - ref_phase) for a in amplitudes}
    return phi.get("01", 0.0), phi.get("10", 0.0), phi.get("11", 0.0), leakage, amplitudes


def characterize_gate(pulse: PulseShape, space: HilbertSpace, couplings: Couplings,
                      flags=(), tolerance: float = 1e-10,
                      grid_points: int = 2000,
                      vdw_taylor_order: int = 2) -> GateResult:
    """Propagate the four computational basis states (motional ground state)
    and collect phases, Rydberg times and leakage."""
    ham = assemble_hamiltonian(space, couplings, pulse, flags,
                               vdw_taylor_order=vdw_taylor_order)
    finals, refs, t_r, norms = {}, {}, {}, {}
    t_rr = 0.0
    quad_err = 0.0
    for alpha in COMPUTATIONAL:
        psi0 = space.basis_state(alpha)
        traj = integrate(ham, psi0, tolerance=tolerance, grid_points=grid_points,
                         store_states=False)
        times = rydberg_times(traj)
        t_r[alpha] = times.t_r
        quad_err = max(quad_err, times.quad_rel_error)
        if alpha == "11":
            t_rr = times.t_rr
        finals[alpha] = traj.final_state
        refs[alpha] = psi0
        norms[alpha] = float(traj.norm[-1])
    phi01, phi10, phi11, leakage, amplitudes = extract_phases(finals, refs)
    return GateResult(
        amplitudes=amplitudes, phi_01=phi01, phi_10=phi10, phi_11=phi11,
        t_r=t_r, tbar_r=(t_r["01"] + t_r["10"] + t_r["11"]) / 3.0,
        t_rr=t_rr, norm=norms, leakage=leakage, quad_rel_error=quad_err,
    )


# ---------------------------------------------------------------------------
# Bell-state and average gate fidelity


def ideal_cz_target(phi_01: float, phi_10: float) -> np.ndarray:
    """Ideal controlled-phase unitary on the computational basis, with the
    single-qubit phases of the realized gate absorbed."""
    return np.diag(np.exp(1j * np.array([
        0.0, phi_01, phi_10, phi_01 + phi_10 + math.pi])))


def bell_correction_unitary(phi_01: float, phi_10: float) -> np.ndarray:
    """Perfect single-qubit post-gate circuit: undo the |1> phases on each
    qubit, then a Hadamard on the second qubit. Maps an ideal
    phase-corrected controlled-phase output of |++> to the Bell state."""
    phases = np.diag(np.exp(-1j * np.array([
        0.0, phi_01, phi_10, phi_01 + phi_10])))
    h2 = np.kron(np.eye(2), _HADAMARD)
    return h2 @ phases


def _computational_block(psi: np.ndarray, space: HilbertSpace) -> np.ndarray:
    """(4, n_motional) block of a joint state on the computational subspace."""
    c = psi.reshape(3, 3, -1)[:2, :2, :]
    return c.reshape(4, -1)


def bell_overlap(psi_final: np.ndarray, phi_01: float, phi_10: float,
                 space: HilbertSpace) -> float:
    """<B| rho_reduced |B> for one propagated |++> (x) |fock> branch: apply
    the perfect correction circuit, trace out the traps, project on the
    Bell state. Lost norm counts as infidelity."""
    block = _computational_block(psi_final, space)
    corrected = bell_correction_unitary(phi_01, phi_10) @ block
    amp = _BELL.conj() @ corrected
    return float(np.sum(np.abs(amp) ** 2))


def _plus_plus_state(space: HilbertSpace, fock: tuple) -> np.ndarray:
    """|++> (x) |fock>: the perfect pre-gate preparation applied to |00>."""
    psi = np.zeros(space.total_dim, dtype=np.complex128)
    for a in ("00", "01", "10", "11"):
        psi += 0.5 * space.basis_state(a, fock)
    return psi


def thermal_fock_weights(space: HilbertSpace, q_by_axis: dict, tail: float = 1e-6):
    """Boltzmann-weighted motional Fock products, heaviest first, truncated
    once the cumulative weight exceeds 1 - tail.

    ``q_by_axis[(atom, axis)]`` is exp(-hbar omega / k_B T) for that ladder.
    Returns (list of (weight, fock_tuple), missing_weight); if the ladders
    are too short to reach the requested cumulative weight the sum is
    reported as unconverged via missing_weight > tail.
    """
    per_axis = []
    for ax in space.motional_axes:
        q = float(q_by_axis.get((ax.atom, ax.axis), 0.0))
        if q == 0.0:
            w = np.zeros(ax.fock_dim)
            w[0] = 1.0
        else:
            w = (1.0 - q) * q ** np.arange(ax.fock_dim)
        per_axis.append(w)
    if not per_axis:
        return [(1.0, ())], 0.0
    combos = []
    for occ in itertools.product(*(range(len(w)) for w in per_axis)):
        weight = float(np.prod([w[n] for w, n in zip(per_axis, occ)]))
        combos.append((weight, occ))
    combos.sort(key=lambda t: -t[0])
    kept = []
    cum = 0.0
    for weight, occ in combos:
        kept.append((weight, occ))
        cum += weight
        if cum >= 1.0 - tail:
            break
    return kept, 1.0 - cum


def _resolve_couplings(config) -> Couplings:
    return config.couplings() if hasattr(config, "couplings") else config


def _resolve_thermal(config, space, temperature, tail):
    if temperature < 0:
        raise ValueError("temperature must be >= 0")
    if temperature == 0 or not space.motional_axes:
        q = {}
    elif hasattr(config, "boltzmann_q"):
        q = {(ax.atom, ax.axis): config.boltzmann_q(ax.axis, temperature)
             for ax in space.motional_axes}
    else:
        raise ValueError("temperature > 0 requires a physical system config")
    return thermal_fock_weights(space, q, tail)


def gate_phases(pulse: PulseShape, space: HilbertSpace, config, flags=(),
                tolerance: float = 1e-10, vdw_taylor_order: int = 2):
    """(phi_01, phi_10) of the realized gate, from ground-motional-state
    propagations of |00>, |01>, |10|."""
    couplings = _resolve_couplings(config)
    ham = assemble_hamiltonian(space, couplings, pulse, flags,
                               vdw_taylor_order=vdw_taylor_order)
    refs = np.stack([space.basis_state(a) for a in ("00", "01", "10")], axis=1)
    finals = propagate_columns(ham, refs, tolerance=tolerance)
    ovl = np.sum(refs.conj() * finals, axis=0)
    if np.min(np.abs(ovl)) < _MIN_PHASE_AMPLITUDE:
        raise PhaseUndefinedError("return amplitude too small; phase undefined")
    ref_phase = np.angle(ovl[0])
    return (float(np.angle(ovl[1]) - ref_phase), float(np.angle(ovl[2]) - ref_phase))


def bell_fidelity(pulse: PulseShape, space: HilbertSpace, config,
                  temperature: float = 0.0, flags=(), tolerance: float = 1e-10,
                  phases=None, weight_tail: float = 1e-6,
                  vdw_taylor_order: int = 2, mechanism: str = "") -> FidelityReport:
    """Bell-state preparation fidelity of the gate.

    Prepares |00> (x) |phi> (a thermal Fock mixture at temperature > 0),
    applies the perfect pre-gate single-qubit circuit, propagates the full
    non-Hermitian model, applies the perfect phase-correction circuit,
    traces out the traps and projects on (|00> + |11>)/sqrt(2).
    """
    couplings = _resolve_couplings(config)
    ham = assemble_hamiltonian(space, couplings, pulse, flags,
                               vdw_taylor_order=vdw_taylor_order)
    if phases is None:
        phases = gate_phases(pulse, space, config, flags, tolerance,
                             vdw_taylor_order)
    phi01, phi10 = phases
    weights, missing = _resolve_thermal(config, space, temperature, weight_tail)

    cols = np.stack([_plus_plus_state(space, occ) for _, occ in weights], axis=1)
    finals = propagate_columns(ham, cols, tolerance=tolerance)
    fid = 0.0
    for k, (w, _) in enumerate(weights):
        fid += w * bell_overlap(finals[:, k], phi01, phi10, space)
    return FidelityReport(
        temperature=temperature, mechanism=mechanism, bell_fidelity=fid,
        converged=missing <= weight_tail, weight_tail=missing,
    )


# -- process-map reconstruction (average gate fidelity) ----------------------


def _operator_basis_states():
    """16 pure computational states whose density matrices span the operator
    basis: the 4 basis states plus (|i>+|j>)/sqrt(2) and (|i>+i|j>)/sqrt(2)
    per pair."""
    states = [np.eye(4, dtype=np.complex128)[k] for k in range(4)]
    pair_index = {}
    for i, j in itertools.combinations(range(4), 2):
        x = np.zeros(4, dtype=np.complex128)
        x[i] = x[j] = 1.0 / math.sqrt(2.0)
        y = np.zeros(4, dtype=np.complex128)
        y[i], y[j] = 1.0 / math.sqrt(2.0), 1j / math.sqrt(2.0)
        pair_index[(i, j)] = (len(states), len(states) + 1)
        states.append(x)
        states.append(y)
    return states, pair_index


def process_map(pulse: PulseShape, space: HilbertSpace, config,
                temperature: float = 0.0, flags=(), tolerance: float = 1e-10,
                phases=None, weight_tail: float = 1e-6,
                vdw_taylor_order: int = 2, max_columns: int = 256):
    """Reconstruct the linear map E on the 4-dim computational space by
    propagating the 16 operator-basis input states (per thermal branch) and
    tracing out the traps.

    Returns (e_map, phases, converged, missing_weight) with
    ``e_map[(i, j)]`` the 4x4 matrix E(|i><j|). The map is kept
    unnormalized: decay makes it trace-decreasing.
    """
    couplings = _resolve_couplings(config)
    ham = assemble_hamiltonian(space, couplings, pulse, flags,
                               vdw_taylor_order=vdw_taylor_order)
    if phases is None:
        phases = gate_phases(pulse, space, config, flags, tolerance,
                             vdw_taylor_order)
    weights, missing = _resolve_thermal(config, space, temperature, weight_tail)
    states, pair_index = _operator_basis_states()

    def embed(comp_state, occ):
        psi = np.zeros(space.total_dim, dtype=np.complex128)
        for k, a in enumerate(COMPUTATIONAL):
            if comp_state[k] != 0.0:
                psi += comp_state[k] * space.basis_state(a, occ)
        return psi

    jobs = [(w, embed(s, occ)) for w, occ in weights for s in states]
    rho_out = [np.zeros((4, 4), dtype=np.complex128) for _ in states]
    for start in range(0, len(jobs), max_columns):
        chunk = jobs[start:start + max_columns]
        cols = np.stack([psi for _, psi in chunk], axis=1)
        finals = propagate_columns(ham, cols, tolerance=tolerance)
        for k, (w, _) in enumerate(chunk):
            block = _computational_block(finals[:, k], space)
            rho_out[(start + k) % len(states)] += w * (block @ block.conj().T)

    e_map = {}
    for i in range(4):
        e_map[(i, i)] = rho_out[i]
    for (i, j), (kx, ky) in pair_index.items():
        eij = rho_out[kx] + 1j * rho_out[ky] \
            - 0.5 * (1.0 + 1j) * (rho_out[i] + rho_out[j])
        e_map[(i, j)] = eij
        e_map[(j, i)] = eij.conj().T
    return e_map, phases, missing <= weight_tail, missing


def bell_fidelity_from_map(e_map: dict, phases) -> float:
    """Bell fidelity implied by a reconstructed process map (linearity)."""
    rho = sum(e_map[(i, j)] for i in range(4) for j in range(4)) / 4.0
    u1 = bell_correction_unitary(*phases)
    return float(np.real(_BELL.conj() @ (u1 @ rho @ u1.conj().T) @ _BELL))


def avg_fidelity_from_map(e_map: dict, phases) -> float:
    """Average gate fidelity over Haar-random inputs, via the entanglement
    fidelity of the (unnormalized) map: F_avg = (d F_e + 1) / (d + 1)."""
    target = ideal_cz_target(*phases)
    f_e = 0.0
    for i in range(4):
        for j in range(4):
            f_e += np.real(target[:, i].conj() @ e_map[(i, j)] @ target[:, j])
    f_e /= 16.0
    return (4.0 * f_e + 1.0) / 5.0


def avg_gate_fidelity(pulse: PulseShape, space: HilbertSpace, config,
                      temperature: float = 0.0, flags=(), tolerance: float = 1e-10,
                      phases=None, weight_tail: float = 1e-6,
                      vdw_taylor_order: int = 2, mechanism: str = "") -> FidelityReport:
    """Average gate fidelity of the realized gate against the ideal
    controlled-phase with single-qubit phase corrections (d = 4)."""
    e_map, phases, converged, missing = process_map(
        pulse, space, config, temperature, flags, tolerance, phases,
        weight_tail, vdw_taylor_order)
    return FidelityReport(
        temperature=temperature, mechanism=mechanism,
        avg_gate_fidelity=avg_fidelity_from_map(e_map, phases),
        bell_fidelity=bell_fidelity_from_map(e_map, phases),
        converged=converged, weight_tail=missing,
    )
