"""Effective Hamiltonian assembly for the driven two-atom system.

Everything here is dimensionless: hbar = 1 and energies are in units of the
peak Rabi frequency Omega0, times in 1/Omega0. The model is

    H(t) = Omega(t) * H_rabi + Delta(t) * H_det + H_static,

with H_rabi = (1/2) sum_i (sigma+_i D_i + D_i^dag sigma-_i) (D_i the photon
recoil displacement along z when enabled, identity otherwise),
H_det = -sum_i n_i, and H_static collecting the Rydberg-Rydberg interaction,
harmonic trap terms, the position dependence of the interaction, and the
anti-Hermitian decay term -i gamma/2 sum_i n_i.

Model flags select the corrections: any subset of
{"recoil", "trap", "vdw_position_dependence", "decay"}; flags that need
motional ladders reject a space without them.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from .pulses import PulseShape
from .spaces import HilbertSpace, OperatorSet, displacement_matrix, operators

VALID_FLAGS = frozenset({"recoil", "trap", "vdw_position_dependence", "decay"})

# Dense matrices are faster than CSR below this dimension.
_DENSE_CUTOFF = 128


@dataclass(frozen=True)
class Couplings:
    """Dimensionless couplings of the two-atom model.

    Parameters
    ----------
    v : float
        Rydberg-Rydberg interaction V / (hbar Omega0) at the trap centers.
    gamma : float
        Rydberg decay rate / Omega0.
    omega_x, omega_y, omega_z : float
        Trap frequencies / Omega0 (0 if the axis carries no ladder).
    eta_z : float
        Lamb-Dicke factor of the drive photon recoil along z,
        k * sqrt(hbar / (2 m omega_z)).
    xzpf_over_r : float
        Zero-point length along x over the interatomic distance,
        sqrt(hbar / (2 m omega_x)) / R; controls the position dependence
        of the interaction.
    """

    v: float
    gamma: float = 0.0
    omega_x: float = 0.0
    omega_y: float = 0.0
    omega_z: float = 0.0
    eta_z: float = 0.0
    xzpf_over_r: float = 0.0

    def trap_omega(self, axis: str) -> float:
        return {"x": self.omega_x, "y": self.omega_y, "z": self.omega_z}[axis]


def vdw_taylor_coefficients(order: int) -> list[float]:
    """Coefficients c_k of (1 + u)^-6 = 1 + sum_k c_k u^k, k = 1..order."""
    return [(-1) ** k * math.comb(k + 5, 5) for k in range(1, order + 1)]


@dataclass
class EffectiveHamiltonian:
    """Assembled H(t) = static + Omega(t) * rabi + Delta(t) * det_coupling."""

    space: HilbertSpace
    couplings: Couplings
    pulse: PulseShape
    flags: frozenset
    static: object
    rabi: object
    det_coupling: object
    ops: OperatorSet = field(repr=False, default=None)

    def __call__(self, t: float):
        """Full matrix at time t (dense or sparse, matching the parts)."""
        return self.static + self.pulse.omega(t) * self.rabi \
            + self.pulse.delta(t) * self.det_coupling

    def phase_jump_diagonal(self, theta: float) -> np.ndarray:
        """Diagonal of the instantaneous laser-phase jump: exp(i theta) per
        atom in |r> (doubly excited states get exp(2 i theta))."""
        return np.exp(1j * theta * self.space.rydberg_counts())


def assemble_hamiltonian(space: HilbertSpace, couplings: Couplings,
                         pulse: PulseShape, flags=(),
                         vdw_taylor_order: int = 2,
                         n_pad: int = 8) -> EffectiveHamiltonian:
    """Assemble the effective Hamiltonian for a space, couplings and pulse.

    With no flags this reproduces the idealized three-level model exactly;
    the flags add photon recoil, trap energies, the position dependence of
    the interaction (as a Taylor series in (x1 - x2)/R of the given order),
    and non-Hermitian decay.

    Raises
    ------
    ValueError
        On unknown flags or a flag/space mismatch (e.g. recoil without a
        z ladder on each atom).
    """
    flags = frozenset(flags)
    unknown = flags - VALID_FLAGS
    if unknown:
        raise ValueError(f"unknown model flags: {sorted(unknown)}")

    ops = operators(space)
    dim = space.total_dim
    ident = sparse.identity(dim, format="csr", dtype=np.complex128)

    # Drive: (1/2) sum_i sigma+_i D_i + h.c.
    couplers = []
    for atom in (0, 1):
        disp = ident
        if "recoil" in flags:
            ax = space.find_axis(atom, "z")
            if ax is None:
                raise ValueError(f"recoil flag requires a z ladder on atom {atom}")
            if couplings.omega_z <= 0:
                raise ValueError("recoil flag requires omega_z > 0 in couplings")
            disp = ops.displacement(atom, "z", couplings.eta_z, n_pad=n_pad)
        couplers.append(ops.sigma_plus[atom] @ disp)
    raised = couplers[0] + couplers[1]
    rabi = 0.5 * (raised + raised.conj().T)

    det = -(ops.number[0] + ops.number[1])

    # Static part: interaction, trap, interaction position dependence, decay.
    p_rr = (ops.number[0] @ ops.number[1]).tocsr()
    static = couplings.v * p_rr

    if "trap" in flags:
        if not space.motional_axes:
            raise ValueError("trap flag requires at least one motional ladder")
        for ax in space.motional_axes:
            omega = couplings.trap_omega(ax.axis)
            if omega <= 0:
                raise ValueError(f"trap flag requires omega_{ax.axis} > 0 in couplings")
            static = static + omega * ops.fock_number[(ax.atom, ax.axis)]

    if "vdw_position_dependence" in flags:
        for atom in (0, 1):
            if space.find_axis(atom, "x") is None:
                raise ValueError(
                    f"vdw_position_dependence flag requires an x ladder on atom {atom}")
        if vdw_taylor_order < 1:
            raise ValueError("vdw_taylor_order must be >= 1")
        u = couplings.xzpf_over_r * (ops.position(0, "x") - ops.position(1, "x"))
        u_pow = ident
        correction = sparse.csr_matrix((dim, dim), dtype=np.complex128)
        for c_k in vdw_taylor_coefficients(vdw_taylor_order):
            u_pow = (u_pow @ u).tocsr()
            correction = correction + c_k * u_pow
        static = static + couplings.v * (correction @ p_rr)

    if "decay" in flags:
        static = static - 0.5j * couplings.gamma * (ops.number[0] + ops.number[1])

    if dim <= _DENSE_CUTOFF:
        static, rabi, det = (np.asarray(m.todense()) for m in (static, rabi, det))
    else:
        static, rabi, det = (m.tocsr() for m in (static, rabi, det))

    return EffectiveHamiltonian(
        space=space, couplings=couplings, pulse=pulse, flags=flags,
        static=static, rabi=rabi, det_coupling=det, ops=ops,
    )
