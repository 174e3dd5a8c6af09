"""Hilbert-space construction for two driven three-level atoms with
optional truncated harmonic-oscillator ladders attached per atom and axis.

Basis ordering is (atom-0 internal, atom-1 internal, motional axes in
declared order); internal levels are 0, 1, r (index 2).
"""

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.linalg import expm

INTERNAL_LEVELS = 3
RYDBERG = 2  # internal index of |r>


@dataclass(frozen=True)
class MotionalAxis:
    """One truncated Fock ladder attached to a single atom along one axis."""

    atom: int
    axis: str
    fock_dim: int

    def __post_init__(self):
        if self.atom not in (0, 1):
            raise ValueError(f"atom must be 0 or 1, got {self.atom}")
        if self.axis not in ("x", "y", "z"):
            raise ValueError(f"axis must be x, y or z, got {self.axis!r}")
        if self.fock_dim < 1:
            raise ValueError(f"fock_dim must be >= 1, got {self.fock_dim}")


@dataclass(frozen=True)
class HilbertSpace:
    """Factorized basis descriptor: 2 atoms x 3 internal levels, plus
    one truncated Fock ladder per declared motional axis.

    The basis index <-> multi-index bijection is row-major over
    ``dims = (3, 3, *fock_dims)``.
    """

    motional_axes: tuple[MotionalAxis, ...] = ()
    n_atoms: int = field(default=2, init=False)
    internal_levels: int = field(default=INTERNAL_LEVELS, init=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return (INTERNAL_LEVELS, INTERNAL_LEVELS) + tuple(
            ax.fock_dim for ax in self.motional_axes
        )

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def index_of(self, multi: tuple[int, ...]) -> int:
        """Flat basis index of a multi-index (i0, i1, n_axis0, ...)."""
        return int(np.ravel_multi_index(multi, self.dims))

    def multi_of(self, index: int) -> tuple[int, ...]:
        """Inverse of :meth:`index_of`."""
        return tuple(int(k) for k in np.unravel_index(index, self.dims))

    def axes_for(self, atom: int, axis: str | None = None) -> list[int]:
        """Slot positions (offset by the 2 internal slots) of matching axes."""
        return [
            2 + k
            for k, ax in enumerate(self.motional_axes)
            if ax.atom == atom and (axis is None or ax.axis == axis)
        ]

    def find_axis(self, atom: int, axis: str) -> MotionalAxis | None:
        for ax in self.motional_axes:
            if ax.atom == atom and ax.axis == axis:
                return ax
        return None

    def rydberg_counts(self) -> np.ndarray:
        """Number of atoms in |r> for every basis state, shape (total_dim,)."""
        grids = np.indices(self.dims).reshape(len(self.dims), -1)
        return ((grids[0] == RYDBERG).astype(np.int64)
                + (grids[1] == RYDBERG).astype(np.int64))

    def basis_state(self, internal: str, fock: tuple[int, ...] | None = None) -> np.ndarray:
        """Unit vector for e.g. internal='01' (atom0 in |0>, atom1 in |1>)
        with motional occupations ``fock`` (default: all ground)."""
        codes = {"0": 0, "1": 1, "r": RYDBERG}
        if len(internal) != 2 or any(c not in codes for c in internal):
            raise ValueError(f"bad internal label {internal!r}")
        if fock is None:
            fock = (0,) * len(self.motional_axes)
        if len(fock) != len(self.motional_axes):
            raise ValueError("fock occupation tuple does not match motional axes")
        multi = (codes[internal[0]], codes[internal[1]]) + tuple(fock)
        psi = np.zeros(self.total_dim, dtype=np.complex128)
        psi[self.index_of(multi)] = 1.0
        return psi


def build_space(motional_axes=()) -> HilbertSpace:
    """Build a :class:`HilbertSpace`, rejecting duplicate (atom, axis) ladders.

    ``motional_axes`` may contain :class:`MotionalAxis` instances or
    (atom, axis, fock_dim) tuples.
    """
    axes = tuple(
        ax if isinstance(ax, MotionalAxis) else MotionalAxis(*ax)
        for ax in motional_axes
    )
    seen = set()
    for ax in axes:
        key = (ax.atom, ax.axis)
        if key in seen:
            raise ValueError(f"duplicate motional axis for atom {ax.atom} along {ax.axis}")
        seen.add(key)
    return HilbertSpace(motional_axes=axes)


# ---------------------------------------------------------------------------
# Operators


def _embed(space: HilbertSpace, slot: int, op) -> sparse.csr_matrix:
    """Kronecker-embed a single-slot operator into the full space."""
    dims = space.dims
    mat = sparse.identity(1, format="csr", dtype=np.complex128)
    for k, d in enumerate(dims):
        factor = sparse.csr_matrix(op, dtype=np.complex128) if k == slot else \
            sparse.identity(d, format="csr", dtype=np.complex128)
        mat = sparse.kron(mat, factor, format="csr")
    return mat


def ladder(fock_dim: int) -> np.ndarray:
    """Annihilation operator a in a truncated Fock basis."""
    return np.diag(np.sqrt(np.arange(1, fock_dim)), k=1).astype(np.complex128)


def displacement_matrix(eta: float, fock_dim: int, n_pad: int = 8) -> np.ndarray:
    """Displacement operator exp(i eta (a + a^dag)) in a truncated Fock basis.

    eta is the recoil kick in oscillator units, k * sqrt(hbar / 2 m omega).
    The exponential is evaluated on a ladder padded by ``n_pad`` extra levels
    and then cropped to ``fock_dim``, which controls truncation error of the
    matrix exponential (exp(ikz) is not band-limited in the Fock basis).
    The result is unitary up to the truncation leakage of the crop.
    """
    if fock_dim < 1:
        raise ValueError("fock_dim must be >= 1")
    dim = fock_dim + n_pad
    a = ladder(dim)
    d = expm(1j * eta * (a + a.conj().T))
    return np.ascontiguousarray(d[:fock_dim, :fock_dim])


@dataclass(frozen=True)
class OperatorSet:
    """Precomputed sparse operators on a :class:`HilbertSpace`.

    sigma^+_i = |r><1|_i raises atom i into the Rydberg state; number_i is
    the Rydberg projector. Ladder/position operators are per motional axis,
    in oscillator units (x = a + a^dag up to the zero-point length).
    """

    space: HilbertSpace
    sigma_plus: tuple[sparse.csr_matrix, sparse.csr_matrix]
    sigma_minus: tuple[sparse.csr_matrix, sparse.csr_matrix]
    number: tuple[sparse.csr_matrix, sparse.csr_matrix]
    number_diag: tuple[np.ndarray, np.ndarray]
    double_number_diag: np.ndarray
    lowering: dict  # (atom, axis) -> a
    fock_number: dict  # (atom, axis) -> a^dag a

    @property
    def identity(self) -> sparse.csr_matrix:
        return sparse.identity(self.space.total_dim, format="csr", dtype=np.complex128)

    def position(self, atom: int, axis: str) -> sparse.csr_matrix:
        """(a + a^dag) for one ladder; multiply by the zero-point length
        for a physical position."""
        a = self.lowering[(atom, axis)]
        return (a + a.conj().T).tocsr()

    def momentum(self, atom: int, axis: str) -> sparse.csr_matrix:
        """i (a^dag - a); multiply by hbar / (2 * zpf) for physical momentum."""
        a = self.lowering[(atom, axis)]
        return (1j * (a.conj().T - a)).tocsr()

    def displacement(self, atom: int, axis: str, eta: float, n_pad: int = 8) -> sparse.csr_matrix:
        """exp(i eta (a + a^dag)) embedded on the full space."""
        ax = self.space.find_axis(atom, axis)
        if ax is None:
            raise ValueError(f"no motional ladder for atom {atom} along {axis}")
        slot = self.space.axes_for(atom, axis)[0]
        return _embed(self.space, slot, displacement_matrix(eta, ax.fock_dim, n_pad))


def operators(space: HilbertSpace) -> OperatorSet:
    """Build the standard operator set for a space."""
    sp3 = np.zeros((3, 3), dtype=np.complex128)
    sp3[RYDBERG, 1] = 1.0  # |r><1|
    n3 = np.zeros((3, 3), dtype=np.complex128)
    n3[RYDBERG, RYDBERG] = 1.0

    sig_p = tuple(_embed(space, i, sp3) for i in (0, 1))
    sig_m = tuple(m.conj().T.tocsr() for m in sig_p)
    num = tuple(_embed(space, i, n3) for i in (0, 1))

    grids = np.indices(space.dims).reshape(len(space.dims), -1)
    n_diag = tuple((grids[i] == RYDBERG).astype(np.float64) for i in (0, 1))

    lowering = {}
    fock_number = {}
    for k, ax in enumerate(space.motional_axes):
        a = _embed(space, 2 + k, ladder(ax.fock_dim))
        lowering[(ax.atom, ax.axis)] = a
        fock_number[(ax.atom, ax.axis)] = (a.conj().T @ a).tocsr()

    return OperatorSet(
        space=space,
        sigma_plus=sig_p,
        sigma_minus=sig_m,
        number=num,
        number_diag=n_diag,
        double_number_diag=n_diag[0] * n_diag[1],
        lowering=lowering,
        fock_number=fock_number,
    )
