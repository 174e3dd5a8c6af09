"""Simulator, pulse optimizer and error-budget engine for the symmetric
two-atom Rydberg controlled-phase gate."""

__version__ = "0.1.0"

from .hamiltonian import Couplings, assemble_hamiltonian
from .pulses import Family, PulseShape
from .spaces import HilbertSpace, MotionalAxis, build_space

__all__ = [
    "Couplings",
    "Family",
    "HilbertSpace",
    "MotionalAxis",
    "PulseShape",
    "assemble_hamiltonian",
    "build_space",
    "__version__",
]
