"""Physical constants (CODATA 2018) used for unit conversions.

All simulation dynamics run in dimensionless units (hbar = 1, peak Rabi
frequency = 1); these constants live only at the physical boundary where
experiment parameters are converted in and out.
"""

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K
ATOMIC_MASS = 1.66053906660e-27  # kg

# Strontium-88 atomic mass (CODATA-consistent isotope mass).
SR88_MASS = 87.9056125 * ATOMIC_MASS  # kg
