"""Shared numerical tolerances and engine defaults.

Every tolerance used by the library lives here so that property tests
have a single knob to turn.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    norm: float = 1e-12           # state normalization after construction
    hermiticity: float = 1e-12    # density-matrix Hermiticity residue
    trace: float = 1e-10          # density-matrix trace deviation
    purity: float = 1e-10         # tr(rho^2) deviation for pure states
    oracle: float = 1e-10         # closed form vs direct operator expansion
    imag_residue: float = 1e-10   # acceptable imaginary leakage in real quantities
    eig_zero: float = 1e-12       # eigenvalues in (-eig_zero, 0) count as zero
    nv: float = 1e-3              # negativity-volume convergence target
    amplitude_floor: float = 1e-12  # below this, arg(psi) is numerical noise


TOL = Tolerances()

# default field grid: covers the Gaussian envelope of states with <= 16 photons
# per mode and resolves vortex cores
GRID_HALF_WIDTH = 6.0
GRID_POINTS = 301

# tensor Gauss-Hermite defaults for phase-space integration
GH_ORDER = 24
MAX_REFINEMENTS = 4

# uniform-box fallback: half-width scale vs photon cutoff
BOX_WIDTH_SCALE = 1.2
