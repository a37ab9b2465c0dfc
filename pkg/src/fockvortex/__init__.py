"""fockvortex: two-mode Fock-space engine for beam-splitter vortex states.

Builds truncated photon-number two-mode squeezed states, interferes them
on a balanced beam splitter (exact Fock-basis unitary plus an
independently derived closed form used as a cross-check oracle), and
quantifies the output: transverse quadrature fields with phase-winding
detection, Wigner functions with negativity volume, and logarithmic
negativity across the splitter.
"""
from .beamsplitter import (
    apply_beam_splitter,
    closed_form_deviation,
    closed_form_vortex_state,
    inject_fault,
    marginal_variance,
    photon_number_marginal,
)
from .config import GH_ORDER, TOL, Tolerances
from .entanglement import (
    EntanglementReport,
    PartialTranspose,
    entanglement_ratio,
    log_negativity,
    partial_transpose,
)
from .errors import (
    CoefficientMismatchError,
    EigensolverError,
    FockVortexError,
    GridTooCoarseError,
    InvalidParameterError,
    InvalidStateError,
    InvariantError,
    NonConvergenceError,
    UndefinedRatioError,
)
from .quadrature import (
    QuadratureField,
    QuadratureGrid,
    VortexReport,
    count_vortices,
    evaluate_field,
    hermite_basis,
    hermite_function,
)
from .states import (
    DensityMatrix,
    FockPair,
    SqueezeParams,
    TwoModeState,
    make_tmss,
    random_state,
    state_to_density,
    total_photon_distribution,
)
from .wigner import (
    NegativityResult,
    PhasePoint,
    WignerGrid,
    WignerRule,
    WignerSlice,
    build_wigner_grid,
    negativity_volume,
    diagonal_form_deviation,
    position_marginal,
    wigner_fock_cross,
    wigner_fock_diagonal,
    wigner_diagonal_form,
    wigner_slice,
    wigner_state,
)

__version__ = "0.1.0"

__all__ = [
    "FockPair",
    "SqueezeParams",
    "TwoModeState",
    "DensityMatrix",
    "make_tmss",
    "state_to_density",
    "total_photon_distribution",
    "random_state",
    "apply_beam_splitter",
    "closed_form_vortex_state",
    "closed_form_deviation",
    "photon_number_marginal",
    "marginal_variance",
    "inject_fault",
    "hermite_function",
    "hermite_basis",
    "QuadratureGrid",
    "QuadratureField",
    "evaluate_field",
    "VortexReport",
    "count_vortices",
    "PhasePoint",
    "wigner_fock_diagonal",
    "wigner_fock_cross",
    "wigner_state",
    "wigner_diagonal_form",
    "diagonal_form_deviation",
    "position_marginal",
    "WignerRule",
    "WignerGrid",
    "WignerSlice",
    "build_wigner_grid",
    "NegativityResult",
    "negativity_volume",
    "wigner_slice",
    "PartialTranspose",
    "EntanglementReport",
    "partial_transpose",
    "log_negativity",
    "entanglement_ratio",
    "Tolerances",
    "TOL",
    "GH_ORDER",
    "FockVortexError",
    "InvalidParameterError",
    "InvalidStateError",
    "NonConvergenceError",
    "EigensolverError",
    "GridTooCoarseError",
    "InvariantError",
    "CoefficientMismatchError",
    "UndefinedRatioError",
]
