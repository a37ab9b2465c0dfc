"""Exception types, grouped by the CLI exit code they map to."""


class FockVortexError(Exception):
    """Base class for all library errors."""


# -- usage errors (exit code 2) -------------------------------------------

class InvalidParameterError(FockVortexError):
    """A user-supplied parameter violates its precondition."""


class InvalidStateError(FockVortexError):
    """A state or density matrix breaks a structural invariant."""


# -- numerical non-convergence (exit code 3) ------------------------------

class NonConvergenceError(FockVortexError):
    """An iterative numerical procedure exhausted its budget."""


class EigensolverError(NonConvergenceError):
    def __init__(self, dimension: int, residual: float):
        self.dimension = dimension
        self.residual = residual
        super().__init__(
            f"hermitian eigensolver failed to converge: "
            f"dimension={dimension}, residual={residual:.3e}"
        )


class GridTooCoarseError(NonConvergenceError):
    """A plaquette carries |winding| > 1: unresolved multi-charge cluster."""


# -- invariant failures (exit code 4) --------------------------------------

class InvariantError(FockVortexError):
    """A cross-checked mathematical invariant failed."""


class CoefficientMismatchError(InvariantError):
    """Closed-form state disagrees with the direct-unitary oracle.

    Signals a transcription error in the closed form, not a runtime fault.
    """

    def __init__(self, max_deviation: float, pair=None):
        self.max_deviation = max_deviation
        self.pair = pair
        where = f" at pair {pair}" if pair is not None else ""
        super().__init__(
            f"closed form deviates from operator-expansion oracle by "
            f"{max_deviation:.3e}{where}"
        )


class UndefinedRatioError(InvalidParameterError):
    """Entanglement ratio is undefined (both log-negativities vanish)."""
