"""Exception types raised across the package."""


class MagicLabError(Exception):
    """Base class for package errors."""


class SizeLimitError(MagicLabError, ValueError):
    """Requested system size exceeds a hard cap."""


class DimensionMismatchError(MagicLabError, ValueError):
    """Operands act on different numbers of qubits."""


class NotUnitaryError(MagicLabError, ValueError):
    """A custom gate failed the unitarity check."""


class ConsistencyError(MagicLabError, RuntimeError):
    """An internal invariant was violated (indicates a bug)."""


class SolverError(MagicLabError, RuntimeError):
    """The LP solver failed (infeasible, unbounded or iteration cap)."""


class ResourceError(MagicLabError, MemoryError):
    """A computation would exceed its memory budget."""

    def __init__(self, message: str, required_bytes: int):
        super().__init__(f"{message} (requires {required_bytes} bytes)")
        self.required_bytes = required_bytes


class TruncationError(MagicLabError, ValueError):
    """MPS compression could not reach the requested fidelity."""

    def __init__(self, achieved_fidelity: float, requested: float):
        super().__init__(
            f"truncation fidelity {achieved_fidelity:.12g} below requested {requested:.12g}"
        )
        self.achieved_fidelity = achieved_fidelity


class NumericalIntegrityError(MagicLabError, ArithmeticError):
    """A probability came out negative beyond rounding."""
