"""Exception types shared across the package."""


class CliffgradError(Exception):
    """Base class for all package-specific errors."""


class DimensionMismatchError(CliffgradError, ValueError):
    """Operands act on different numbers of qubits."""


class PauliFormatError(CliffgradError, ValueError):
    """Malformed textual Pauli string."""


class ObservableFormatError(CliffgradError, ValueError):
    """Malformed observable document."""


class CircuitFormatError(CliffgradError, ValueError):
    """Malformed or inconsistent ansatz document."""


class WireError(CliffgradError, ValueError):
    """Gate wire index out of range or duplicated."""


class ResourceCapError(CliffgradError, RuntimeError):
    """Requested dense simulation exceeds the configured qubit/memory cap."""


class SolveError(CliffgradError, RuntimeError):
    """Quadratic-model solve failed (non-finite inputs, eigensolver failure)."""
