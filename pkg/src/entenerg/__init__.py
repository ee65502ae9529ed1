"""Ground-state entanglement energetics of qubits and oscillators coupled to bosonic baths."""

from .errors import ConvergenceError, EntenergError, TruncationWarning, ValidationError

__version__ = "0.1.0"

__all__ = ["ConvergenceError", "EntenergError", "TruncationWarning", "ValidationError", "__version__"]
