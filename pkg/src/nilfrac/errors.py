"""Exception hierarchy shared by all modules."""


class NilfracError(Exception):
    """Base class for all package errors."""


class InputError(NilfracError, ValueError):
    """Malformed or out-of-contract input."""


class ModeMismatchError(InputError):
    """Exact and float polynomials were mixed."""


class TruncationError(NilfracError):
    """A requested order goes beyond what the truncated data determines."""


class NotNilpotentError(InputError):
    """Linear part at the origin is not of the nilpotent shape (y, 0)."""


class UndecidableJetError(NilfracError):
    """The relevant jet vanishes identically at the available order."""


class MonodromicInputError(InputError):
    """No real separatrix exists; the singularity is a center or focus."""


class NonTriangularError(NilfracError):
    """The coefficient recursion cannot be solved at some order."""

    def __init__(self, index: int, exponent):
        self.index = index
        self.exponent = exponent
        super().__init__(f"non-triangular system at order {index} (exponent {exponent})")


class IntegrationError(NilfracError):
    """Step size underflow or escape from the integration domain."""


class EstimatorError(NilfracError):
    """Not enough data or scale range for a dimension fit."""
