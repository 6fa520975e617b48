"""Exception types shared across the package."""


class UniqptError(Exception):
    """Base class for all package-specific errors."""


class InvalidDimensionError(UniqptError, ValueError):
    """Hilbert-space dimension outside the supported range."""


class UnsupportedDimensionError(UniqptError, ValueError):
    """Construction only defined for a restricted set of dimensions (e.g. primes)."""


class DimensionMismatchError(UniqptError, ValueError):
    """Operands live on incompatible spaces."""


class InvalidArgumentError(UniqptError, ValueError):
    """Argument violates a documented precondition."""


class NotCPMapError(UniqptError, ValueError):
    """Matrix has a negative eigenvalue beyond tolerance; no Kraus form exists."""


class InfeasibleParametersError(UniqptError, ValueError):
    """POVM parameters leave the complement effect indefinite."""


class DegenerateSpectrumError(UniqptError, ValueError):
    """Eigenvalue spacing too small to match eigenvectors to a declared spectrum."""


class NotUnitaryDataError(UniqptError, ValueError):
    """Measurement data is inconsistent with any unitary map."""


class FailureSetError(UniqptError, ValueError):
    """Reconstruction hit the documented measure-zero failure set (vanishing
    reference amplitude)."""


class InconsistentInputsError(UniqptError, ValueError):
    """Numerically inconsistent inputs (e.g. large imaginary residuals)."""


class InconsistentBasisError(UniqptError, ValueError):
    """Constraint system for a basis is singular or contradictory."""


class UnreachableBandError(UniqptError, ValueError):
    """Requested fidelity band cannot be met by the error model."""
