"""Exception hierarchy shared across the package.

Two families matter to callers:

* :class:`ConfigError` — the input description was malformed (CLI exit code 1).
* :class:`ComputationError` — the inputs were well-formed but the requested
  quantity does not exist or cannot be resolved at the stated tolerances
  (CLI exit code 2).
"""


class QfiError(Exception):
    """Base class for all package errors."""


class ConfigError(QfiError):
    """Malformed configuration or invalid run description."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ComputationError(QfiError):
    """A computation could not produce a trustworthy result."""


class DimensionMismatchError(ComputationError):
    """Operands live on spaces of different dimension."""


class NotHermitianError(ComputationError):
    """Matrix expected to be Hermitian is not (beyond tolerance)."""


class NotAntisymmetricError(ComputationError):
    """Matrix expected to be real antisymmetric is not (beyond tolerance)."""


class NotRealOperatorError(ComputationError):
    """Operator does not commute with the antiunitary involution."""


class NotParticleHoleSymmetricError(ComputationError):
    """Hamiltonian does not anticommute with the particle-hole involution."""


class GapClosedError(ComputationError):
    """An eigenvalue sits inside the forbidden window around zero."""

    def __init__(self, message, offending_value=None):
        super().__init__(message)
        self.offending_value = offending_value


class AmbiguousKernelError(ComputationError):
    """A singular value falls in the undecidable band (tol, 10*tol)."""


class NormConditionError(ComputationError):
    """||J0 - J1|| < 2 (or the graded analogue) is violated."""


class PfaffianConditioningError(ComputationError):
    """|Pf| is too small for its sign to be trusted."""


class UnresolvedDegeneracyError(ComputationError):
    """Path refinement hit the step floor without resolving a sign."""


class InvalidModuleError(ComputationError):
    """Clifford module fails its structural relations or bookkeeping."""
