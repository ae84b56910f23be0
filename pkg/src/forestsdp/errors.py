"""Exception taxonomy shared across the package.

Every error raised on a contract violation derives from ForestSdpError so
callers (and the CLI) can distinguish bad input (subclasses of InputError)
from numerical failures (subclasses of ComputationError).
"""


class ForestSdpError(Exception):
    """Base class for all package-specific errors."""


class InputError(ForestSdpError, ValueError):
    """Caller handed us something malformed."""


class DimensionMismatch(InputError):
    """Operands have incompatible shapes."""


class WrongShape(InputError):
    """A matrix is not square/symmetric where one was required."""


class WrongArity(InputError):
    """Wrong number of constraints for the requested operation."""


class ZeroVector(InputError):
    """A direction vector with zero norm was supplied."""


class CycleDetected(InputError):
    """An edge list expected to describe a forest closes a cycle."""


class NotAForest(InputError):
    """The aggregate sparsity graph contains a cycle."""


class ComputationError(ForestSdpError, RuntimeError):
    """A numerical routine could not complete."""


class NonConvergence(ComputationError):
    """Iteration budget exhausted before reaching tolerance."""


class SolverFailure(ComputationError):
    """The interior-point solver returned an unusable status."""


class DegenerateFirstCoordinate(ComputationError):
    """Dehomogenization hit a first coordinate too close to zero."""


class SubpencilSingular(ComputationError):
    """The tridiagonalization recursion met a singular trailing subpencil."""

    def __init__(self, step: int, pivot: float):
        super().__init__(
            f"trailing subpencil singular at elimination step {step} "
            f"(smallest pivot {pivot:.3e})"
        )
        self.step = step
        self.pivot = pivot


class IdenticallySingularPencil(ComputationError):
    """No sampled shift produced a nonsingular matrix pencil."""


class RecoveryFailed(ComputationError):
    """Rank-one recovery failed even through the perturbation schedule."""


class NoFeasiblePointFound(ComputationError):
    """The multistart search found no point satisfying the constraints."""
