"""Exception hierarchy shared across the package.

Usage errors (bad arguments, shape mismatches, malformed descriptors) are
plain ``ValueError``; everything below signals a *numerical* failure, i.e.
the inputs were well-formed but the computation hit a mathematical
obstruction.  The CLI maps ``NumericalFailure`` to exit code 2 and
``ValueError`` to exit code 1 so scripts can tell the two apart.
"""

__all__ = [
    "NumericalFailure",
    "SingularMatrix",
    "RankDeficient",
    "SpectralGapViolation",
    "DegenerateDuality",
    "DomainViolation",
    "InitNotInRange",
    "RankCollapse",
    "NonFiniteState",
]


class NumericalFailure(Exception):
    """Base class for failures of the computation itself."""


class SingularMatrix(NumericalFailure):
    """A dense solve met a pivot below the singularity threshold."""


class RankDeficient(NumericalFailure):
    """Orthonormalization input does not have full column rank."""


class SpectralGapViolation(NumericalFailure):
    """An eigenvalue sits too close to the imaginary axis to be assigned
    to a stable/unstable half-plane."""


class DegenerateDuality(NumericalFailure):
    """Left and right subspace bases are (nearly) orthogonal, so the
    oblique projector they define is singular or ill-conditioned."""


class DomainViolation(NumericalFailure):
    """A projector family was evaluated at, or continued across, a point
    outside its declared analyticity domain."""


class InitNotInRange(NumericalFailure):
    """The starting basis does not lie in the range of the projector at
    the basepoint (strict initialization policy)."""


class RankCollapse(NumericalFailure):
    """A continued basis frame lost numerical rank mid-run, indicating a
    mesh too coarse or a contour passing near a singularity."""


class NonFiniteState(NumericalFailure):
    """An integrator state picked up NaN or Inf entries."""
