"""Spectral projectors from half-plane splits of a matrix spectrum.

The eigenprojection onto the invariant subspace for the stable (or
unstable) eigenvalues of A is assembled from orthonormal right and left
bases as P = R (L* R)^{-1} L*.  The bases come from ordered complex Schur
decompositions of A and A*, which keeps the duality product L* R as well
conditioned as the problem permits.
"""

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateDuality, SingularMatrix, SpectralGapViolation
from .matrix_core import fro_norm, numerical_rank, solve

__all__ = [
    "SpectralHalf",
    "Projector",
    "spectral_split",
    "eigenprojection",
    "stable_projector",
    "GAP_TOL",
    "idem_tol",
]

GAP_TOL = 1e-8


class SpectralHalf(enum.Enum):
    """Which open half-plane of eigenvalues to select."""

    STABLE = "stable"      # Re(mu) < 0
    UNSTABLE = "unstable"  # Re(mu) > 0


@dataclass(frozen=True)
class Projector:
    """A square matrix p with p @ p == p (up to idem_tol) and its rank."""

    p: np.ndarray
    rank: int

    @property
    def dim(self) -> int:
        return self.p.shape[0]

    def idempotency_defect(self) -> float:
        return fro_norm(self.p @ self.p - self.p)


def idem_tol(p: np.ndarray) -> float:
    """Idempotence tolerance scaled for oblique-projector norm growth."""
    return 1e-10 * (1.0 + fro_norm(p))


def spectral_split(a: np.ndarray, half: SpectralHalf, gap_tol: float = GAP_TOL) -> np.ndarray:
    """Orthonormal basis of the invariant subspace for one half-plane.

    Ordered complex Schur decomposition with the selected eigenvalues
    rotated to the leading block; the corresponding Schur vectors span the
    invariant subspace.  Any eigenvalue with |Re mu| < gap_tol triggers
    ``SpectralGapViolation``: an eigenvalue that close to the imaginary
    axis cannot be assigned to either half without an arbitrary (and
    non-analytic) choice.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"spectral_split needs a square matrix, got {a.shape}")
    if gap_tol <= 0:
        raise ValueError("gap_tol must be positive")
    sort = "lhp" if half is SpectralHalf.STABLE else "rhp"
    t, z, sdim = scipy.linalg.schur(a, output="complex", sort=sort)
    eigs = np.diag(t)
    closest = np.abs(eigs.real).min()
    if closest < gap_tol:
        raise SpectralGapViolation(
            f"eigenvalue with |Re| = {closest:.3e} < gap_tol = {gap_tol:.3e}"
        )
    return z[:, :sdim].copy()


def eigenprojection(r_basis: np.ndarray, l_basis: np.ndarray) -> Projector:
    """Oblique projector P = R (L* R)^{-1} L* from right/left bases.

    Raises ``DegenerateDuality`` when L* R is numerically singular, i.e.
    the two bases are close to orthogonal and the projector blows up.
    """
    r_basis = np.asarray(r_basis, dtype=np.complex128)
    l_basis = np.asarray(l_basis, dtype=np.complex128)
    if r_basis.shape != l_basis.shape:
        raise ValueError(
            f"right/left basis shape mismatch: {r_basis.shape} vs {l_basis.shape}"
        )
    lh = l_basis.conj().T
    gram = lh @ r_basis
    try:
        x = solve(gram, lh)
    except SingularMatrix as exc:
        raise DegenerateDuality(f"duality product L*R numerically singular: {exc}") from exc
    p = r_basis @ x
    if fro_norm(p @ p - p) > idem_tol(p):
        raise DegenerateDuality(
            "projector from ill-conditioned duality pairing lost idempotence"
        )
    return Projector(p=p, rank=r_basis.shape[1])


def stable_projector(a: np.ndarray, half: SpectralHalf = SpectralHalf.STABLE,
                     gap_tol: float = GAP_TOL) -> Projector:
    """Eigenprojection onto the stable (or unstable) invariant subspace.

    The right basis spans the selected invariant subspace of ``a``.  The
    left basis must span the invariant subspace of ``a*`` belonging to the
    *conjugates* of the selected eigenvalues; conjugation preserves the
    sign of the real part, so the same half-plane selector applies to
    ``a*``.  This pairing is what makes L* R nonsingular.
    """
    r_basis = spectral_split(a, half, gap_tol)
    l_basis = spectral_split(np.asarray(a, dtype=np.complex128).conj().T, half, gap_tol)
    if l_basis.shape[1] != r_basis.shape[1]:
        raise SpectralGapViolation(
            "half-plane eigenvalue counts of a and a* disagree; spectrum too "
            "close to the imaginary axis"
        )
    return eigenprojection(r_basis, l_basis)


def complementary_rank(a: np.ndarray, proj: Projector, tol: float = 1e-8) -> bool:
    """Check rank(P) + rank(I - P) == n (diagnostic helper)."""
    n = proj.dim
    comp = np.eye(n, dtype=np.complex128) - proj.p
    return proj.rank + numerical_rank(comp, tol) == n
