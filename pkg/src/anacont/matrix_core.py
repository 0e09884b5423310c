"""Dense complex matrix helpers used by every other module.

Matrices are plain ``numpy.ndarray`` objects with dtype ``complex128``;
this module adds the validated constructor, the backward-stable solve
with an explicit singularity check, and a deterministic orthonormalizer.
All functions are pure and never mutate their arguments.
"""

import numpy as np
import scipy.linalg

from .errors import RankDeficient, SingularMatrix

__all__ = [
    "cmatrix",
    "matmul",
    "solve",
    "orthonormalize",
    "fro_norm",
    "numerical_rank",
    "range_basis",
    "SINGULAR_TOL",
    "RANK_TOL",
]

# Relative pivot/diagonal thresholds; far below the 1e-2..1e-4 accuracy
# regime the continuation schemes operate in.
SINGULAR_TOL = 1e-12
RANK_TOL = 1e-12


def cmatrix(data) -> np.ndarray:
    """Build a validated complex matrix from literal data.

    Accepts anything ``np.asarray`` does, promotes to complex128, and
    rejects non-2D shapes, empty dimensions, and non-finite entries.
    """
    m = np.asarray(data, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Complex matrix product with an explicit dimension check."""
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"matmul shape mismatch: {a.shape} @ {b.shape}")
    return a @ b


def solve(a: np.ndarray, b: np.ndarray, singular_tol: float = SINGULAR_TOL) -> np.ndarray:
    """Solve a X = b by pivoted LU.

    Raises ``SingularMatrix`` when any U-diagonal entry falls below
    ``singular_tol`` times the largest one (relative pivot test), instead
    of silently returning garbage the way a raw LAPACK call would.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"solve needs a square matrix, got {a.shape}")
    if b.shape[0] != a.shape[0]:
        raise ValueError(f"solve rhs mismatch: {a.shape} vs {b.shape}")
    lu, piv = scipy.linalg.lu_factor(a, check_finite=False)
    diag = np.abs(np.diag(lu))
    dmax = diag.max()
    if dmax == 0.0 or diag.min() <= singular_tol * dmax:
        raise SingularMatrix(
            f"matrix numerically singular (pivot ratio {diag.min():.3e} / {dmax:.3e})"
        )
    return scipy.linalg.lu_solve((lu, piv), b, check_finite=False)


def orthonormalize(m: np.ndarray, rank_tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column span of ``m``, order-preserving.

    Thin QR with the unit-phase ambiguity resolved by forcing the
    triangular factor's diagonal to be real and nonnegative, which makes
    the output deterministic.  Raises ``RankDeficient`` when a diagonal
    entry of the triangular factor drops below ``rank_tol`` relative to
    the largest one.
    """
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError("orthonormalize expects a 2-D matrix")
    if m.shape[0] < m.shape[1]:
        raise ValueError(f"more columns than rows: {m.shape}")
    q, r = np.linalg.qr(m)
    diag = np.diag(r)
    mags = np.abs(diag)
    dmax = mags.max()
    if dmax == 0.0 or mags.min() <= rank_tol * dmax:
        raise RankDeficient(
            f"rank-deficient input to orthonormalize (diag ratio {mags.min():.3e} / {dmax:.3e})"
        )
    phases = diag / mags
    return q * phases  # broadcast over columns; makes diag(R) >= 0


def fro_norm(m: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.linalg.norm(m))


def numerical_rank(m: np.ndarray, tol: float) -> int:
    """Rank via column-pivoted QR.

    Counts diagonal magnitudes of the pivoted triangular factor above
    ``tol`` times the largest magnitude.
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    m = np.asarray(m, dtype=np.complex128)
    _, r, _ = scipy.linalg.qr(m, mode="economic", pivoting=True, check_finite=False)
    mags = np.abs(np.diag(r))
    if mags.size == 0 or mags.max() == 0.0:
        return 0
    return int(np.count_nonzero(mags > tol * mags.max()))


def range_basis(p: np.ndarray, rank: int) -> np.ndarray:
    """Orthonormal basis of the range of a (projector) matrix.

    Column-pivoted QR keeps the best-conditioned columns first; the
    leading ``rank`` Q-columns are re-phased the same way as in
    ``orthonormalize`` so the result is deterministic.
    """
    p = np.asarray(p, dtype=np.complex128)
    q, r, _ = scipy.linalg.qr(p, mode="economic", pivoting=True, check_finite=False)
    diag = np.diag(r)[:rank]
    mags = np.abs(diag)
    if rank > 0 and (mags.min() == 0.0 or mags.min() <= RANK_TOL * np.abs(np.diag(r)).max()):
        raise RankDeficient(f"matrix has numerical rank below {rank}")
    phases = diag / mags
    return q[:, :rank] * phases
