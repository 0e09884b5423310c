"""Built-in analytic projector families used as ground truth.

Each family is a closed-form map lambda -> P(lambda) with constant rank
on its declared domain, optionally with an exact derivative map.  The
continuation schemes never need the derivative; only the reference
integrator does, and it falls back to central finite differences when a
family does not provide one.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainViolation
from .matrix_core import solve
from .spectral import SpectralHalf, stable_projector

__all__ = [
    "ProjectorFamily",
    "ProblemSpec",
    "family_moebius",
    "family_rank1",
    "family_evans_toy",
    "family_random_analytic",
    "get_problem",
    "builtin_problem_ids",
    "SplitMix64",
]


@dataclass(frozen=True)
class ProjectorFamily:
    """An analytic family of rank-k projectors on C^n.

    ``eval`` returns the n-by-n projector matrix; ``deriv``, when present,
    returns the exact complex-analytic derivative at the same point.
    ``domain_note`` documents the singularities a contour must avoid.
    """

    dim: int
    rank: int
    eval: Callable[[complex], np.ndarray]
    deriv: Optional[Callable[[complex], np.ndarray]] = None
    domain_note: str = "entire"


@dataclass(frozen=True)
class ProblemSpec:
    """A family bundled with a safe default contour.

    ``suggested_center``/``suggested_radius`` describe a circle guaranteed
    to stay inside the family's analyticity domain; ``suggested_basepoint``
    is the first mesh point of that circle.  ``singularities`` lists
    isolated points a contour must neither hit nor enclose.
    """

    id: str
    family: ProjectorFamily
    suggested_basepoint: complex
    suggested_center: complex
    suggested_radius: float
    singularities: tuple = field(default_factory=tuple)


def family_moebius() -> ProblemSpec:
    """Entire rank-1 family P(lambda) = [[1, -lambda], [0, 0]].

    Conjugation of diag(1, 0) by the unit upper-triangular matrix
    [[1, lambda], [0, 1]].  The first coordinate axis is a fixed line of
    the family, so continuations started from (1, 0)^T are exactly
    constant; this makes the family a sharp zero-error test case.
    """

    def p(lam: complex) -> np.ndarray:
        return np.array([[1.0, -lam], [0.0, 0.0]], dtype=np.complex128)

    def dp(lam: complex) -> np.ndarray:
        return np.array([[0.0, -1.0], [0.0, 0.0]], dtype=np.complex128)

    family = ProjectorFamily(dim=2, rank=1, eval=p, deriv=dp, domain_note="entire")
    return ProblemSpec(
        id="moebius",
        family=family,
        suggested_basepoint=1.0 + 0.0j,
        suggested_center=0.0 + 0.0j,
        suggested_radius=1.0,
    )


def family_rank1() -> ProblemSpec:
    """Rank-1 family P(lambda) = v v^T / (1 + lambda^2), v = (1, lambda)^T.

    Bilinear (transpose, not conjugate-transpose) pairing keeps the
    family analytic in lambda; the price is poles at lambda = +/- i.
    """

    def p(lam: complex) -> np.ndarray:
        denom = 1.0 + lam * lam
        if abs(denom) <= 1e-12 * (1.0 + abs(lam)) ** 2:
            raise DomainViolation(f"rank1 family undefined at lambda = {lam} (pole)")
        v = np.array([[1.0], [lam]], dtype=np.complex128)
        return (v @ v.T) / denom

    def dp(lam: complex) -> np.ndarray:
        denom = 1.0 + lam * lam
        if abs(denom) <= 1e-12 * (1.0 + abs(lam)) ** 2:
            raise DomainViolation(f"rank1 family undefined at lambda = {lam} (pole)")
        v = np.array([[1.0], [lam]], dtype=np.complex128)
        vp = np.array([[0.0], [1.0]], dtype=np.complex128)
        sym = vp @ v.T + v @ vp.T
        return sym / denom - (2.0 * lam / denom**2) * (v @ v.T)

    family = ProjectorFamily(
        dim=2, rank=1, eval=p, deriv=dp,
        domain_note="poles at lambda = +i and -i",
    )
    return ProblemSpec(
        id="rank1",
        family=family,
        suggested_basepoint=0.5 + 0.0j,
        suggested_center=0.0 + 0.0j,
        suggested_radius=0.5,
        singularities=(1j, -1j),
    )


def family_evans_toy() -> ProblemSpec:
    """Stable eigenprojection of A(lambda) = [[0, 1], [lambda, 0]].

    Eigenvalues are +/- sqrt(lambda), so the stable/unstable split breaks
    down exactly on the branch ray lambda <= 0.  No closed-form derivative
    is supplied; the reference integrator uses finite differences here.
    """

    def p(lam: complex) -> np.ndarray:
        a = np.array([[0.0, 1.0], [lam, 0.0]], dtype=np.complex128)
        return stable_projector(a, SpectralHalf.STABLE).p

    family = ProjectorFamily(
        dim=2, rank=1, eval=p, deriv=None,
        domain_note="branch set on the ray Re(lambda) <= 0, Im(lambda) = 0",
    )
    return ProblemSpec(
        id="evans-toy",
        family=family,
        suggested_basepoint=1.5 + 0.0j,
        suggested_center=1.0 + 0.0j,
        suggested_radius=0.5,
        singularities=(0.0 + 0.0j,),
    )


class SplitMix64:
    """Portable 64-bit shift/multiply PRNG (splitmix64).

    State advances by the golden-ratio increment 0x9E3779B97F4A7C15; each
    output is the finalized mix z ^= z >> 31 after two multiply-xorshift
    rounds.  Fully specified here so the random families reproduce
    bit-for-bit in any implementation language.
    """

    MASK = (1 << 64) - 1
    GAMMA = 0x9E3779B97F4A7C15

    def __init__(self, seed: int):
        self._state = seed & self.MASK

    def next_u64(self) -> int:
        self._state = (self._state + self.GAMMA) & self.MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform double in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def complex_matrix(self, rows: int, cols: int) -> np.ndarray:
        """Row-major matrix of entries (2u-1) + i(2u-1), u uniform."""
        m = np.empty((rows, cols), dtype=np.complex128)
        for i in range(rows):
            for j in range(cols):
                re = 2.0 * self.uniform() - 1.0
                im = 2.0 * self.uniform() - 1.0
                m[i, j] = complex(re, im)
        return m


def family_random_analytic(seed: int, n: int, k: int) -> ProblemSpec:
    """Seeded random family P = M(lambda) diag(I_k, 0) M(lambda)^{-1}.

    M(lambda) = M0 + lambda M1 + lambda^2 M2 with entries drawn from a
    splitmix64 stream; M0 is redrawn until its 2-norm condition number is
    below 10.  The family is valid wherever M stays invertible; the
    radius below is the safe bound from
    |lambda| ||M1|| + |lambda|^2 ||M2|| < 1 / ||M0^{-1}||.
    """
    if not (1 <= k < n):
        raise ValueError(f"need 1 <= k < n, got n={n}, k={k}")
    rng = SplitMix64(seed)
    while True:
        m0 = rng.complex_matrix(n, n)
        if np.linalg.cond(m0, 2) < 10.0:
            break
    m1 = rng.complex_matrix(n, n)
    m2 = rng.complex_matrix(n, n)

    inv_norm = np.linalg.norm(np.linalg.inv(m0), 2)
    c = 1.0 / inv_norm
    b = np.linalg.norm(m1, 2)
    a = np.linalg.norm(m2, 2)
    r_safe = (-b + np.sqrt(b * b + 4.0 * a * c)) / (2.0 * a)

    d = np.zeros((n, n), dtype=np.complex128)
    d[:k, :k] = np.eye(k)
    eye = np.eye(n, dtype=np.complex128)

    def m_at(lam: complex) -> np.ndarray:
        return m0 + lam * m1 + (lam * lam) * m2

    def p(lam: complex) -> np.ndarray:
        m = m_at(lam)
        minv = solve(m, eye)
        return m @ d @ minv

    def dp(lam: complex) -> np.ndarray:
        m = m_at(lam)
        mp = m1 + (2.0 * lam) * m2
        minv = solve(m, eye)
        minv_p = -minv @ mp @ minv  # (M^{-1})' = -M^{-1} M' M^{-1}
        return mp @ d @ minv + m @ d @ minv_p

    family = ProjectorFamily(
        dim=n, rank=k, eval=p, deriv=dp,
        domain_note=f"disk |lambda| < {r_safe:.6g} where M(lambda) is provably invertible",
    )
    radius = 0.5 * r_safe
    return ProblemSpec(
        id=f"random:{seed}:{n}:{k}",
        family=family,
        suggested_basepoint=complex(radius),
        suggested_center=0.0 + 0.0j,
        suggested_radius=radius,
    )


_NAMED = {
    "moebius": family_moebius,
    "rank1": family_rank1,
    "evans-toy": family_evans_toy,
}


def builtin_problem_ids() -> list:
    """Ids of the fixed (non-parametric) families."""
    return list(_NAMED)


def get_problem(problem_id: str) -> ProblemSpec:
    """Resolve a problem id, including ``random:<seed>:<n>:<k>``."""
    if problem_id in _NAMED:
        return _NAMED[problem_id]()
    if problem_id.startswith("random:"):
        parts = problem_id.split(":")
        if len(parts) != 4:
            raise ValueError(f"malformed random problem id: {problem_id!r}")
        try:
            seed, n, k = (int(s) for s in parts[1:])
        except ValueError as exc:
            raise ValueError(f"malformed random problem id: {problem_id!r}") from exc
        return family_random_analytic(seed, n, k)
    raise ValueError(
        f"unknown problem id {problem_id!r}; known: "
        + ", ".join(sorted(_NAMED)) + ", random:<seed>:<n>:<k>"
    )
