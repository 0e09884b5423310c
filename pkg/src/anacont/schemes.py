"""One-step advance operators for basis continuation.

Every scheme here is derivative-free: a step consumes only projector
evaluations at points on the chord from lambda_j to lambda_{j+1} and a
handful of matrix multiplications.  All published formulas end with a
left projector factor at the step target, which pins the output to the
new subspace and is what keeps the recursion stable.

Evaluations go through a ``ProjectorCache`` that both memoizes repeated
points (on a fixed mesh the end point of one step is the start point of
the next) and maintains the cost counters the step-count/cost claims are
audited against.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .problems import ProjectorFamily

__all__ = [
    "ProjectorCache",
    "SchemeSpec",
    "step_greedy1",
    "step_brz1",
    "step_greedy2",
    "step_rich2",
    "step_rich3",
    "step_greedy3",
    "richardson_lift",
    "get_scheme",
    "base_scheme_ids",
]


class ProjectorCache:
    """Memoized projector evaluation with cost accounting.

    ``projector`` is the counted path used by step operators:
    ``evals_total`` counts every request (the unshared accounting, one
    count per distinct point a formula needs), while ``evals_unique``
    counts cache misses only (the shared accounting on a fixed mesh).
    ``peek`` serves diagnostics without touching any counter.
    """

    def __init__(self, family: ProjectorFamily):
        self.family = family
        self._cache: dict = {}
        self.evals_total = 0
        self.evals_unique = 0
        self.mat_mults = 0

    def projector(self, lam: complex) -> np.ndarray:
        self.evals_total += 1
        p = self._cache.get(lam)
        if p is None:
            p = self.family.eval(lam)
            self._cache[lam] = p
            self.evals_unique += 1
        return p

    def peek(self, lam: complex) -> np.ndarray:
        p = self._cache.get(lam)
        if p is None:
            p = self.family.eval(lam)
            self._cache[lam] = p
        return p

    def matmul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        self.mat_mults += 1
        return a @ b


def step_greedy1(cache: ProjectorCache, lam0: complex, lam1: complex,
                 r: np.ndarray) -> np.ndarray:
    """First-order greedy step: project the old basis onto the new subspace."""
    p1 = cache.projector(lam1)
    return cache.matmul(p1, r)


def step_brz1(cache: ProjectorCache, lam0: complex, lam1: complex,
              r: np.ndarray) -> np.ndarray:
    """First-order projection-stabilized step P1 (I + P0 (I - P1)) r."""
    p0 = cache.projector(lam0)
    p1 = cache.projector(lam1)
    u = cache.matmul(p1, r)
    v = cache.matmul(p0, r - u)
    return cache.matmul(p1, r + v)


def step_greedy2(cache: ProjectorCache, lam0: complex, lam1: complex,
                 r: np.ndarray) -> np.ndarray:
    """Second-order relaxation P1 (I + 1/2 P0 (I - P1)) r.

    Same cost as ``step_brz1``; halving the correction term is what buys
    the extra order.
    """
    p0 = cache.projector(lam0)
    p1 = cache.projector(lam1)
    u = cache.matmul(p1, r)
    v = cache.matmul(p0, r - u)
    return cache.matmul(p1, r + 0.5 * v)


def step_rich2(cache: ProjectorCache, lam0: complex, lam1: complex,
               r: np.ndarray) -> np.ndarray:
    """Second-order midpoint form P1 (2 P_half - I) r."""
    mid = lam0 + 0.5 * (lam1 - lam0)
    ph = cache.projector(mid)
    p1 = cache.projector(lam1)
    u = cache.matmul(ph, r)
    return cache.matmul(p1, 2.0 * u - r)


def step_rich3(cache: ProjectorCache, lam0: complex, lam1: complex,
               r: np.ndarray) -> np.ndarray:
    """Third-order step on quarter points of the chord.

    P1 [ 4/3 (2 P_3/4 - I) P_1/2 (2 P_1/4 - I) - 1/3 (2 P_1/2 - I) ] r
    """
    dlam = lam1 - lam0
    pq = cache.projector(lam0 + 0.25 * dlam)
    ph = cache.projector(lam0 + 0.5 * dlam)
    pt = cache.projector(lam0 + 0.75 * dlam)
    p1 = cache.projector(lam1)
    a = cache.matmul(pq, r)
    b = cache.matmul(ph, 2.0 * a - r)
    c = cache.matmul(pt, b)
    d = cache.matmul(ph, r)
    w = (4.0 / 3.0) * (2.0 * c - b) - (1.0 / 3.0) * (2.0 * d - r)
    return cache.matmul(p1, w)


def step_greedy3(cache: ProjectorCache, lam0: complex, lam1: complex,
                 r: np.ndarray) -> np.ndarray:
    """Third-order step using only the chord midpoint and endpoints.

    P1 [ 4/3 (I + 1/2 P_half (I - P1)) P_half (I + 1/2 P0 (I - P_half))
         - 1/3 (I + 1/2 P0 (I - P1)) ] r
    """
    mid = lam0 + 0.5 * (lam1 - lam0)
    p0 = cache.projector(lam0)
    ph = cache.projector(mid)
    p1 = cache.projector(lam1)
    t1 = cache.matmul(ph, r)
    t2 = cache.matmul(p0, r - t1)
    t3 = cache.matmul(ph, r + 0.5 * t2)
    t4 = cache.matmul(p1, t3)
    t5 = cache.matmul(ph, t3 - t4)
    u = t3 + 0.5 * t5
    t6 = cache.matmul(p1, r)
    t7 = cache.matmul(p0, r - t6)
    v = r + 0.5 * t7
    w = (4.0 / 3.0) * u - (1.0 / 3.0) * v
    return cache.matmul(p1, w)


@dataclass(frozen=True)
class SchemeSpec:
    """A one-step advance rule with its nominal order and cost signature.

    ``evals_per_step``/``mults_per_step`` are the per-step counts in the
    unshared accounting (distinct projector points a single step requests,
    and matrix multiplications it performs).
    """

    id: str
    order: int
    step: Callable[[ProjectorCache, complex, complex, np.ndarray], np.ndarray]
    evals_per_step: int
    mults_per_step: int

    @property
    def cost_signature(self) -> str:
        return f"{self.evals_per_step}E+{self.mults_per_step}M"


_BASE_SCHEMES = {
    "greedy1": SchemeSpec("greedy1", 1, step_greedy1, 1, 1),
    "brz1": SchemeSpec("brz1", 1, step_brz1, 2, 3),
    "greedy2": SchemeSpec("greedy2", 2, step_greedy2, 2, 3),
    "rich2": SchemeSpec("rich2", 2, step_rich2, 2, 2),
    "rich3": SchemeSpec("rich3", 3, step_rich3, 4, 5),
    "greedy3": SchemeSpec("greedy3", 3, step_greedy3, 3, 8),
}


def richardson_lift(base: SchemeSpec) -> SchemeSpec:
    """Raise a scheme's order by one via step-doubling extrapolation.

    The lifted step over [lam0, lam1] combines two half-steps of the base
    scheme with one full base step:

        (2^m * half_half - full) / (2^m - 1),   m = base.order.

    Composition happens on basis frames, never on explicit n-by-n step
    matrices, so a lift costs three base applications.
    """
    if base.order < 1:
        raise ValueError("base scheme must have order >= 1")
    weight = 2.0 ** base.order

    def step(cache: ProjectorCache, lam0: complex, lam1: complex,
             r: np.ndarray) -> np.ndarray:
        mid = lam0 + 0.5 * (lam1 - lam0)
        half = base.step(cache, mid, lam1, base.step(cache, lam0, mid, r))
        full = base.step(cache, lam0, lam1, r)
        return (weight * half - full) / (weight - 1.0)

    return SchemeSpec(
        id=f"lift:{base.id}",
        order=base.order + 1,
        step=step,
        evals_per_step=3 * base.evals_per_step,
        mults_per_step=3 * base.mults_per_step,
    )


def base_scheme_ids() -> list:
    """Ids of the closed-form (non-lifted) schemes."""
    return list(_BASE_SCHEMES)


def get_scheme(scheme_id: str) -> SchemeSpec:
    """Resolve a scheme id; ``lift:`` prefixes may be nested."""
    if scheme_id in _BASE_SCHEMES:
        return _BASE_SCHEMES[scheme_id]
    if scheme_id.startswith("lift:"):
        return richardson_lift(get_scheme(scheme_id[len("lift:"):]))
    raise ValueError(
        f"unknown scheme id {scheme_id!r}; known: "
        + ", ".join(_BASE_SCHEMES) + ", lift:<base>"
    )
