"""Contours, meshes, and the continuation driver.

A mesh is an ordered list of complex sample points along a contour;
closed meshes repeat the start point as the exact same floating-point
value so that the loop-closure error is not polluted by re-evaluated
trigonometry.  ``continue_basis`` advances a basis frame across a mesh
with any scheme and reports closure error, range drift, rank status, and
cost counters.
"""

import statistics
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .errors import DomainViolation, InitNotInRange, NonFiniteState, RankCollapse
from .matrix_core import cmatrix, fro_norm, numerical_rank, orthonormalize, range_basis
from .problems import ProblemSpec, ProjectorFamily
from .schemes import ProjectorCache, SchemeSpec

__all__ = [
    "Mesh",
    "BasisFrame",
    "CostCounters",
    "RunReport",
    "mesh_circle",
    "mesh_polyline",
    "parse_contour",
    "ContourDesc",
    "fractional_point",
    "initial_basis",
    "continue_basis",
    "closure_error",
    "winding_number",
    "check_mesh_in_domain",
    "StudyRow",
    "StudyResult",
    "convergence_study",
    "steps_to_tolerance",
    "RANK_COLLAPSE_TOL",
]

# Smallest retained relative singular direction before a frame is
# declared collapsed; far looser than machine precision because rank is
# exactly preserved in exact arithmetic and large drops mean mesh failure.
RANK_COLLAPSE_TOL = 1e-8


@dataclass(frozen=True)
class Mesh:
    """Ordered sample points along a contour."""

    points: np.ndarray
    closed: bool

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.complex128)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("mesh needs at least two points")
        if np.any(pts[1:] == pts[:-1]):
            raise ValueError("consecutive mesh points must be distinct")
        if self.closed and pts[-1] != pts[0]:
            raise ValueError("closed mesh must end exactly at its start point")

    def __len__(self) -> int:
        return self.points.size

    @property
    def segments(self) -> int:
        return self.points.size - 1

    def reversed(self) -> "Mesh":
        return Mesh(points=self.points[::-1].copy(), closed=self.closed)


@dataclass(frozen=True)
class BasisFrame:
    """A contour point together with the basis approximation there."""

    lam: complex
    r: np.ndarray


@dataclass(frozen=True)
class CostCounters:
    """Instrumentation snapshot for one continuation run.

    ``projector_evals_total`` counts every point-request made by step
    operators (the unshared accounting); ``projector_evals_unique``
    counts distinct points actually computed (the shared accounting on a
    fixed mesh, where one step's target is the next step's source).
    """

    projector_evals_unique: int
    projector_evals_total: int
    mat_mults: int
    steps: int


@dataclass(frozen=True)
class RunReport:
    """Outcome of one continuation run along a mesh."""

    frames: List[BasisFrame]
    closed: bool
    closure: Optional[float]
    drift: float
    range_residuals: List[float]
    rank_ok: bool
    counters: CostCounters


def mesh_circle(center: complex, radius: float, steps: int) -> Mesh:
    """Closed circular mesh with L+1 points, last identical to first."""
    if radius <= 0:
        raise ValueError("radius must be positive")
    if steps < 3:
        raise ValueError("a circle mesh needs at least 3 steps")
    angles = 2.0 * np.pi * np.arange(steps) / steps
    pts = np.empty(steps + 1, dtype=np.complex128)
    pts[:steps] = center + radius * np.exp(1j * angles)
    pts[steps] = pts[0]
    return Mesh(points=pts, closed=True)


def mesh_polyline(vertices, steps_per_edge: int) -> Mesh:
    """Mesh along straight edges between vertices.

    Closed when the last vertex equals the first; the repeated endpoint is
    stored as the identical value.
    """
    verts = np.asarray(vertices, dtype=np.complex128)
    if verts.size < 2:
        raise ValueError("polyline needs at least two vertices")
    if steps_per_edge < 1:
        raise ValueError("steps_per_edge must be >= 1")
    pts = []
    for a, b in zip(verts[:-1], verts[1:]):
        for t in range(steps_per_edge):
            pts.append(a + (t / steps_per_edge) * (b - a))
    closed = verts[-1] == verts[0]
    pts.append(pts[0] if closed else verts[-1])
    return Mesh(points=np.array(pts, dtype=np.complex128), closed=bool(closed))


@dataclass(frozen=True)
class ContourDesc:
    """Parsed contour descriptor; rebuilds meshes at any refinement."""

    kind: str                 # "circle" | "polyline"
    params: tuple
    base_steps: int

    def mesh(self, steps: Optional[int] = None) -> Mesh:
        n = self.base_steps if steps is None else steps
        if self.kind == "circle":
            center, radius = self.params
            return mesh_circle(center, radius, n)
        return mesh_polyline(self.params[0], n)


def _parse_complex_pair(text: str) -> complex:
    re_s, im_s = text.split(",")
    return complex(float(re_s), float(im_s))


def parse_contour(descriptor: str) -> ContourDesc:
    """Parse ``circle:<re>,<im>:<radius>:<L>`` or
    ``polyline:<re,im>;<re,im>;...:<L_per_edge>``."""
    parts = descriptor.split(":")
    try:
        if parts[0] == "circle" and len(parts) == 4:
            center = _parse_complex_pair(parts[1])
            radius = float(parts[2])
            steps = int(parts[3])
            return ContourDesc(kind="circle", params=(center, radius), base_steps=steps)
        if parts[0] == "polyline" and len(parts) == 3:
            verts = tuple(_parse_complex_pair(v) for v in parts[1].split(";"))
            steps = int(parts[2])
            return ContourDesc(kind="polyline", params=(verts,), base_steps=steps)
    except (ValueError, IndexError) as exc:
        raise ValueError(f"malformed contour descriptor {descriptor!r}") from exc
    raise ValueError(f"malformed contour descriptor {descriptor!r}")


def fractional_point(mesh: Mesh, j: int, frac: float) -> complex:
    """Chord interpolation between mesh points j and j+1.

    The chord (not the arc) is what the difference quotients in the step
    formulas are consistent with.
    """
    if not 0 <= j < mesh.segments:
        raise ValueError(f"segment index {j} out of range [0, {mesh.segments})")
    if not 0.0 <= frac <= 1.0:
        raise ValueError("frac must lie in [0, 1]")
    a = mesh.points[j]
    b = mesh.points[j + 1]
    return complex(a + frac * (b - a))


def initial_basis(family: ProjectorFamily, lam0: complex) -> np.ndarray:
    """Deterministic orthonormal basis of range P(lam0)."""
    return range_basis(family.eval(lam0), family.rank)


def init_tolerance(r0: np.ndarray) -> float:
    return 1e-8 * (1.0 + fro_norm(r0))


def continue_basis(family: ProjectorFamily, scheme: SchemeSpec, mesh: Mesh,
                   r0: np.ndarray, init_policy: str = "require") -> RunReport:
    """Advance r0 across the mesh with the scheme's step operator.

    ``init_policy="require"`` insists that r0 already lies in
    range P(lambda_0) (the hypothesis under which continuation provably
    stays in the moving subspace); ``"project"`` replaces r0 by an
    orthonormalized projection onto that range first.
    """
    r = cmatrix(r0)
    k = r.shape[1]
    if numerical_rank(r, 1e-12) < k:
        raise ValueError("r0 must have full column rank")
    if init_policy not in ("require", "project"):
        raise ValueError(f"unknown init policy {init_policy!r}")

    cache = ProjectorCache(family)
    pts = mesh.points
    p0 = cache.peek(pts[0])
    defect = fro_norm(p0 @ r - r)
    if init_policy == "require":
        if defect > init_tolerance(r):
            raise InitNotInRange(
                f"||P(lam0) r0 - r0|| = {defect:.3e} exceeds {init_tolerance(r):.3e}"
            )
    else:
        r = orthonormalize(p0 @ r)

    frames = [BasisFrame(lam=complex(pts[0]), r=r)]
    for j in range(mesh.segments):
        r = scheme.step(cache, complex(pts[j]), complex(pts[j + 1]), r)
        if not np.all(np.isfinite(r)):
            raise NonFiniteState(f"non-finite basis entries after step {j + 1}")
        if numerical_rank(r, RANK_COLLAPSE_TOL) < k:
            raise RankCollapse(
                f"basis rank fell below {k} at mesh point {j + 1} "
                f"(lambda = {pts[j + 1]})"
            )
        frames.append(BasisFrame(lam=complex(pts[j + 1]), r=r))

    residuals = [float(fro_norm(cache.peek(f.lam) @ f.r - f.r)) for f in frames]
    closure = float(fro_norm(frames[-1].r - frames[0].r)) if mesh.closed else None
    counters = CostCounters(
        projector_evals_unique=cache.evals_unique,
        projector_evals_total=cache.evals_total,
        mat_mults=cache.mat_mults,
        steps=mesh.segments,
    )
    return RunReport(
        frames=frames,
        closed=mesh.closed,
        closure=closure,
        drift=max(residuals),
        range_residuals=residuals,
        rank_ok=True,
        counters=counters,
    )


def closure_error(report: RunReport) -> float:
    """||R_L - R_0||_F for a closed-mesh run."""
    if not report.closed or report.closure is None:
        raise ValueError("closure error is defined only for closed meshes")
    return report.closure


def winding_number(points: np.ndarray, z: complex) -> int:
    """Winding number of a closed polygonal path around z."""
    pts = np.asarray(points, dtype=np.complex128)
    if pts[0] != pts[-1]:
        raise ValueError("winding number needs a closed path")
    rel = pts - z
    if np.any(rel == 0):
        raise ValueError("path passes through the point")
    total = np.sum(np.angle(rel[1:] / rel[:-1]))
    return int(round(total / (2.0 * np.pi)))


def check_mesh_in_domain(problem: ProblemSpec, mesh: Mesh,
                         margin: float = 1e-9) -> None:
    """Raise ``DomainViolation`` if the mesh hits or encloses a declared
    singularity of the problem's family."""
    for s in problem.singularities:
        dist = np.abs(mesh.points - s).min()
        if dist <= margin:
            raise DomainViolation(
                f"mesh passes through singularity at {s} (distance {dist:.3e})"
            )
        if mesh.closed and winding_number(mesh.points, s) != 0:
            raise DomainViolation(
                f"closed contour encloses singularity at {s}; the family is "
                "not analytic on any simply connected domain containing it"
            )


@dataclass(frozen=True)
class StudyRow:
    steps: int
    closure: Optional[float]       # None on open meshes
    oracle_error: Optional[float]  # None when the oracle column is disabled
    refinement_diff: Optional[float]  # endpoint change vs previous level
    projector_evals: int
    mat_mults: int
    order: Optional[float]


@dataclass(frozen=True)
class StudyResult:
    rows: List[StudyRow]
    median_order: Optional[float]


def convergence_study(family: ProjectorFamily, scheme: SchemeSpec,
                      mesh_factory: Callable[[int], Mesh], base_steps: int,
                      refinements: int, r0: Optional[np.ndarray] = None,
                      oracle_substeps: int = 64,
                      init_policy: str = "require") -> StudyResult:
    """Dyadic refinement study: run at L, 2L, 4L, ... and fit orders.

    The fitted order per refinement is log2 of the ratio of consecutive
    *endpoint self-differences* ||R_end(L) - R_end(L/2)||, which measures
    the scheme's convergence on open and closed meshes alike.  (Loop
    closure cannot serve here: on contours whose interior stays inside the
    analyticity domain it collapses beyond all polynomial orders, because
    every term of its h-expansion is a closed contour integral of analytic
    data.)  The closure column is still reported for closed meshes.
    ``oracle_substeps=0`` skips the reference-integrator column, which
    otherwise dominates runtime.
    """
    if refinements < 2:
        raise ValueError("need at least 2 refinement levels")
    rows: List[StudyRow] = []
    prev_end: Optional[np.ndarray] = None
    prev_diff: Optional[float] = None
    for level in range(refinements):
        steps = base_steps * (2 ** level)
        mesh = mesh_factory(steps)
        start = initial_basis(family, complex(mesh.points[0])) if r0 is None else r0
        report = continue_basis(family, scheme, mesh, start, init_policy=init_policy)
        end = report.frames[-1].r
        closure = report.closure if mesh.closed else None

        oracle_err: Optional[float] = None
        if oracle_substeps > 0:
            from .oracle import OracleConfig, integrate_kato  # deferred: avoids import cycle

            cfg = OracleConfig(substeps_per_segment=oracle_substeps)
            ref = integrate_kato(family, mesh, start, cfg)
            oracle_err = float(fro_norm(end - ref[-1].r))

        diff = float(fro_norm(end - prev_end)) if prev_end is not None else None
        order: Optional[float] = None
        if diff is not None and prev_diff is not None and diff > 0.0 and prev_diff > 0.0:
            order = float(np.log2(prev_diff / diff))
        rows.append(StudyRow(
            steps=steps,
            closure=closure,
            oracle_error=oracle_err,
            refinement_diff=diff,
            projector_evals=report.counters.projector_evals_total,
            mat_mults=report.counters.mat_mults,
            order=order,
        ))
        prev_end, prev_diff = end, diff
    orders = [row.order for row in rows if row.order is not None]
    median_order = float(statistics.median(orders)) if orders else None
    return StudyResult(rows=rows, median_order=median_order)


def steps_to_tolerance(family: ProjectorFamily, scheme: SchemeSpec,
                       mesh_factory: Callable[[int], Mesh], tol: float,
                       metric: str = "closure", min_steps: int = 8,
                       max_steps: int = 1 << 14,
                       reference_substeps: int = 256) -> Optional[int]:
    """Smallest dyadic mesh size whose error meets ``tol * ||r0||``.

    ``metric="closure"`` uses the loop-closure error (closed meshes);
    ``metric="endpoint"`` uses the error against a dense reference
    integration at the final mesh point, which reflects the scheme's true
    accuracy also in regimes where closure superconverges.  Returns None
    when even ``max_steps`` does not reach the tolerance.
    """
    if metric not in ("closure", "endpoint"):
        raise ValueError(f"unknown metric {metric!r}")
    reference: Optional[np.ndarray] = None
    if metric == "endpoint":
        from .oracle import OracleConfig, integrate_reduced_kato  # deferred import

        mesh = mesh_factory(min_steps)
        r0 = initial_basis(family, complex(mesh.points[0]))
        cfg = OracleConfig(substeps_per_segment=reference_substeps)
        reference = integrate_reduced_kato(family, mesh, r0, cfg)[-1].r

    steps = min_steps
    while steps <= max_steps:
        mesh = mesh_factory(steps)
        r0 = initial_basis(family, complex(mesh.points[0]))
        report = continue_basis(family, scheme, mesh, r0)
        if metric == "closure":
            err = closure_error(report)
        else:
            err = fro_norm(report.frames[-1].r - reference)
        if err <= tol * fro_norm(r0):
            return steps
        steps *= 2
    return None
