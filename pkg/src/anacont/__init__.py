"""Global numerical continuation of analytically varying invariant
subspaces along contours in the complex plane.

The package continues an orthonormal-ish basis R of the range of an
analytic projector family P(lambda) along a mesh on a contour, using a
family of derivative-free one-step schemes (orders one to three, plus a
Richardson order-lifting combinator), and cross-validates them against a
dense fourth-order reference integration of the underlying transport ODE
R' = (P'P - PP')R and its reduced form R' = P'R.
"""

from .contour import (
    BasisFrame,
    ContourDesc,
    CostCounters,
    Mesh,
    RunReport,
    StudyResult,
    StudyRow,
    check_mesh_in_domain,
    closure_error,
    continue_basis,
    convergence_study,
    fractional_point,
    initial_basis,
    mesh_circle,
    mesh_polyline,
    parse_contour,
    steps_to_tolerance,
    winding_number,
)
from .errors import (
    DegenerateDuality,
    DomainViolation,
    InitNotInRange,
    NonFiniteState,
    NumericalFailure,
    RankCollapse,
    RankDeficient,
    SingularMatrix,
    SpectralGapViolation,
)
from .matrix_core import (
    cmatrix,
    fro_norm,
    matmul,
    numerical_rank,
    orthonormalize,
    range_basis,
    solve,
)
from .oracle import (
    OracleConfig,
    Prop1Report,
    check_pprop,
    integrate_kato,
    integrate_reduced_kato,
    verify_prop1,
)
from .problems import (
    ProblemSpec,
    ProjectorFamily,
    SplitMix64,
    builtin_problem_ids,
    family_evans_toy,
    family_moebius,
    family_rank1,
    family_random_analytic,
    get_problem,
)
from .schemes import (
    ProjectorCache,
    SchemeSpec,
    base_scheme_ids,
    get_scheme,
    richardson_lift,
    step_brz1,
    step_greedy1,
    step_greedy2,
    step_greedy3,
    step_rich2,
    step_rich3,
)
from .spectral import (
    Projector,
    SpectralHalf,
    eigenprojection,
    spectral_split,
    stable_projector,
)

__version__ = "0.1.0"
