"""Numerical laboratory for intersection statistics of the Clifford
torus with random real projective subspaces of CP^n, volume-bound
tables, the clean loop of RP^2s in CP^2, and concurrent normals of
smooth convex bodies."""

from .bounds import (
    BoundsRow,
    alston_amorim,
    expected_count,
    goldstein,
    goldstein_zeta,
    min_intersections,
    table1,
    vol_clifford,
    xi,
)
from .cleanloop import (
    clean_loop_member,
    clean_loop_point,
    membership_defect,
    moment_map,
    verify_intersection_structure,
)
from .core import (
    ProjectivePoint,
    RngState,
    haar_unitary,
    projective_distance,
    vol_rpn,
)
from .counting import (
    CountResult,
    QuadricSystem,
    clifford_quadric_system,
    count_clifford_multistart,
    count_conic_pencil,
    count_rpn_rpn,
    torus_point,
)
from .errors import (
    BudgetExceededError,
    DegenerateError,
    InsufficientCellsError,
    MeshTooCoarseError,
    StructureViolationError,
    SurplusectError,
)
from .normals import (
    CausticGrid,
    Ellipsoid,
    NormalCount,
    TranslatedBody,
    TrigPolynomial2D,
    boundary_point,
    caustic_grid,
    count_normals,
    count_normals_2d,
    count_normals_3d,
    eval_h,
    evolute_2d,
    grad_h,
    translate_body,
)
from .stats import (
    DistributionReport,
    Tally,
    chi_square_consistency,
    distribution_report,
    run_clifford_trials,
    wilson_interval,
)

__version__ = "0.1.0"
