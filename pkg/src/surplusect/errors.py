"""Exception types shared across the package."""


class SurplusectError(Exception):
    """Base class for domain-level failures."""


class DegenerateError(SurplusectError):
    """The configuration is (numerically) non-generic: a non-transverse
    intersection, a coincident eigenvalue, or a pencil with no usable
    rank-2 member.  Callers doing Monte Carlo should resample."""


class BudgetExceededError(SurplusectError):
    """An iterative search exhausted its budget without converging."""


class MeshTooCoarseError(SurplusectError):
    """Refined critical points migrated too far from their mesh seeds;
    the spherical mesh needs more subdivision."""


class InsufficientCellsError(SurplusectError):
    """Chi-square test would have expected cell counts below 5."""


class StructureViolationError(SurplusectError):
    """A sampled point violated the expected intersection structure."""
