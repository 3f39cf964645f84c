"""The explicit loop of real projective planes in CP^2

    L_t = {[(a1 + i a2) e^{i pi t/3} : (a1 - i a2) e^{i pi t/3} :
            a3 e^{-2 i pi t/3}]}

with period 1 in t, its membership predicate, the torus moment map,
and a sampling check that two distinct members meet only in the point
[0:0:1] and the circle {[a:b:0] : |a| = |b|}."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .core import ProjectivePoint, RngState, canonicalize
from .errors import StructureViolationError

DEFAULT_TOL = 1e-9


def _phases(t: float):
    rot12 = np.exp(1j * math.pi * t / 3.0)
    rot3 = np.exp(-2j * math.pi * t / 3.0)
    return rot12, rot3


def clean_loop_point(t: float, a) -> ProjectivePoint:
    """Point of L_t with real projective parameter [a1 : a2 : a3]."""
    a = np.asarray(a, dtype=float)
    if a.shape != (3,):
        raise ValueError("parameter must be a real triple")
    if not np.any(a):
        raise ValueError("zero vector is not a projective parameter")
    rot12, rot3 = _phases(t)
    z = np.array(
        [(a[0] + 1j * a[1]) * rot12, (a[0] - 1j * a[1]) * rot12, a[2] * rot3]
    )
    return ProjectivePoint(z)


def membership_defect(t: float, z, tol_scale: float = 1.0) -> float:
    """How far z is from lying on L_t (0 for members, in exact
    arithmetic).

    Undo the t-rotation to w; then z is on L_t iff w1 = w2 = 0, or
    |w1| = |w2| and u w3 is real for the phase u with u^2 w2 = conj(w1).
    """
    vec = z.vec if isinstance(z, ProjectivePoint) else canonicalize(z)
    return float(_defect_batch(t, vec[None, :])[0])


def _defect_batch(t: float, vecs: np.ndarray) -> np.ndarray:
    """Membership defect for unit rows of vecs (phase-invariant, so any
    unit representative works)."""
    rot12, rot3 = _phases(t)
    w1 = vecs[:, 0] * rot12.conjugate()
    w2 = vecs[:, 1] * rot12.conjugate()
    w3 = vecs[:, 2] * rot3.conjugate()
    m1, m2 = np.abs(w1), np.abs(w2)
    modulus_gap = np.abs(m1 - m2)
    # phase u with u^2 w2 = conj(w1); both square roots give the same
    # |Im(u w3)|
    usq = np.where(m2 > 0, w1.conjugate() / np.where(m2 > 0, w2, 1.0), 1.0)
    u = np.exp(0.5j * np.angle(usq))
    reality_gap = np.abs((u * w3).imag)
    defect = np.maximum(modulus_gap, reality_gap)
    # the isolated point w1 = w2 = 0 is always a member
    return np.where(m1 + m2 == 0.0, 0.0, defect)


def clean_loop_member(t: float, z, tol: float = DEFAULT_TOL) -> bool:
    """Membership predicate for L_t at tolerance tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    return membership_defect(t, z) <= tol


def moment_map(z) -> tuple:
    """(|z1|^2, |z2|^2) / (2 sum |z_j|^2) for the standard torus
    action; L_t maps into the diagonal {x = y}."""
    vec = z.vec if isinstance(z, ProjectivePoint) else np.asarray(z, dtype=complex)
    mods = np.abs(vec) ** 2
    total = mods.sum()
    if total == 0.0:
        raise ValueError("zero vector is not a projective point")
    return (float(mods[0] / (2.0 * total)), float(mods[1] / (2.0 * total)))


@dataclass
class StructureReport:
    """Classification of sampled points of L_{t1} against L_{t2}."""

    t1: float
    t2: float
    samples: int
    at_isolated_point: int
    on_common_circle: int
    generic: int
    min_generic_defect: float
    max_generic_defect: float
    passed: bool

    def to_dict(self) -> dict:
        return {
            "t1": self.t1,
            "t2": self.t2,
            "samples": self.samples,
            "class_counts": {
                "isolated_point": self.at_isolated_point,
                "common_circle": self.on_common_circle,
                "generic": self.generic,
            },
            "min_generic_defect": self.min_generic_defect,
            "max_generic_defect": self.max_generic_defect,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def verify_intersection_structure(
    t1: float,
    t2: float,
    samples: int = 10_000,
    tol: float = DEFAULT_TOL,
    seed: int = 0,
    class_tol: float = 1e-3,
) -> StructureReport:
    """Sample L_{t1} and check that, away from [0:0:1] and the common
    circle {|z1| = |z2|, z3 = 0}, no sampled point lies on L_{t2}.

    Raises StructureViolationError if a generic sample is a member of
    L_{t2} within tol.
    """
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    if abs((t1 - t2) % 1.0) < 1e-12 or abs((t1 - t2) % 1.0 - 1.0) < 1e-12:
        raise ValueError("t1 and t2 must differ mod 1")
    gen = RngState(seed).generator()
    a = gen.standard_normal((samples, 3))
    a /= np.linalg.norm(a, axis=1, keepdims=True)
    rot12, rot3 = _phases(t1)
    z = np.stack(
        [
            (a[:, 0] + 1j * a[:, 1]) * rot12,
            (a[:, 0] - 1j * a[:, 1]) * rot12,
            a[:, 2] * rot3,
        ],
        axis=1,
    )
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    near_point = np.abs(z[:, 2]) > 1.0 - class_tol  # close to [0:0:1]
    near_circle = (~near_point) & (np.abs(z[:, 2]) < class_tol)
    generic = ~near_point & ~near_circle
    defects = _defect_batch(t2, z[generic])
    members = defects <= tol
    report = StructureReport(
        t1=t1,
        t2=t2,
        samples=samples,
        at_isolated_point=int(near_point.sum()),
        on_common_circle=int(near_circle.sum()),
        generic=int(generic.sum()),
        min_generic_defect=float(defects.min()) if defects.size else math.inf,
        max_generic_defect=float(defects.max()) if defects.size else 0.0,
        passed=not bool(members.any()),
    )
    if not report.passed:
        raise StructureViolationError(
            f"{int(members.sum())} generic points of L_{{t1}} lie on L_{{t2}}; "
            "either a bug or a genuine structure violation"
        )
    return report
