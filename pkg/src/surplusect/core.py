"""Foundational numerics: projective points, Haar-random unitaries,
metric constants, and counter-based RNG streams.

All randomness flows through :class:`RngState`, a (seed, stream) pair
backed by the Philox counter-based generator, so every Monte Carlo
trial is a pure function of its stream index and results never depend
on execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator, Philox

UNITARITY_TOL = 1e-10
PHASE_TOL = 1e-9


@dataclass(frozen=True)
class RngState:
    """Counter-based RNG coordinates: outputs are a pure function of
    (seed, stream)."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not (0 <= self.stream < 2**64):
            raise ValueError("stream must be a 64-bit unsigned integer")

    def generator(self) -> Generator:
        return Generator(Philox(key=(self.seed << 64) | self.stream))

    def with_stream(self, stream: int) -> "RngState":
        return RngState(self.seed, stream)


def canonicalize(vec: np.ndarray) -> np.ndarray:
    """Canonical unit representative of a projective point: unit norm,
    first entry of modulus > 1e-9 made real and positive."""
    vec = np.asarray(vec, dtype=complex)
    nrm = np.linalg.norm(vec)
    if nrm == 0.0:
        raise ValueError("zero vector is not a projective point")
    vec = vec / nrm
    idx = np.flatnonzero(np.abs(vec) > PHASE_TOL)
    if idx.size == 0:
        raise ValueError("no entry above phase tolerance")
    lead = vec[idx[0]]
    return vec * (lead.conjugate() / abs(lead))


def canonicalize_real(vec: np.ndarray) -> np.ndarray:
    """Canonical unit representative of a real projective point
    (quotient a ~ -a resolved by first-nonzero-positive sign)."""
    vec = np.asarray(vec, dtype=float)
    nrm = np.linalg.norm(vec)
    if nrm == 0.0:
        raise ValueError("zero vector is not a projective point")
    vec = vec / nrm
    idx = np.flatnonzero(np.abs(vec) > PHASE_TOL)
    if vec[idx[0]] < 0:
        vec = -vec
    return vec


@dataclass(frozen=True, eq=False)
class ProjectivePoint:
    """Point of CP^n stored as its canonical unit representative."""

    vec: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "vec", canonicalize(self.vec))

    @property
    def dim(self) -> int:
        """Projective dimension n (ambient vector dimension minus 1)."""
        return len(self.vec) - 1

    def __eq__(self, other) -> bool:
        # arccos cannot resolve angles below ~1e-8 (acos(1 - eps) ~
        # sqrt(2 eps)), so the equality threshold sits well above that
        if not isinstance(other, ProjectivePoint):
            return NotImplemented
        return projective_distance(self, other) < 1e-6


def projective_distance(p, q) -> float:
    """Fubini-Study-type angle arccos|<p, q>| in [0, pi/2]; zero iff
    the points coincide projectively."""
    pv = p.vec if isinstance(p, ProjectivePoint) else canonicalize(p)
    qv = q.vec if isinstance(q, ProjectivePoint) else canonicalize(q)
    inner = abs(np.vdot(pv, qv))
    return math.acos(min(1.0, inner))


def haar_unitary(dim: int, rng: RngState) -> np.ndarray:
    """Haar-distributed unitary on U(dim).

    Ginibre matrix -> QR -> rescale column j by the unit conjugate
    phase of R[j, j].  The phase correction makes the QR output exactly
    Haar rather than merely unitary.
    """
    if dim < 2:
        raise ValueError("dim must be >= 2")
    gen = rng.generator()
    z = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d.conjugate() / np.abs(d))


def unitarity_defect(m: np.ndarray) -> float:
    """Max-norm of M^dagger M - I."""
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def check_unitary(m: np.ndarray) -> np.ndarray:
    """Validate and return a unitary matrix; raises ValueError otherwise."""
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("matrix must be square")
    if unitarity_defect(m) > UNITARITY_TOL:
        raise ValueError("matrix fails the unitarity check")
    return m


def vol_rpn(n: int) -> float:
    """Riemannian volume of RP^n, normalised to half the surface area
    of the unit n-sphere: pi^((n+1)/2) / Gamma((n+1)/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)
