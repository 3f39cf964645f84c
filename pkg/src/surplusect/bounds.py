"""Closed-form constants and volume bounds for the Clifford torus in
CP^n: the Crofton constant, the kinematic-formula constant, the two
published lower bounds, and the expected intersection count."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, asdict

from .core import vol_rpn

COLUMNS = (
    "n",
    "alston_amorim",
    "goldstein",
    "vol_clifford",
    "xi",
    "zeta",
    "min_intersections",
    "expected_count",
)


def xi(n: int) -> float:
    """Crofton constant: pi^((n+1)/2) / ((n+1) Gamma((n+1)/2)),
    equivalently vol(RP^n)/(n+1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.pi ** ((n + 1) / 2) / ((n + 1) * math.gamma((n + 1) / 2))


def goldstein_zeta(n: int) -> float:
    """Kinematic-formula constant: pi^(n+1) / ((n+1) Gamma((n+1)/2)^2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.pi ** (n + 1) / ((n + 1) * math.gamma((n + 1) / 2) ** 2)


def vol_clifford(n: int) -> float:
    """Volume of the monotone Clifford torus: (2 pi)^n / (n+1)^((n+1)/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (2 * math.pi) ** n / (n + 1) ** ((n + 1) / 2)


def min_intersections(n: int) -> int:
    """Minimal transverse intersection count of the Clifford torus with
    a real projective subspace: 2^ceil(n/2)."""
    return 2 ** math.ceil(n / 2)


def alston_amorim(n: int) -> float:
    """Volume lower bound pi^((n+1)/2) 2^ceil(n/2) / ((n+1) Gamma((n+1)/2))."""
    return xi(n) * min_intersections(n)


def goldstein(n: int) -> float:
    """Volume lower bound sqrt(2^n pi^(n+1) / (n+1)) / Gamma((n+1)/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return math.sqrt(2**n * math.pi ** (n + 1) / (n + 1)) / math.gamma((n + 1) / 2)


def expected_count(n: int) -> float:
    """Mean transverse intersection count under Haar measure:
    2^n pi^((n-1)/2) Gamma((n+1)/2) / (n+1)^((n-1)/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (
        2**n
        * math.pi ** ((n - 1) / 2)
        * math.gamma((n + 1) / 2)
        / (n + 1) ** ((n - 1) / 2)
    )


@dataclass(frozen=True)
class BoundsRow:
    n: int
    alston_amorim: float
    goldstein: float
    vol_clifford: float
    xi: float
    zeta: float
    min_intersections: int
    expected_count: float


def bounds_row(n: int) -> BoundsRow:
    return BoundsRow(
        n=n,
        alston_amorim=alston_amorim(n),
        goldstein=goldstein(n),
        vol_clifford=vol_clifford(n),
        xi=xi(n),
        zeta=goldstein_zeta(n),
        min_intersections=min_intersections(n),
        expected_count=expected_count(n),
    )


def table1(n_max: int) -> list[BoundsRow]:
    """Bounds table for n = 1 .. n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    return [bounds_row(n) for n in range(1, n_max + 1)]


def rows_to_csv(rows: list[BoundsRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in rows:
        d = asdict(row)
        writer.writerow([_fmt(d[c]) for c in COLUMNS])
    return buf.getvalue()


def rows_to_json(rows: list[BoundsRow]) -> str:
    return json.dumps([asdict(r) for r in rows], indent=2)


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


# consistency with core: xi(n) * (n+1) == vol_rpn(n) is relied on by tests
__all__ = [
    "xi",
    "goldstein_zeta",
    "vol_clifford",
    "min_intersections",
    "alston_amorim",
    "goldstein",
    "expected_count",
    "BoundsRow",
    "bounds_row",
    "table1",
    "rows_to_csv",
    "rows_to_json",
    "vol_rpn",
]
