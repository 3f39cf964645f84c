"""Concurrent normals of smooth convex bodies via support functions.

A body is given by its support function h on the unit sphere; the
boundary is recovered as grad of the 1-homogeneous extension, and the
normals through a query point q are the critical points of
h(v) - <q, v>.  In the plane the counting is done by dense sampling
plus bisection on the derivative in the angle; on S^2 by seeding
Newton from extrema/saddle candidates of a subdivided icosahedral
mesh.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import MeshTooCoarseError

ANGLE_SAMPLES = 4096
CONVEXITY_SAMPLES = 4096
BISECT_TOL = 1e-12
ROOT_DEDUP_ANGLE = 1e-8
SECOND_DERIV_TOL = 1e-7
MESH_SUBDIVISIONS = 6
HESS_DET_TOL = 1e-8


@dataclass(frozen=True)
class Ellipsoid:
    """Support function h(v) = sqrt(sum a_i^2 v_i^2) of the solid
    ellipsoid with semi-axes a_i, in any dimension."""

    radii: tuple

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        if len(radii) < 2 or any(r <= 0 for r in radii):
            raise ValueError("radii must be >= 2 strictly positive numbers")
        object.__setattr__(self, "radii", radii)

    @property
    def dim(self) -> int:
        return len(self.radii)

    def support(self, v):
        a2 = np.square(self.radii)
        return np.sqrt((a2 * np.square(v)).sum(axis=-1))

    def grad_eucl(self, v):
        """Euclidean gradient of the 1-homogeneous extension; equals
        the boundary point with inward normal -v."""
        a2 = np.square(self.radii)
        return a2 * v / self.support(v)

    def hess_eucl(self, v):
        a2 = np.square(self.radii)
        h = self.support(v)
        av = a2 * v
        return np.diag(a2) / h - np.outer(av, av) / h**3

    # angle interface (dimension 2 only)
    def h_theta(self, t):
        a, b = self.radii
        return np.sqrt(a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2)

    def dh_theta(self, t):
        a, b = self.radii
        w = a * a * np.cos(t) ** 2 + b * b * np.sin(t) ** 2
        return (b * b - a * a) * np.sin(t) * np.cos(t) / np.sqrt(w)

    def d2h_theta(self, t):
        a, b = self.radii
        c, s = np.cos(t), np.sin(t)
        w = a * a * c * c + b * b * s * s
        dw = (b * b - a * a) * 2.0 * s * c
        d2w = (b * b - a * a) * 2.0 * (c * c - s * s)
        return d2w / (2.0 * np.sqrt(w)) - dw * dw / (4.0 * w**1.5)


@dataclass(frozen=True)
class TrigPolynomial2D:
    """Planar support function h(t) = c0 + sum_k (a_k cos(kt) + b_k sin(kt)),
    k starting at 1.  Convexity (h + h'' > 0) is checked on a dense
    angle grid at construction."""

    c0: float
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cos_coeffs", tuple(float(c) for c in self.cos_coeffs))
        object.__setattr__(self, "sin_coeffs", tuple(float(c) for c in self.sin_coeffs))
        t = np.linspace(0.0, 2.0 * np.pi, CONVEXITY_SAMPLES, endpoint=False)
        if np.min(self.h_theta(t) + self.d2h_theta(t)) <= 0.0:
            raise ValueError("not a support function of a convex body (h + h'' <= 0)")

    @property
    def dim(self) -> int:
        return 2

    def _series(self, t, deriv: int):
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, self.c0 if deriv == 0 else 0.0)
        for k, a in enumerate(self.cos_coeffs, start=1):
            if deriv == 0:
                out += a * np.cos(k * t)
            elif deriv == 1:
                out += -a * k * np.sin(k * t)
            else:
                out += -a * k * k * np.cos(k * t)
        for k, b in enumerate(self.sin_coeffs, start=1):
            if deriv == 0:
                out += b * np.sin(k * t)
            elif deriv == 1:
                out += b * k * np.cos(k * t)
            else:
                out += -b * k * k * np.sin(k * t)
        return out if out.shape else float(out)

    def h_theta(self, t):
        return self._series(t, 0)

    def dh_theta(self, t):
        return self._series(t, 1)

    def d2h_theta(self, t):
        return self._series(t, 2)

    def support(self, v):
        v = np.asarray(v, dtype=float)
        return self.h_theta(np.arctan2(v[..., 1], v[..., 0]))

    def grad_eucl(self, v):
        v = np.asarray(v, dtype=float)
        t = np.arctan2(v[..., 1], v[..., 0])
        perp = np.stack([-v[..., 1], v[..., 0]], axis=-1)
        return self.h_theta(t) * v + self.dh_theta(t) * perp


@dataclass(frozen=True)
class TranslatedBody:
    """Body C - q: support function h(v) - <q, v>."""

    base: object
    offset: np.ndarray

    def __post_init__(self):
        off = np.asarray(self.offset, dtype=float)
        if off.shape != (self.base.dim,):
            raise ValueError("offset dimension does not match the body")
        object.__setattr__(self, "offset", off)

    @property
    def dim(self) -> int:
        return self.base.dim

    def support(self, v):
        return self.base.support(v) - np.asarray(v) @ self.offset

    def grad_eucl(self, v):
        return self.base.grad_eucl(v) - self.offset

    def hess_eucl(self, v):
        return self.base.hess_eucl(v)

    def h_theta(self, t):
        return (
            self.base.h_theta(t)
            - self.offset[0] * np.cos(t)
            - self.offset[1] * np.sin(t)
        )

    def dh_theta(self, t):
        return (
            self.base.dh_theta(t)
            + self.offset[0] * np.sin(t)
            - self.offset[1] * np.cos(t)
        )

    def d2h_theta(self, t):
        return (
            self.base.d2h_theta(t)
            + self.offset[0] * np.cos(t)
            + self.offset[1] * np.sin(t)
        )


def translate_body(body, q) -> TranslatedBody:
    """Evaluator for the translated body C - q."""
    q = np.asarray(q, dtype=float)
    if isinstance(body, TranslatedBody):
        return TranslatedBody(body.base, body.offset + q)
    return TranslatedBody(body, q)


def _check_unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-10:
        raise ValueError("direction must be a unit vector")
    return v


def eval_h(body, v) -> float:
    """Support function value at a unit direction."""
    return float(body.support(_check_unit(v)))


def grad_h(body, v) -> np.ndarray:
    """Gradient with respect to the round metric: the tangential part
    of the Euclidean gradient of the 1-homogeneous extension."""
    v = _check_unit(v)
    return body.grad_eucl(v) - body.support(v) * v


def boundary_point(body, v) -> np.ndarray:
    """Boundary point with inward normal -v: h(v) v + grad h(v)."""
    v = _check_unit(v)
    return np.asarray(body.grad_eucl(v), dtype=float)


@dataclass
class NormalCount:
    count: int
    critical_directions: list = field(default_factory=list)
    morse_indices: list = field(default_factory=list)
    degenerate: bool = False


def count_normals_2d(body, q) -> NormalCount:
    """Normals to the planar body through q: zeros of
    d/dt [h(t) - q1 cos t - q2 sin t], found by dense sampling and
    bisection, with Morse indices from the second derivative."""
    if body.dim != 2:
        raise ValueError("count_normals_2d requires a planar body")
    q = np.asarray(q, dtype=float)
    t = np.linspace(0.0, 2.0 * np.pi, ANGLE_SAMPLES, endpoint=False)
    fp = body.dh_theta(t) + q[0] * np.sin(t) - q[1] * np.cos(t)
    if np.max(np.abs(fp)) < 1e-9:
        # e.g. the centre of a disc: every normal is concurrent
        return NormalCount(count=0, degenerate=True)
    sign = np.where(fp >= 0.0, 1.0, -1.0)
    flips = np.flatnonzero(sign != np.roll(sign, -1))
    if flips.size == 0:
        return NormalCount(count=0, degenerate=True)
    step = 2.0 * np.pi / ANGLE_SAMPLES
    lo = t[flips]
    hi = lo + step
    flo = fp[flips]
    # vectorised bisection on all brackets at once
    while (hi - lo).max() > BISECT_TOL:
        mid = 0.5 * (lo + hi)
        fmid = body.dh_theta(mid) + q[0] * np.sin(mid) - q[1] * np.cos(mid)
        left = flo * fmid > 0.0
        lo = np.where(left, mid, lo)
        flo = np.where(left, fmid, flo)
        hi = np.where(left, hi, mid)
    roots = 0.5 * (lo + hi)
    roots = _dedup_angles(np.sort(roots))
    fpp = body.d2h_theta(roots) + q[0] * np.cos(roots) + q[1] * np.sin(roots)
    degenerate = bool(np.min(np.abs(fpp)) < SECOND_DERIV_TOL)
    dirs = [np.array([math.cos(r), math.sin(r)]) for r in roots]
    indices = [0 if v > 0.0 else 1 for v in fpp]
    return NormalCount(
        count=len(dirs),
        critical_directions=dirs,
        morse_indices=indices,
        degenerate=degenerate,
    )


def _dedup_angles(sorted_roots: np.ndarray) -> np.ndarray:
    if sorted_roots.size == 0:
        return sorted_roots
    keep = [sorted_roots[0]]
    for r in sorted_roots[1:]:
        if r - keep[-1] > ROOT_DEDUP_ANGLE:
            keep.append(r)
    # wrap-around duplicate
    if len(keep) > 1 and (keep[0] + 2.0 * np.pi) - keep[-1] <= ROOT_DEDUP_ANGLE:
        keep.pop()
    return np.array(keep)


# ---------------------------------------------------------------------------
# spherical mesh and 3-d counting


def _icosahedron():
    phi = (1.0 + math.sqrt(5.0)) / 2.0
    verts = []
    for a, b in ((-1, phi), (1, phi), (-1, -phi), (1, -phi)):
        verts.append((a, b, 0.0))
        verts.append((0.0, a, b))
        verts.append((b, 0.0, a))
    verts = np.array(verts)
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = []
    # faces by brute force: triangles of mutually nearest vertices
    d = np.linalg.norm(verts[:, None, :] - verts[None, :, :], axis=2)
    edge = np.sort(np.unique(np.round(d, 9)))[1]
    for i in range(12):
        for j in range(i + 1, 12):
            if abs(d[i, j] - edge) > 1e-6:
                continue
            for k in range(j + 1, 12):
                if abs(d[i, k] - edge) < 1e-6 and abs(d[j, k] - edge) < 1e-6:
                    faces.append((i, j, k))
    return verts, _orient_faces(verts, faces)


def _orient_faces(verts, faces):
    oriented = []
    for a, b, c in faces:
        n = np.cross(verts[b] - verts[a], verts[c] - verts[a])
        centroid = (verts[a] + verts[b] + verts[c]) / 3.0
        oriented.append((a, b, c) if n @ centroid > 0 else (a, c, b))
    return oriented


@lru_cache(maxsize=4)
def _icosphere(subdivisions: int):
    """Subdivided icosahedral mesh: vertex array plus cyclically
    ordered neighbour rings."""
    verts, faces = _icosahedron()
    verts = [tuple(v) for v in verts]
    for _ in range(subdivisions):
        midpoint = {}
        new_faces = []

        def mid(i, j):
            key = (min(i, j), max(i, j))
            if key not in midpoint:
                m = np.array(verts[i]) + np.array(verts[j])
                m /= np.linalg.norm(m)
                verts.append(tuple(m))
                midpoint[key] = len(verts) - 1
            return midpoint[key]

        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new_faces.extend(
                [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
            )
        faces = new_faces
    varr = np.array(verts)
    succ = [dict() for _ in varr]
    for a, b, c in faces:
        succ[a][b] = c
        succ[b][c] = a
        succ[c][a] = b
    rings = []
    for v, nxt in enumerate(succ):
        start = next(iter(nxt))
        ring = [start]
        while True:
            cur = nxt[ring[-1]]
            if cur == start:
                break
            ring.append(cur)
        rings.append(ring)
    return varr, rings


def _tangent_basis(v):
    pivot = np.zeros(3)
    pivot[int(np.argmin(np.abs(v)))] = 1.0
    t1 = np.cross(v, pivot)
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(v, t1)
    return t1, t2


def _sphere_newton(body, q, v, max_iter=50):
    """Newton iteration for a critical point of h(v) - <q, v> on S^2,
    in a moving 2-d tangent chart.  Returns (v, hess2) or None."""
    for _ in range(max_iter):
        grad = body.grad_eucl(v) - q
        f = grad @ v
        grad_r = grad - f * v
        t1, t2 = _tangent_basis(v)
        hess = body.hess_eucl(v)
        proj = np.stack([t1, t2])
        hess2 = proj @ hess @ proj.T - f * np.eye(2)
        rhs = np.array([grad_r @ t1, grad_r @ t2])
        if np.linalg.norm(grad_r) <= 1e-10:
            return v, hess2
        try:
            delta = np.linalg.solve(hess2, rhs)
        except np.linalg.LinAlgError:
            return None
        nv = v - delta[0] * t1 - delta[1] * t2
        nrm = np.linalg.norm(nv)
        if not np.isfinite(nrm) or nrm < 1e-12:
            return None
        v = nv / nrm
    return None


def count_normals_3d(body, q, subdivisions: int = MESH_SUBDIVISIONS) -> NormalCount:
    """Normals to the 3-d body through q: critical points of
    h(v) - <q, v> on S^2, seeded from extremum and saddle candidates
    of an icosahedral mesh and refined by Newton."""
    if body.dim != 3:
        raise ValueError("count_normals_3d requires a 3-d body")
    q = np.asarray(q, dtype=float)
    verts, rings = _icosphere(subdivisions)
    f = body.support(verts) - verts @ q
    edge_angle = 1.107148717794090 / 2**subdivisions  # icosahedron edge arc
    seeds = []
    for v, ring in enumerate(rings):
        diffs = f[ring] - f[v]
        if np.all(diffs > 0) or np.all(diffs < 0):
            seeds.append(v)
            continue
        sign = np.where(diffs >= 0, 1, -1)
        if np.count_nonzero(sign != np.roll(sign, -1)) >= 4:
            seeds.append(v)
    found = []
    hessians = []
    for s in seeds:
        out = _sphere_newton(body, q, verts[s].copy())
        if out is None:
            continue
        root, hess2 = out
        drift = math.acos(float(np.clip(root @ verts[s], -1.0, 1.0)))
        if drift > 2.0 * edge_angle:
            raise MeshTooCoarseError(
                f"critical point migrated {drift:.3g} rad from its seed; "
                "increase the mesh subdivision"
            )
        dup = False
        for other in found:
            if math.acos(float(np.clip(root @ other, -1.0, 1.0))) < 1e-6:
                dup = True
                break
        if not dup:
            found.append(root)
            hessians.append(hess2)
    degenerate = False
    indices = []
    for hess2 in hessians:
        if abs(np.linalg.det(hess2)) < HESS_DET_TOL:
            degenerate = True
        indices.append(int(np.sum(np.linalg.eigvalsh(hess2) < 0.0)))
    return NormalCount(
        count=len(found),
        critical_directions=found,
        morse_indices=indices,
        degenerate=degenerate,
    )


def count_normals(body, q) -> NormalCount:
    """Dispatch on the body dimension (2 or 3)."""
    if body.dim == 2:
        return count_normals_2d(body, q)
    if body.dim == 3:
        return count_normals_3d(body, q)
    raise ValueError("normal counting supports dimensions 2 and 3")


# ---------------------------------------------------------------------------
# caustic grids and the evolute


@dataclass
class CausticGrid:
    """Concurrent-normal counts on a rectangular grid; -1 marks a
    degenerate cell."""

    bbox: tuple  # (xmin, ymin, xmax, ymax)
    resolution: int
    counts: np.ndarray  # (resolution, resolution), indexed [ix, iy]
    in_body: np.ndarray  # same shape, boolean

    def xs(self):
        return np.linspace(self.bbox[0], self.bbox[2], self.resolution)

    def ys(self):
        return np.linspace(self.bbox[1], self.bbox[3], self.resolution)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x", "y", "count", "in_body"])
        xs, ys = self.xs(), self.ys()
        for ix, x in enumerate(xs):
            for iy, y in enumerate(ys):
                writer.writerow(
                    [
                        format(x, ".17g"),
                        format(y, ".17g"),
                        int(self.counts[ix, iy]),
                        int(self.in_body[ix, iy]),
                    ]
                )
        return buf.getvalue()

    def to_pgm(self) -> str:
        """Portable graymap: counts scaled into [0, 200], degenerate
        cells in a sentinel band at 255."""
        maxc = max(1, int(self.counts.max()))
        lines = ["P2", f"{self.resolution} {self.resolution}", "255"]
        for iy in range(self.resolution - 1, -1, -1):  # top row = max y
            row = []
            for ix in range(self.resolution):
                c = self.counts[ix, iy]
                row.append("255" if c < 0 else str(int(200 * c / maxc)))
            lines.append(" ".join(row))
        return "\n".join(lines) + "\n"


def caustic_grid(body, bbox, resolution: int) -> CausticGrid:
    """count_normals_2d at every node of a resolution^2 grid over bbox
    = (xmin, ymin, xmax, ymax)."""
    if body.dim != 2:
        raise ValueError("caustic grids are 2-d")
    if resolution < 2:
        raise ValueError("resolution must be >= 2")
    xmin, ymin, xmax, ymax = (float(b) for b in bbox)
    xs = np.linspace(xmin, xmax, resolution)
    ys = np.linspace(ymin, ymax, resolution)
    t = np.linspace(0.0, 2.0 * np.pi, ANGLE_SAMPLES, endpoint=False)
    hvals = body.h_theta(t)
    cos_t, sin_t = np.cos(t), np.sin(t)
    counts = np.zeros((resolution, resolution), dtype=int)
    inside = np.zeros((resolution, resolution), dtype=bool)
    for ix, x in enumerate(xs):
        for iy, y in enumerate(ys):
            res = count_normals_2d(body, (x, y))
            counts[ix, iy] = -1 if res.degenerate else res.count
            inside[ix, iy] = bool(np.min(hvals - x * cos_t - y * sin_t) >= 0.0)
    return CausticGrid(
        bbox=(xmin, ymin, xmax, ymax),
        resolution=resolution,
        counts=counts,
        in_body=inside,
    )


def evolute_2d(body, samples: int) -> np.ndarray:
    """Locus of curvature centres c(t) = (-h'' cos t - h' sin t,
    -h'' sin t + h' cos t) at uniform angles."""
    if body.dim != 2:
        raise ValueError("the evolute is 2-d")
    t = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    dh = body.dh_theta(t)
    d2h = body.d2h_theta(t)
    return np.stack(
        [-d2h * np.cos(t) - dh * np.sin(t), -d2h * np.sin(t) + dh * np.cos(t)],
        axis=1,
    )
