"""Counting intersections of the Clifford torus with unitary images of
real projective space.

A point [x] lies on the torus iff all coordinate moduli agree; writing
x = g a^T with a real turns membership into the vanishing of n real
quadratic forms on RP^n.  For n = 2 the two conics are intersected
exactly by the pencil method; for general n a multistart damped-Newton
search counts the common zeros.  The RP^n-vs-RP^n count used to
calibrate the Crofton constant reduces to the spectrum of a symmetric
unitary matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import RngState, canonicalize, canonicalize_real, check_unitary
from .errors import BudgetExceededError, DegenerateError

SYMMETRY_TOL = 1e-12
TRANSVERSALITY_SIGMA = 1e-7
DEDUP_DISTANCE = 1e-6
WITNESS_RESIDUAL = 1e-8
EIGEN_GAP = 1e-8


@dataclass(frozen=True)
class QuadricSystem:
    """n real symmetric forms on RP^n whose common zeros are the
    torus intersection points."""

    n: int
    forms: np.ndarray  # shape (n, n+1, n+1)

    def __post_init__(self):
        forms = np.asarray(self.forms, dtype=float)
        if forms.shape != (self.n, self.n + 1, self.n + 1):
            raise ValueError("forms must have shape (n, n+1, n+1)")
        if np.max(np.abs(forms - forms.transpose(0, 2, 1))) > SYMMETRY_TOL:
            raise ValueError("forms must be symmetric")
        object.__setattr__(self, "forms", forms)


@dataclass
class CountResult:
    count: int
    witnesses: list = field(default_factory=list)
    transverse: bool = False
    min_jacobian_sigma: float = 0.0
    degenerate: bool = False


def clifford_quadric_system(g: np.ndarray) -> QuadricSystem:
    """Build Q_i = Re(H_{i+1} - H_1), (H_m)_{jk} = g_{mj} conj(g_{mk}),
    whose common real projective zeros correspond to torus points in
    the image of the real span of g's columns."""
    g = check_unitary(g)
    dim = g.shape[0]
    n = dim - 1
    if n < 1:
        raise ValueError("need at least a 2x2 unitary")
    h = g[:, :, None] * g.conj()[:, None, :]  # H_m stacked over m
    forms = (h[1:] - h[0]).real
    forms = 0.5 * (forms + forms.transpose(0, 2, 1))  # kill float asymmetry
    return QuadricSystem(n=n, forms=forms)


def torus_point(g: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Canonical representative of the torus point [g a^T] for a real
    coefficient vector a."""
    return canonicalize(np.asarray(g) @ np.asarray(a, dtype=float))


def _dedup_projective(vectors, radius=DEDUP_DISTANCE):
    """Greedy deduplication of canonical representatives at the given
    projective distance."""
    kept = []
    for v in vectors:
        dup = False
        for w in kept:
            if abs(np.vdot(v, w)) >= np.cos(radius):
                dup = True
                break
        if not dup:
            kept.append(v)
    return kept


def _witness_sigma(forms: np.ndarray, a: np.ndarray) -> float:
    """Smallest singular value of the constraint Jacobian [Q_i a] at a
    root; the rows are automatically tangent to the sphere there."""
    jac = forms @ a
    if jac.shape[0] == 2:
        # closed-form smallest singular value via the 2x2 Gram matrix
        g00 = jac[0] @ jac[0]
        g11 = jac[1] @ jac[1]
        g01 = jac[0] @ jac[1]
        half = 0.5 * (g00 + g11)
        rad = np.sqrt(0.25 * (g00 - g11) ** 2 + g01 * g01)
        return float(np.sqrt(max(0.0, half - rad)))
    return float(np.linalg.svd(jac, compute_uv=False)[-1])


def _polish(forms: np.ndarray, a: np.ndarray, iters: int = 5) -> np.ndarray:
    """A few Newton steps on {a^T Q_i a = 0, |a|^2 = 1}."""
    for _ in range(iters):
        qa = forms @ a
        f = np.concatenate([qa @ a, [a @ a - 1.0]])
        jac = np.vstack([2.0 * qa, 2.0 * a[None, :]])
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError:
            break
        a = a - step
        a = a / np.linalg.norm(a)
    return a


def _residual(forms: np.ndarray, a: np.ndarray) -> float:
    return float(np.max(np.abs((forms @ a) @ a)))


def _certify(sys: QuadricSystem, roots):
    """Polish (where needed), validate and deduplicate candidate roots;
    returns the witness list, possibly empty.

    Candidates further than 1e-6 in residual are discarded without
    polishing: exact-algebra candidates land at ~1e-12, and points that
    far off (e.g. the crossing point of a split member's lines) are not
    intersection points at all.
    """
    if not roots:
        return []
    arr = np.asarray(roots, dtype=float)
    # normalise first: the quadric residual scales quadratically with
    # the representative's norm, so unnormalised candidates would be
    # held to an unintended threshold
    arr = arr / np.linalg.norm(arr, axis=1, keepdims=True)
    qa = np.einsum("qij,mj->mqi", sys.forms, arr)
    res = np.max(np.abs(np.einsum("mqi,mi->mq", qa, arr)), axis=1)
    good = []
    for a, r in zip(arr, res):
        if r > 1e-11:
            if r > 1e-6:
                continue
            a = _polish(sys.forms, a)
            if _residual(sys.forms, a) > WITNESS_RESIDUAL:
                continue
        good.append(canonicalize_real(a))
    return _dedup_projective(good)


def _finalize_clifford(sys: QuadricSystem, roots) -> CountResult:
    """Validate, deduplicate and certify a list of candidate roots."""
    return _finalize_witnesses(sys, _certify(sys, roots))


def _finalize_witnesses(sys: QuadricSystem, witnesses) -> CountResult:
    if not witnesses:
        raise DegenerateError("no certified real intersection points found")
    sigma = min(_witness_sigma(sys.forms, a) for a in witnesses)
    if sigma <= TRANSVERSALITY_SIGMA:
        raise DegenerateError(
            f"witness fails transversality (sigma={sigma:.3e}); resample"
        )
    count = len(witnesses)
    lo, hi = 2 ** ((sys.n + 1) // 2), 2**sys.n
    if count % 2 != 0 or not (lo <= count <= hi):
        raise RuntimeError(
            f"certified-transverse count {count} outside even range "
            f"[{lo}, {hi}] for n={sys.n}: suspected numerical failure"
        )
    return CountResult(
        count=count,
        witnesses=witnesses,
        transverse=True,
        min_jacobian_sigma=sigma,
        degenerate=False,
    )


# ---------------------------------------------------------------------------
# exact pencil method, n = 2


def _det3(m: np.ndarray) -> float:
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def _real_cubic_roots(c3: float, c2: float, c1: float, c0: float):
    """Real roots of c3 x^3 + c2 x^2 + c1 x + c0 (Cardano/trigonometric
    closed form), degree-degrading for vanishing leading coefficients."""
    import math

    scale = max(abs(c3), abs(c2), abs(c1), abs(c0))
    if scale == 0.0:
        return []
    if abs(c3) <= 1e-13 * scale:
        if abs(c2) <= 1e-13 * scale:
            return [] if abs(c1) <= 1e-13 * scale else [-c0 / c1]
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0.0:
            return []
        root = math.sqrt(disc)
        return [(-c1 + root) / (2 * c2), (-c1 - root) / (2 * c2)]
    b, c, d = c2 / c3, c1 / c3, c0 / c3
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = 0.25 * q * q + p**3 / 27.0
    if disc > 0.0:
        s = math.sqrt(disc)
        u = math.copysign(abs(-0.5 * q + s) ** (1.0 / 3.0), -0.5 * q + s)
        v = math.copysign(abs(-0.5 * q - s) ** (1.0 / 3.0), -0.5 * q - s)
        return [u + v + shift]
    if p >= 0.0:  # disc <= 0 forces p <= 0; p == 0 -> triple root
        return [shift]
    m = 2.0 * math.sqrt(-p / 3.0)
    arg = 3.0 * q / (p * m)
    theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
    return [m * math.cos(theta - 2.0 * math.pi * k / 3.0) + shift for k in range(3)]


def _pencil_members(q1: np.ndarray, q2: np.ndarray):
    """Degenerate (rank <= 2) members of the conic pencil, as a list of
    eigendecompositions (w, v), most cleanly degenerate first."""
    # det(Q1 + x Q2) is cubic in x; coefficients from four evaluations
    d0 = _det3(q1)
    dp = _det3(q1 + q2)
    dm = _det3(q1 - q2)
    d3 = _det3(q2)
    c1 = (dp - dm) / 2.0 - d3
    c2 = (dp + dm) / 2.0 - d0
    members = []
    for root in _real_cubic_roots(d3, c2, c1, d0):
        c = q1 + root * q2
        members.append(c / np.linalg.norm(c))
    if abs(d3) < 1e-10:
        members.append(q2 / np.linalg.norm(q2))
    decomps = [np.linalg.eigh(c) for c in members]
    decomps.sort(key=lambda wv: abs(wv[0]).min())
    return decomps


def _split_conic(decomp):
    """Split a degenerate conic (given by its eigendecomposition) into
    real lines.

    Returns (lines, kernel): for signature (1,1,0) two real lines, for
    a definite rank-2 conic no real lines (the kernel is then the only
    real point), for rank 1 the single (double) line."""
    w, v = decomp
    order = np.argsort(np.abs(w))
    kernel = v[:, order[0]]
    e1, e2 = w[order[1]], w[order[2]]
    v1, v2 = v[:, order[1]], v[:, order[2]]
    scale = abs(w[order[2]])
    if scale < 1e-12:
        return [], kernel  # zero matrix; caller treats as degenerate
    if abs(e1) < 1e-7 * scale:
        return [v2], kernel  # rank 1: double line
    if e1 * e2 < 0:
        if e1 > 0:
            e1, e2, v1, v2 = e2, e1, v2, v1
        sp, sn = np.sqrt(e2), np.sqrt(-e1)
        return [sp * v2 + sn * v1, sp * v2 - sn * v1], kernel
    return [], kernel


def _null_basis(line: np.ndarray):
    """Orthonormal basis of the plane {a : a . line = 0} in R^3."""
    n = line / np.linalg.norm(line)
    pivot = np.zeros(3)
    pivot[int(np.argmin(np.abs(n)))] = 1.0
    b1 = _cross3(n, pivot)
    b1 /= np.linalg.norm(b1)
    b2 = _cross3(n, b1)
    return b1, b2


def _cross3(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.array(
        [
            u[1] * v[2] - u[2] * v[1],
            u[2] * v[0] - u[0] * v[2],
            u[0] * v[1] - u[1] * v[0],
        ]
    )


def _line_conic_points(line: np.ndarray, q1: np.ndarray, q2: np.ndarray):
    """Real intersection points of a projective line with the pencil's
    base locus, found by restricting a conic to the line."""
    b1, b2 = _null_basis(line)
    for q in (q1, q2):
        al = b1 @ q @ b1
        be = b1 @ q @ b2
        ga = b2 @ q @ b2
        mag = max(abs(al), abs(be), abs(ga))
        if mag < 1e-10:
            continue  # line lies inside this conic; try the other
        disc = be * be - al * ga
        pts = []
        if disc < -1e-12 * mag * mag:
            return []
        root = np.sqrt(max(disc, 0.0))
        if abs(al) >= abs(ga):
            for s in (+1.0, -1.0):
                r = (-be + s * root) / al
                pts.append(r * b1 + b2)
        else:
            for s in (+1.0, -1.0):
                m = (-be + s * root) / ga
                pts.append(b1 + m * b2)
        return pts
    raise DegenerateError("line contained in both conics (positive-dimensional)")


def count_conic_pencil(sys: QuadricSystem) -> CountResult:
    """Exact real intersection count of the two conics (n = 2) via a
    degenerate pencil member split into lines."""
    if sys.n != 2:
        raise ValueError("pencil method requires n = 2")
    q1, q2 = sys.forms
    members = _pencil_members(q1, q2)
    if not members:
        raise DegenerateError("pencil has no usable degenerate member")
    # A member that splits into two real lines carries every real base
    # point, so the first member yielding >= 2 certified witnesses is
    # complete and we can stop there.
    leftovers = []
    for decomp in members:
        lines, kernel = _split_conic(decomp)
        candidates = []
        for line in lines:
            candidates.extend(_line_conic_points(line, q1, q2))
        candidates.append(kernel)
        if len(lines) == 2:
            witnesses = _certify(sys, candidates)
            if len(witnesses) >= 2:
                return _finalize_witnesses(sys, witnesses)
        leftovers.extend(candidates)
    return _finalize_clifford(sys, leftovers)


# ---------------------------------------------------------------------------
# multistart Newton, general n


def _newton_all(forms: np.ndarray, starts: np.ndarray, max_iter: int = 60):
    """Damped Newton on {a^T Q_i a = 0, |a|^2 = 1} from many starts at
    once.  Returns (roots, n_converged)."""
    a = starts.copy()
    active = np.arange(a.shape[0])
    roots = []
    for _ in range(max_iter):
        if active.size == 0:
            break
        cur = a[active]
        qa = np.einsum("qij,mj->mqi", forms, cur)
        f = np.einsum("mqi,mi->mq", qa, cur)
        fn = (cur * cur).sum(axis=1) - 1.0
        fall = np.concatenate([f, fn[:, None]], axis=1)
        res = np.max(np.abs(fall), axis=1)
        done = res <= 1e-12
        if np.any(done):
            roots.append(cur[done])
            keep = ~done
            active = active[keep]
            cur = cur[keep]
            qa = qa[keep]
            fall = fall[keep]
        if active.size == 0:
            break
        jac = np.concatenate([2.0 * qa, 2.0 * cur[:, None, :]], axis=1)
        # regularise so singular Jacobians do not abort the whole batch
        jac += 1e-14 * np.eye(jac.shape[1])[None, :, :]
        try:
            step = np.linalg.solve(jac, fall[..., None])[..., 0]
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(
                jac.reshape(-1, jac.shape[1], jac.shape[2])[0], fall[0], rcond=None
            )[0][None, :]
        norms = np.linalg.norm(step, axis=1, keepdims=True)
        step = step / np.maximum(1.0, norms)  # clip step length at 1
        nxt = cur - step
        nrm = np.linalg.norm(nxt, axis=1, keepdims=True)
        bad = ~np.isfinite(nrm[:, 0]) | (nrm[:, 0] < 1e-12)
        if np.any(bad):
            active = active[~bad]
            nxt = nxt[~bad]
            nrm = nrm[~bad]
        a[active] = nxt / nrm
    converged = sum(len(r) for r in roots)
    if roots:
        return np.concatenate(roots, axis=0), converged
    return np.empty((0, forms.shape[1])), 0


def count_clifford_multistart(
    sys: QuadricSystem, starts_per_dim: int = 200, rng: RngState | None = None
) -> CountResult:
    """Count common real projective zeros of the quadric system by
    damped Newton from starts_per_dim * 2^n random sphere starts.

    Counts in n >= 3 carry a completeness caveat: the search is
    heuristic and can in principle miss a root with tiny basins.
    """
    if not (1 <= sys.n <= 5):
        raise ValueError("multistart counting supports 1 <= n <= 5")
    if starts_per_dim < 100:
        raise ValueError("starts_per_dim must be >= 100")
    if rng is None:
        rng = RngState(0)
    gen = rng.generator()
    m = starts_per_dim * 2**sys.n
    starts = gen.standard_normal((m, sys.n + 1))
    starts /= np.linalg.norm(starts, axis=1, keepdims=True)
    roots, converged = _newton_all(sys.forms, starts)
    if converged < 0.01 * m:
        raise BudgetExceededError(
            f"Newton converged from only {converged}/{m} starts"
        )
    return _finalize_clifford(sys, list(roots))


# ---------------------------------------------------------------------------
# RP^n vs g RP^n calibration count


def count_rpn_rpn(g: np.ndarray) -> CountResult:
    """Count RP^n intersect g RP^n via the spectrum of the symmetric
    unitary N = g^dagger conj(g): each simple eigenvalue contributes
    one real projective intersection point [g b]."""
    g = check_unitary(g)
    nmat = g.conj().T @ g.conj()
    w, v = np.linalg.eig(nmat)
    dim = len(w)
    witnesses = []
    min_gap = np.inf
    degenerate = False
    for i in range(dim):
        gaps = [abs(w[i] - w[j]) for j in range(dim) if j != i]
        gap = min(gaps)
        min_gap = min(min_gap, gap)
        if gap <= EIGEN_GAP:
            degenerate = True
            continue
        vec = v[:, i]
        k = int(np.argmax(np.abs(vec)))
        aligned = vec * (vec[k].conjugate() / abs(vec[k]))
        if np.max(np.abs(aligned.imag)) > 1e-6:
            degenerate = True  # eigenspace not conjugation-stable at tol
            continue
        b = aligned.real / np.linalg.norm(aligned.real)
        witnesses.append(canonicalize(g @ b))
    witnesses = _dedup_projective(witnesses)
    return CountResult(
        count=len(witnesses),
        witnesses=witnesses,
        transverse=not degenerate,
        min_jacobian_sigma=float(min_gap if np.isfinite(min_gap) else 0.0),
        degenerate=degenerate,
    )
