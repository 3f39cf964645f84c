import math

import numpy as np
import pytest

from surplusect.normals import (
    Ellipsoid,
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


def _unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


BODIES_2D = [
    Ellipsoid((2.0, 1.0)),
    TrigPolynomial2D(c0=1.0, cos_coeffs=(0.0, 0.08), sin_coeffs=(0.0, 0.05)),
]


def test_support_values():
    e = Ellipsoid((2.0, 1.0))
    assert eval_h(e, (1.0, 0.0)) == pytest.approx(2.0)
    assert eval_h(e, (0.0, -1.0)) == pytest.approx(1.0)
    v = _unit((1.0, 1.0))
    assert eval_h(e, v) == pytest.approx(math.sqrt(2.5))
    with pytest.raises(ValueError):
        eval_h(e, (1.0, 1.0))


def test_gradient_matches_finite_differences():
    gen = np.random.default_rng(3)
    for body in BODIES_2D + [Ellipsoid((1.0, 1.5, 2.0))]:
        dim = body.dim
        for _ in range(20):
            v = _unit(gen.standard_normal(dim))
            g = grad_h(body, v)
            # tangential directional derivatives along an orthonormal
            # tangent frame, via central differences on the sphere
            basis = [w - (w @ v) * v for w in np.eye(dim)]
            basis = [w / np.linalg.norm(w) for w in basis if np.linalg.norm(w) > 0.5]
            eps = 1e-6
            for w in basis:
                plus = body.support(_unit(v + eps * w))
                minus = body.support(_unit(v - eps * w))
                fd = (plus - minus) / (2 * eps)
                assert abs(g @ w - fd) < 1e-6


def test_angle_derivatives_match_finite_differences():
    for body in BODIES_2D:
        t = np.linspace(0.1, 2 * np.pi, 17)
        eps = 1e-6
        fd1 = (body.h_theta(t + eps) - body.h_theta(t - eps)) / (2 * eps)
        fd2 = (body.dh_theta(t + eps) - body.dh_theta(t - eps)) / (2 * eps)
        assert np.max(np.abs(body.dh_theta(t) - fd1)) < 1e-6
        assert np.max(np.abs(body.d2h_theta(t) - fd2)) < 1e-6


def test_boundary_point_lies_on_ellipse():
    e = Ellipsoid((2.0, 1.0))
    for t in np.linspace(0, 2 * np.pi, 37):
        v = np.array([math.cos(t), math.sin(t)])
        x, y = boundary_point(e, v)
        assert x**2 / 4.0 + y**2 == pytest.approx(1.0, abs=1e-12)
        # the outward normal at the boundary point is v itself
        normal = _unit((x / 4.0, y))
        assert np.allclose(normal, v, atol=1e-12)


def test_convexity_check_rejects_bad_support_function():
    with pytest.raises(ValueError):
        TrigPolynomial2D(c0=1.0, cos_coeffs=(0.0, 0.9))


def test_ellipse_counts_across_the_evolute():
    e = Ellipsoid((2.0, 1.0))
    inside = count_normals_2d(e, (0.0, 0.0))
    assert inside.count == 4 and not inside.degenerate
    assert sorted(inside.morse_indices) == [0, 0, 1, 1]
    outside = count_normals_2d(e, (1.8, 0.0))
    assert outside.count == 2 and not outside.degenerate
    assert sorted(outside.morse_indices) == [0, 1]
    off_axis = count_normals_2d(e, (0.3, 0.2))
    assert off_axis.count == 4


def test_disc_centre_is_degenerate():
    disc = Ellipsoid((1.0, 1.0))
    res = count_normals_2d(disc, (0.0, 0.0))
    assert res.degenerate
    generic = count_normals_2d(disc, (0.4, 0.1))
    assert generic.count == 2


def test_critical_directions_are_normals():
    # each critical direction v must point along q - boundary_point
    e = Ellipsoid((2.0, 1.0))
    q = np.array([0.3, 0.25])
    res = count_normals_2d(e, q)
    for v in res.critical_directions:
        p = boundary_point(e, v)
        chord = q - p
        assert abs(chord[0] * v[1] - chord[1] * v[0]) < 1e-9


def test_translate_body_consistency():
    body = BODIES_2D[1]
    q = (0.15, -0.1)
    a = count_normals_2d(body, q)
    b = count_normals_2d(translate_body(body, q), (0.0, 0.0))
    assert a.count == b.count
    assert sorted(a.morse_indices) == sorted(b.morse_indices)
    nested = translate_body(translate_body(body, (0.1, 0.0)), (0.05, -0.1))
    assert nested.offset == pytest.approx([0.15, -0.1])


def test_evolute_of_ellipse_is_astroid():
    a, b = 2.0, 1.0
    e = Ellipsoid((a, b))
    pts = evolute_2d(e, 256)
    t = np.linspace(0.0, 2.0 * np.pi, 256, endpoint=False)
    # the evolute is sampled by normal angle t; the classical astroid
    # parametrisation uses the ellipse angle phi with
    # (cos phi, sin phi) proportional to (a cos t, b sin t)
    phi = np.arctan2(b * np.sin(t), a * np.cos(t))
    c = (a * a - b * b)
    ref = np.stack([c / a * np.cos(phi) ** 3, -c / b * np.sin(phi) ** 3], axis=1)
    assert np.max(np.abs(pts - ref)) < 1e-12


def test_caustic_grid_small():
    e = Ellipsoid((2.0, 1.0))
    grid = caustic_grid(e, (-2.0, -1.0, 2.0, 1.0), 9)
    assert grid.counts.shape == (9, 9)
    assert set(np.unique(grid.counts)) <= {-1, 2, 4}
    # the centre cell is inside the evolute, the far corner outside
    assert grid.counts[4, 4] == 4
    assert grid.counts[0, 0] == 2
    assert grid.in_body[4, 4]
    assert not grid.in_body[0, 0]
    csv_text = grid.to_csv()
    assert csv_text.startswith("x,y,count,in_body\n")
    assert len(csv_text.strip().split("\n")) == 1 + 81
    pgm = grid.to_pgm()
    assert pgm.startswith("P2\n9 9\n255\n")


def test_ellipsoid_3d_centre():
    body = Ellipsoid((1.0, 1.5, 2.0))
    res = count_normals_3d(body, (0.0, 0.0, 0.0))
    assert res.count == 6
    assert not res.degenerate
    assert sorted(res.morse_indices) == [0, 0, 1, 1, 2, 2]
    # Euler characteristic of S^2 from the alternating sum
    assert sum((-1) ** i for i in res.morse_indices) == 2
    # the critical directions are the six semi-axis directions
    for v in res.critical_directions:
        assert np.sort(np.abs(v))[-1] == pytest.approx(1.0, abs=1e-8)


def test_ellipsoid_3d_generic_point():
    body = Ellipsoid((1.0, 1.5, 2.0))
    res = count_normals_3d(body, (0.05, 0.04, 0.03))
    assert res.count == 6
    assert sum((-1) ** i for i in res.morse_indices) == 2
    far = count_normals_3d(body, (3.0, 2.5, 2.0))
    assert far.count == 2
    assert sorted(far.morse_indices) == [0, 2]


def test_count_normals_dispatch():
    assert count_normals(Ellipsoid((2.0, 1.0)), (0.0, 0.0)).count == 4
    assert count_normals(Ellipsoid((1.0, 1.5, 2.0)), (0.0, 0.0, 0.0)).count == 6
    with pytest.raises(ValueError):
        count_normals(Ellipsoid((1.0, 1.0, 1.0, 1.0)), (0, 0, 0, 0))


def test_subdivision_stability():
    body = Ellipsoid((1.0, 1.3, 1.7))
    q = (0.1, -0.05, 0.2)
    a = count_normals_3d(body, q, subdivisions=5)
    b = count_normals_3d(body, q, subdivisions=6)
    assert a.count == b.count
    assert sorted(a.morse_indices) == sorted(b.morse_indices)
