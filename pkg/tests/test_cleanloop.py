import math

import numpy as np
import pytest

from surplusect.cleanloop import (
    clean_loop_member,
    clean_loop_point,
    membership_defect,
    moment_map,
    verify_intersection_structure,
)
from surplusect.core import ProjectivePoint


def test_loop_points_are_members_of_their_own_member():
    gen = np.random.default_rng(1)
    for _ in range(200):
        t = gen.uniform(-2.0, 2.0)
        a = gen.standard_normal(3)
        z = clean_loop_point(t, a)
        assert membership_defect(t, z) < 1e-12


def test_isolated_point_and_circle_belong_to_every_member():
    pole = ProjectivePoint([0.0, 0.0, 1.0])
    for t in np.linspace(-1.0, 2.0, 31):
        assert clean_loop_member(t, pole)
        # arbitrary points of the circle {[a : b : 0] : |a| = |b|}
        for phase in (0.0, 0.7, 2.1):
            circ = ProjectivePoint([1.0, np.exp(1j * phase), 0.0])
            assert clean_loop_member(t, circ)


def test_generic_points_are_not_members():
    assert not clean_loop_member(0.0, ProjectivePoint([1.0, 0.0, 0.0]))
    assert not clean_loop_member(0.25, ProjectivePoint([1.0, 2.0, 0.5]))
    # a point of L_0 off the common locus is not in L_{1/3}
    z = clean_loop_point(0.0, (1.0, 0.5, 0.8))
    assert membership_defect(1.0 / 3.0, z) > 1e-3


def test_defect_is_one_periodic():
    gen = np.random.default_rng(2)
    for _ in range(100):
        t = gen.uniform(0.0, 1.0)
        z = ProjectivePoint(gen.standard_normal(3) + 1j * gen.standard_normal(3))
        d0 = membership_defect(t, z)
        d1 = membership_defect(t + 1.0, z)
        assert d0 == pytest.approx(d1, abs=1e-12)


def test_loop_closes_up_setwise():
    # the parametrisation at t + 1 retraces the same subset: flipping
    # the sign of the third parameter undoes the monodromy
    gen = np.random.default_rng(3)
    for _ in range(100):
        t = gen.uniform(-1.0, 1.0)
        a = gen.standard_normal(3)
        p = clean_loop_point(t + 1.0, a)
        q = clean_loop_point(t, (a[0], a[1], -a[2]))
        assert p == q


def test_membership_is_phase_invariant():
    z = clean_loop_point(0.4, (0.3, -1.2, 0.7)).vec
    for phase in (0.0, 1.0, 2.5):
        assert membership_defect(0.4, z * np.exp(1j * phase)) < 1e-12


def test_moment_map_values():
    assert moment_map(ProjectivePoint([1.0, 0.0, 0.0])) == pytest.approx((0.5, 0.0))
    assert moment_map(ProjectivePoint([0.0, 0.0, 1.0])) == pytest.approx((0.0, 0.0))
    third = moment_map(ProjectivePoint([1.0, 1.0, 1.0]))
    assert third == pytest.approx((1.0 / 6.0, 1.0 / 6.0))


def test_loop_lies_over_the_diagonal():
    gen = np.random.default_rng(4)
    for _ in range(100):
        z = clean_loop_point(gen.uniform(0, 1), gen.standard_normal(3))
        x, y = moment_map(z)
        assert x == pytest.approx(y, abs=1e-12)


def test_structure_report_passes():
    report = verify_intersection_structure(0.1, 0.4, samples=2000, seed=0)
    assert report.passed
    counts = report.to_dict()["class_counts"]
    assert (
        counts["isolated_point"] + counts["common_circle"] + counts["generic"]
        == 2000
    )
    assert report.min_generic_defect > 1e-9
    # adjacent members a third of a period apart
    assert verify_intersection_structure(0.0, 1.0 / 3.0, samples=2000, seed=1).passed


def test_structure_validation():
    with pytest.raises(ValueError):
        verify_intersection_structure(0.2, 1.2, samples=2000)
    with pytest.raises(ValueError):
        verify_intersection_structure(0.1, 0.4, samples=10)
    with pytest.raises(ValueError):
        clean_loop_point(0.0, (0.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        clean_loop_member(0.0, ProjectivePoint([1, 0, 0]), tol=0.0)


def test_defect_scale():
    # the defect is an honest distance proxy: small perturbations give
    # proportionally small defects
    base = clean_loop_point(0.2, (1.0, 0.4, 0.6)).vec
    for eps in (1e-4, 1e-6, 1e-8):
        bumped = base + eps * np.array([1.0, -0.5j, 0.25])
        d = membership_defect(0.2, bumped / np.linalg.norm(bumped))
        assert d < 10 * eps
        assert d > eps / 100 or math.isclose(d, 0.0)
