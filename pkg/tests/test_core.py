import math

import numpy as np
import pytest

from surplusect.core import (
    ProjectivePoint,
    RngState,
    canonicalize,
    haar_unitary,
    projective_distance,
    unitarity_defect,
    vol_rpn,
)


def test_vol_rpn_values():
    assert vol_rpn(1) == pytest.approx(math.pi, rel=1e-14)
    assert vol_rpn(2) == pytest.approx(2 * math.pi, rel=1e-14)
    # n = 3 evaluated independently: pi^2 / Gamma(2) = pi^2
    assert vol_rpn(3) == pytest.approx(math.pi**2, rel=1e-13)


def test_projective_distance_examples():
    e0 = ProjectivePoint([1, 0, 0])
    e1 = ProjectivePoint([0, 1, 0])
    mix = ProjectivePoint([1, 1, 0])
    assert projective_distance(e0, e0) == 0.0
    assert projective_distance(e0, e1) == pytest.approx(math.pi / 2, abs=1e-14)
    assert projective_distance(e0, mix) == pytest.approx(math.pi / 4, abs=1e-12)


def test_projective_distance_is_a_metric():
    gen = np.random.default_rng(11)
    for _ in range(200):
        p, q, r = (
            ProjectivePoint(gen.standard_normal(4) + 1j * gen.standard_normal(4))
            for _ in range(3)
        )
        assert projective_distance(p, q) == pytest.approx(
            projective_distance(q, p), abs=1e-14
        )
        # acos(1 - eps) ~ sqrt(2 eps), so exact coincidence still shows
        # up as ~1e-8
        assert projective_distance(p, p) <= 1e-7
        assert (
            projective_distance(p, r)
            <= projective_distance(p, q) + projective_distance(q, r) + 1e-7
        )


def test_canonical_phase():
    v = canonicalize([0, 1j * 2.0, 1.0])
    assert abs(np.linalg.norm(v) - 1.0) < 1e-12
    lead = v[np.flatnonzero(np.abs(v) > 1e-9)[0]]
    assert abs(lead.imag) < 1e-14 and lead.real > 0


def test_haar_unitarity_and_determinism():
    for stream in range(20):
        u = haar_unitary(3, RngState(42, stream))
        assert unitarity_defect(u) <= 1e-10
    a = haar_unitary(4, RngState(7, 3))
    b = haar_unitary(4, RngState(7, 3))
    assert np.array_equal(a, b)
    c = haar_unitary(4, RngState(7, 4))
    assert not np.array_equal(a, c)


def test_haar_first_entry_marginal():
    # Independent oracle: the first column of a Haar unitary is uniform
    # on the unit sphere of C^3, so E|U[0,0]|^2 = 1/3 with variance
    # 1/18 (|z|^2 ~ Beta(1, 2)).  Checked at 3 sigma.
    n_draws = 100_000
    acc = 0.0
    for k in range(n_draws):
        u = haar_unitary(3, RngState(123, k))
        acc += abs(u[0, 0]) ** 2
    mean = acc / n_draws
    sigma = math.sqrt((1.0 / 18.0) / n_draws)
    assert abs(mean - 1.0 / 3.0) <= 3.0 * sigma


def test_haar_left_invariance_chi_square():
    from scipy.stats import chi2_contingency

    fixed = haar_unitary(3, RngState(999, 0))
    stat_plain = []
    stat_shift = []
    for k in range(10_000):
        u = haar_unitary(3, RngState(5, k))
        stat_plain.append(abs(u[0, 0]) ** 2)
        stat_shift.append(abs((fixed @ u)[0, 0]) ** 2)
    edges = np.linspace(0.0, 1.0, 11)
    h1, _ = np.histogram(stat_plain, bins=edges)
    h2, _ = np.histogram(stat_shift, bins=edges)
    _, p, _, _ = chi2_contingency(np.stack([h1, h2]))
    assert p > 0.01


def test_haar_rejects_bad_dim():
    with pytest.raises(ValueError):
        haar_unitary(1, RngState(0))
