import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpplab import (DomainError, GeodesicPath, common_prefix_check, crossing_point,
                    derive_trial_field, f_expected, from_diagonal, geodesic, ordering_check, phi,
                    psi, temporal_deviation, transversal_fluctuation)

O = (0, 0)
ints = st.integers(-10**9, 10**9)


def path(points, time=0.0):
    return GeodesicPath(np.array(points), time)


def test_coordinates():
    assert (phi(O), psi(O)) == (0, 0)
    assert (phi((2, 5)), psi((2, 5))) == (7, 3)
    assert psi((123, 123)) == 0


@given(ints, ints)
def test_diagonal_roundtrip(x, y):
    assert from_diagonal(phi((x, y)), psi((x, y))) == (x, y)


def test_parity_mismatch():
    with pytest.raises(DomainError):
        from_diagonal(3, 0)


def test_f_expected():
    assert f_expected(O, (9, 9)) == 36
    assert f_expected(O, (1, 4)) == 9
    assert f_expected((5, 5), (1, 1)) == 0


@given(st.integers(0, 500), st.integers(0, 500), st.integers(0, 500), st.integers(0, 500))
def test_f_reflection(a, b, c, d):
    assert math.isclose(f_expected((a, b), (a + c, b + d)), f_expected((b, a), (b + d, a + c)))


def test_f_diagonal_superadditive():
    n = 200
    for k in range(n + 1):
        assert f_expected(O, (k, k)) + f_expected((k, k), (n, n)) <= f_expected(O, (n, n)) + 1e-9
    for x in range(0, n + 1, 7):
        for y in range(0, n + 1, 11):
            assert f_expected(O, (x, y)) + f_expected((x, y), (n, n)) <= 4 * n + 1e-9


def test_tf_examples():
    assert transversal_fluctuation(path([(0, 0), (1, 0), (1, 1)]), 1) == 1
    k = 6
    vert = path([(0, j) for j in range(k + 1)])
    assert transversal_fluctuation(vert, k) == k
    assert transversal_fluctuation(vert, 2) == 4
    with pytest.raises(DomainError):
        transversal_fluctuation(path([(1, 0), (1, 1)]), 1)


def test_tf_matches_scan():
    g = geodesic(derive_trial_field(3, 3), O, (10, 10))
    for r in range(1, 11):
        expect = max(abs(y - x) for x, y in g.points() if 0 <= x + y <= 2 * r)
        assert transversal_fluctuation(g, r) == expect


def test_tf_monotone_in_r():
    for i in range(20):
        g = geodesic(derive_trial_field(4, i), O, (40, 40))
        tf = [transversal_fluctuation(g, r) for r in range(1, 41)]
        assert tf == sorted(tf)


def test_crossing_point():
    g = geodesic(derive_trial_field(3, 3), (2, 1), (12, 11))
    assert crossing_point(g, 3) == (2, 1) and crossing_point(g, 23) == (12, 11)
    hit = [p for p in g.points() if p[0] + p[1] == 10]
    assert [crossing_point(g, 10)] == hit
    with pytest.raises(DomainError):
        crossing_point(g, 24)


def test_temporal_deviation():
    u, v = (1, 2), (9, 20)
    assert temporal_deviation(f_expected(u, v), u, v) == 0
    n = 64
    assert temporal_deviation(4 * n + (2 * n) ** (1 / 3), O, (n, n)) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        temporal_deviation(1.0, u, u)


def test_common_prefix():
    g = geodesic(derive_trial_field(1, 1), O, (5, 5))
    assert common_prefix_check(g, g)
    up_right = path([(0, 0), (0, 1), (1, 1)])
    right_up = path([(0, 0), (1, 0), (1, 1)])
    assert not common_prefix_check(up_right, right_up)
    with pytest.raises(DomainError):
        common_prefix_check(g, path([(1, 0), (1, 1)]))


def test_geodesic_tree():
    for i in range(200):
        f = derive_trial_field(12, i)
        assert common_prefix_check(geodesic(f, O, (20, 20)), geodesic(f, O, (20, 30)))


def test_ordering_examples():
    g = geodesic(derive_trial_field(1, 1), O, (5, 5))
    assert ordering_check(g, g, 0, 10)
    bottom = path([(x, 0) for x in range(6)] + [(5, y) for y in range(1, 6)])
    top = path([(0, y) for y in range(6)] + [(x, 5) for x in range(1, 6)])
    assert ordering_check(bottom, top, 0, 10) and not ordering_check(top, bottom, 0, 10)
    with pytest.raises(DomainError):
        ordering_check(g, g, 0, 11)


def test_single_crossing_ordering():
    r, n = 20, 60
    checked = 0
    for i in range(200):
        f = derive_trial_field(21, i)
        gn, gr = geodesic(f, O, (n, n)), geodesic(f, O, (r, r))
        if psi(crossing_point(gn, 2 * r)) >= 0:
            checked += 1
            assert ordering_check(gr, gn, 0, 2 * r)
    assert checked > 50


def test_reflection_symmetry():
    n, trials = 64, 2000
    vals = np.array([psi(crossing_point(geodesic(derive_trial_field(31, i), O, (n, n)), n))
                     for i in range(trials)])
    iqr = np.subtract(*np.percentile(vals, [75, 25]))
    assert abs(np.median(vals)) <= 2 * iqr / math.sqrt(trials)
