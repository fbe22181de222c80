import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bowenlyap import (IrrationalRotation, NorthSouthCircle, NotHyperbolic, Point, ToralAutomorphism,
                       hair_distance, hair_map, iterate, make_toral)
from bowenlyap.space import flat_torus_distance, make_rng
from bowenlyap.systems import from_descriptor

from .conftest import LAM_S, LAM_U


def test_cat_eigenvalues(toral):
    roots = sorted(np.roots([1, -7, 1]))
    assert toral.lam_s == pytest.approx(roots[0], abs=1e-12)
    assert toral.lam_u == pytest.approx(roots[1], abs=1e-12)
    assert toral.lam_s == pytest.approx(0.1458980, abs=1e-7)
    assert toral.lam_u == pytest.approx(6.8541020, abs=1e-7)
    assert toral.lam_u * toral.lam_s == pytest.approx(1.0, abs=1e-12)
    A = np.array(toral.matrix, dtype=float)
    assert np.allclose(A @ toral.v_u, toral.lam_u * np.array(toral.v_u), atol=1e-10)
    assert np.allclose(A @ toral.v_s, toral.lam_s * np.array(toral.v_s), atol=1e-10)


@pytest.mark.parametrize("m", [[[1, 1], [0, 1]], [[2, 1], [1, 1.5]], [[1, 0], [0, 1]], [[2, 0], [0, 1]]])
def test_not_hyperbolic(m):
    with pytest.raises(NotHyperbolic):
        make_toral(m)


def test_negative_trace_accepted():
    s = make_toral([[-2, -1], [-1, -1]])
    assert abs(s.lam_u) > 1 > abs(s.lam_s)


def test_unstable_growth(toral):
    A = np.array(toral.matrix, dtype=float)
    v = np.array(toral.v_u)
    for n in range(1, 13):
        grown = np.linalg.matrix_power(A, n) @ v
        assert np.linalg.norm(grown) / np.linalg.norm(v) == pytest.approx(toral.lam_u ** n, rel=1e-9)


def test_hair_eigenvector(hair):
    # direction (1, (1-sqrt5)/2) is the contracting eigenvector
    vp = np.array([1.0, (1 - math.sqrt(5)) / 2])
    A = np.array([[2, 3], [3, 5]], dtype=float)
    assert np.allclose(A @ vp, LAM_S * vp, atol=1e-12)
    assert hair.v_p == pytest.approx(tuple(vp), abs=1e-12)


def test_hair_map_examples(hair):
    assert hair_map(hair, 1.0, 1) == pytest.approx(0.1458980, abs=1e-7)
    assert hair_map(hair, 0.0, 17) == 0.0
    assert hair_map(hair, 1.0, -1) == pytest.approx(6.8541020, abs=1e-7)
    for n in range(-5, 6):
        assert iterate(hair, Point.hair(0.3), n).coords[0] == pytest.approx(hair_map(hair, 0.3, n), rel=1e-13)


def test_hair_distance_examples(hair, toral):
    q = hair.q
    assert hair_distance(hair, q, Point.torus(0, 0)) == pytest.approx(0.5, abs=1e-15)
    a, b = Point.torus(0.1, 0.9), Point.torus(0.7, 0.35)
    assert hair_distance(hair, a, b) == toral.distance(a, b)
    t = 0.01
    # exact product-metric value computed from the embedding
    vp = np.array([1.0, (1 - math.sqrt(5)) / 2])
    flat = flat_torus_distance((0.0, 0.0), tuple(t * vp % 1.0))
    exact = math.hypot(flat, 0.5 - 0.5 / (t * t + 1))
    assert hair_distance(hair, q, Point.hair(t)) == pytest.approx(exact, rel=1e-12)
    assert hair_distance(hair, q, Point.hair(t)) == pytest.approx(0.011756, abs=1e-6)


def test_hair_invariants(hair):
    q = hair.q
    assert hair.forward(q) == q and hair.backward(q) == q
    assert hair.height(0.0) == 0.5
    ts = np.concatenate([np.linspace(-50, 50, 1001), [1e3, -1e5]])
    hs = [hair.height(t) for t in ts]
    assert all(0 < h <= 0.5 for h in hs)
    assert hair.height(1e5) < 1e-9


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1, allow_nan=False).filter(lambda t: abs(t) > 1e-6))
def test_hair_forward_converges_monotonically(hair, t):
    p = Point.hair(t)
    prev_t, prev_d = abs(t), hair.distance(p, hair.q)
    for _ in range(15):
        p = hair.forward(p)
        d = hair.distance(p, hair.q)
        assert abs(p.coords[0]) < prev_t
        assert d < prev_d or d == 0.0
        prev_t, prev_d = abs(p.coords[0]), d
    assert prev_t == pytest.approx(abs(t) * LAM_S ** 15, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 1, allow_nan=False).filter(lambda t: abs(t) > 1e-6))
def test_hair_backward_height_vanishes(hair, t):
    p = iterate(hair, Point.hair(t), -12)
    assert hair.height(p.coords[0]) < 1e-6


def test_north_south_fixed_points(north_south):
    assert north_south.forward(Point.circle(0.0)).coords[0] == 0.0
    assert north_south.forward(Point.circle(math.pi)).coords[0] == math.pi
    assert north_south.backward(Point.circle(math.pi)).coords[0] == math.pi


def test_north_south_monotone_and_attracting(north_south):
    grid = np.linspace(0, 2 * math.pi, 1000, endpoint=False)
    images = [north_south.forward(Point.circle(t)).coords[0] for t in grid]
    # lift to a degree-one increasing map: images past pi stay on the far side
    assert all(b > a for a, b in zip(images, images[1:]))
    for t, ft in zip(grid[1:], images[1:]):
        if abs(t - math.pi) > 1e-12:
            assert abs(ft - math.pi) < abs(t - math.pi)


def test_north_south_derivatives(north_south):
    assert north_south.derivative(0.0) == pytest.approx(2.0)
    assert north_south.derivative(math.pi) == pytest.approx(0.5)
    assert north_south.grid_lipschitz() == pytest.approx(2.0)


def test_rotation_isometry(rotation):
    rng = make_rng(1)
    for _ in range(200):
        p, q = Point.circle(rng.uniform(0, 7)), Point.circle(rng.uniform(0, 7))
        d = rotation.distance(p, q)
        for n in range(-20, 21):
            fp, fq = iterate(rotation, p, n), iterate(rotation, q, n)
            assert rotation.distance(fp, fq) == pytest.approx(d, abs=1e-12)
    near = rotation.displace(Point.circle(1.0), 1e-9, 0.2)
    d0 = rotation.distance(Point.circle(1.0), near)
    for n in range(-20, 21):
        fp, fq = iterate(rotation, Point.circle(1.0), n), iterate(rotation, near, n)
        assert rotation.distance(fp, fq) / d0 == 1.0


def test_from_descriptor():
    s = from_descriptor({"type": "toral", "matrix": [[2, 1], [1, 1]]}, metric="adapted")
    assert isinstance(s, ToralAutomorphism) and s.metric == "eigen"
    assert isinstance(from_descriptor({"type": "north_south", "mu": 3}), NorthSouthCircle)
    assert isinstance(from_descriptor({"type": "rotation"}), IrrationalRotation)
    assert from_descriptor({"type": "torus_with_hair", "epsilon": 0.25}).epsilon == 0.25
    with pytest.raises(KeyError):
        from_descriptor({"type": "solenoid"})


def test_hair_t_max(hair):
    assert hair.t_max == pytest.approx(math.sqrt(0.5 / 1e-6) - 1)
    assert 1e-6 <= hair.height(hair.t_max) < 1.01e-6
    rng = make_rng(4)
    for _ in range(200):
        p = hair.random_point(rng)
        assert hair.contains(p)
        if p.chart.value == "hair":
            assert abs(p.coords[0]) <= hair.t_max
