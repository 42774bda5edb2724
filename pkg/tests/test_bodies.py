import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from mahlerlink.bodies import (ball, boundary_point, conjugate_exponent,
                               cross_polytope, cube, custom_body,
                               difference_body, dual_norm, dual_point,
                               ellipsoid, hanner, hanner_dimension, linear_image,
                               lp_ball, make_body, polar, scaled, simplex,
                               simplex_vertices, translate)
from mahlerlink.core import DimensionError, GeometryError, uniform_sphere


def _bodies(n):
    A = np.array([[2.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 0.5]])[:n, :n]
    return [ball(n), lp_ball(n, 4.0), lp_ball(n, 1.5), cube(n),
            cross_polytope(n), ellipsoid(A), simplex(n),
            hanner(("prod", "seg", ("sum", "seg", "seg"))) if n == 3 else
            hanner(("sum", "seg", "seg"))]


@pytest.mark.parametrize("n", [2, 3])
def test_gauge_support_duality(n):
    # h(y) = max over boundary points of x.y, checked on a dense sample
    rng = np.random.default_rng(1)
    for K in _bodies(n):
        x = boundary_point(K, uniform_sphere(rng, 200_000, n))
        y = uniform_sphere(rng, 20, n)
        brute = np.max(y @ x.T, axis=1)
        h = K.support(y)
        assert np.all(brute <= h + 1e-9), K.family
        assert np.allclose(brute, h, rtol=2e-2), K.family


@pytest.mark.parametrize("n", [2, 3])
def test_gauge_is_homogeneous_and_gradient_is_dual(n):
    rng = np.random.default_rng(2)
    for K in _bodies(n):
        x = rng.standard_normal((10, n))
        assert np.allclose(K.gauge(3.0 * x), 3.0 * K.gauge(x))
        g = K.gauge_gradient(x)
        # Euler relation x . grad g = g
        assert np.allclose(np.sum(x * g, axis=1), K.gauge(x), atol=1e-8), K.family


def test_polar_swaps_oracles_and_flags():
    K = lp_ball(2, 4.0)
    P = polar(K)
    x = np.array([[0.3, -1.2]])
    assert P.gauge(x) == pytest.approx(K.support(x))
    assert P.smooth == K.polar_smooth and P.polar_smooth == K.smooth
    assert polar(P).family == K.family


def test_cube_cross_polytope_duality():
    y = np.array([[1.0, -2.0, 0.5]])
    assert cube(3).support(y) == pytest.approx(3.5)
    assert cross_polytope(3).gauge(y) == pytest.approx(3.5)
    assert cube(3).gauge(y) == pytest.approx(2.0)


def test_conjugate_exponent():
    assert conjugate_exponent(2.0) == pytest.approx(2.0)
    assert conjugate_exponent(4.0) == pytest.approx(4 / 3)
    assert conjugate_exponent(1.0) == np.inf
    with pytest.raises(ValueError):
        conjugate_exponent(0.5)


def test_ellipsoid_validation():
    with pytest.raises(ValueError):
        ellipsoid([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        ellipsoid([[1.0, 0.0], [0.0, -1.0]])


def test_linear_image_maps_boundary():
    T = np.array([[2.0, 1.0], [0.0, 0.5]])
    K = linear_image(ball(2), T)
    x = np.array([[np.cos(0.4), np.sin(0.4)]])
    assert K.gauge(x @ T.T) == pytest.approx(1.0)
    y = np.array([[0.3, 0.7]])
    assert K.support(y) == pytest.approx(np.linalg.norm(T.T @ y[0]))


def test_scaled_and_translate():
    K = scaled(cube(2), 3.0)
    assert K.gauge([[3.0, 0.0]]) == pytest.approx(1.0)
    Kt = translate(ball(2), [0.3, 0.0])
    assert Kt.gauge(np.array([[1.3, 0.0]])) == pytest.approx(1.0, abs=1e-9)
    assert Kt.gauge(np.array([[-0.7, 0.0]])) == pytest.approx(1.0, abs=1e-9)
    assert Kt.support(np.array([[1.0, 0.0]])) == pytest.approx(1.3)
    assert not Kt.symmetric


def test_simplex_is_centered():
    V = simplex_vertices(3)
    assert np.allclose(V.mean(axis=0), 0.0)
    K = simplex(3)
    assert np.allclose(K.gauge(V), 1.0)
    assert not K.symmetric


@pytest.mark.parametrize("n", [2, 3])
def test_difference_body_gauge_matches_linear_program(n):
    # ||x||_{D} = min t such that x in t (V - V); solved by an LP over convex weights
    V = simplex_vertices(n)
    D = difference_body(simplex(n))
    rng = np.random.default_rng(3)
    X = rng.standard_normal((6, n))
    m = len(V)
    for x in X:
        # variables: lambda (m), mu (m), t; x = V^T lambda - V^T mu, sum lambda = sum mu = t
        c = np.zeros(2 * m + 1)
        c[-1] = 1
        A_eq = np.zeros((n + 2, 2 * m + 1))
        A_eq[:n, :m] = V.T
        A_eq[:n, m:2 * m] = -V.T
        A_eq[n, :m] = 1
        A_eq[n, -1] = -1
        A_eq[n + 1, m:2 * m] = 1
        A_eq[n + 1, -1] = -1
        b_eq = np.concatenate([x, [0, 0]])
        lp = linprog(c, A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (2 * m + 1))
        assert D.gauge(x[None, :])[0] == pytest.approx(lp.fun, rel=1e-9)


def test_dual_norm_of_square_is_l1():
    sup = lambda y: np.max(np.abs(y), axis=-1)  # support of the cross-polytope
    sg = cross_polytope(2).support_gradient
    x = np.array([[0.3, -0.8], [1.0, 1.0]])
    assert np.allclose(dual_norm(x, cube(2).support, cube(2).support_gradient),
                       np.max(np.abs(x), axis=1))
    assert np.allclose(dual_norm(x, sup, sg), np.sum(np.abs(x), axis=1))


def test_symmetric_difference_body_is_doubled():
    D = difference_body(lp_ball(2, 3.0))
    x = np.array([[0.5, 0.2]])
    assert D.gauge(x) == pytest.approx(lp_ball(2, 3.0).gauge(x) / 2)


def test_dual_point():
    K = lp_ball(2, 4.0)
    x = boundary_point(K, np.array([[0.6, 0.8]]))
    y = dual_point(K, x)
    assert np.sum(x * y) == pytest.approx(1.0)
    assert K.support(y) == pytest.approx(1.0)
    with pytest.raises(GeometryError):
        dual_point(cube(2), np.array([[1.0, 0.2]]))
    with pytest.raises(GeometryError):
        dual_point(K, 2 * x)


def test_hanner_trees():
    assert hanner_dimension(("prod", "seg", ("sum", "seg", "seg"))) == 3
    with pytest.raises(ValueError):
        hanner_dimension(("prod", "seg"))
    H = hanner(("prod", "seg", "seg"))
    x = np.array([[0.3, -0.9]])
    assert H.gauge(x) == pytest.approx(cube(2).gauge(x))
    S = hanner(("sum", "seg", "seg"))
    assert S.gauge(x) == pytest.approx(1.2)
    # smoothing is dual: gauge of the smoothing equals support of its polar
    Hp = H.smoothing(8.0)
    assert Hp.smooth and Hp.gauge(x) == pytest.approx(lp_ball(2, 8.0).gauge(x))


def test_make_body_factory():
    assert make_body("cube", 2).family == "cube"
    assert make_body("lp_ball", 3, p=4).n == 3
    assert make_body("hanner", tree=("sum", "seg", "seg")).n == 2
    with pytest.raises(ValueError):
        make_body("dodecahedron", 3)
    with pytest.raises(ValueError):
        make_body("cube")
    with pytest.raises(DimensionError):
        make_body("ellipsoid", 3, A=np.eye(2))


def test_oracles_check_dimension():
    with pytest.raises(DimensionError):
        ball(3).gauge(np.ones(2))


def test_custom_body_numeric_gradient():
    K = custom_body(2, lambda x: np.linalg.norm(np.asarray(x), axis=-1),
                    lambda y: np.linalg.norm(np.asarray(y), axis=-1))
    x = np.array([[0.6, 0.8]])
    assert np.allclose(K.gauge_gradient(x), x, atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(1.2, 12.0), st.integers(0, 1000))
def test_lp_holder_inequality(p, seed):
    rng = np.random.default_rng(seed)
    K = lp_ball(3, p)
    x, y = rng.standard_normal((2, 3))
    assert abs(x @ y) <= K.gauge(x) * K.support(y) * (1 + 1e-12)
