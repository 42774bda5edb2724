import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gamma

from mahlerlink.core import (DimensionError, IntegrationError, McConfig,
                             RunReport, Signature, ball_volume, det_columns,
                             duplex_inner, duplex_metric, indef_inner, mc_mean,
                             ode_solve, sphere_frame, sphere_grid, sphere_volume,
                             uniform_sphere, wedge_coordinates, wedge_index)


def test_signature_validation():
    assert Signature(2, 2).dim == 4
    assert np.array_equal(Signature(1, 1).metric, np.diag([1.0, -1.0]))
    with pytest.raises(ValueError):
        Signature(0, 2)
    with pytest.raises(ValueError):
        Signature(1, 0)


def test_indefinite_inner_product():
    sig = Signature(1, 2)
    u = np.array([2.0, 1.0, 1.0])
    assert indef_inner(sig, u, u) == pytest.approx(2.0)


def test_duplex_inner_matches_metric():
    rng = np.random.default_rng(0)
    x1, y1, x2, y2 = rng.standard_normal((4, 3))
    G = duplex_metric(3)
    lhs = duplex_inner(x1, y1, x2, y2)
    rhs = np.concatenate([x1, y1]) @ G @ np.concatenate([x2, y2])
    assert lhs == pytest.approx(rhs)
    # a point (x, y) with x.y = 1 lies on the positive pseudosphere
    x = rng.standard_normal(3)
    y = x / (x @ x)
    assert duplex_inner(x, y, x, y) == pytest.approx(1.0)


@pytest.mark.parametrize("d", range(0, 6))
def test_sphere_volume_closed_form(d):
    expected = 2 * math.pi ** ((d + 1) / 2) / gamma((d + 1) / 2)
    assert sphere_volume(d) == pytest.approx(expected, rel=1e-14)


def test_ball_volume_values():
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert ball_volume(4) == pytest.approx(math.pi**2 / 2)


@pytest.mark.parametrize("d", range(0, 6))
def test_grid_weights_sum_to_sphere_volume(d):
    g = sphere_grid(d, 8)
    assert g.weights.sum() == pytest.approx(sphere_volume(d), rel=1e-12)
    assert np.allclose(np.linalg.norm(g.nodes, axis=1), 1.0)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_grid_integrates_even_moments(d):
    # E[x_1^2] = 1/(d+1) and E[x_1^4] = 3/((d+1)(d+3)) on S^d
    g = sphere_grid(d, 16)
    area = sphere_volume(d)
    assert g.integrate(g.nodes[:, 0] ** 2) / area == pytest.approx(1 / (d + 1), rel=1e-12)
    assert g.integrate(g.nodes[:, -1] ** 4) / area == pytest.approx(
        3 / ((d + 1) * (d + 3)), rel=1e-12)


def test_grid_rejects_bad_input():
    with pytest.raises(DimensionError):
        sphere_grid(6, 8)
    with pytest.raises(ValueError):
        sphere_grid(2, 2)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10_000))
def test_sphere_frame_is_oriented_orthonormal(k, seed):
    theta = uniform_sphere(np.random.default_rng(seed), 3, k + 1)
    E = sphere_frame(theta)
    for t, e in zip(theta, E):
        M = np.vstack([t, e])
        assert np.allclose(M @ M.T, np.eye(k + 1), atol=1e-12)
        assert np.linalg.det(M) == pytest.approx(1.0)


def test_mc_config_batches_are_deterministic():
    mc = McConfig(1000, seed=7, batch_size=300)
    sizes = [s for _, s in mc.batches()]
    assert sizes == [300, 300, 300, 100]
    a = [r.random(3) for r, _ in mc.batches()]
    b = [r.random(3) for r, _ in mc.batches()]
    assert all(np.array_equal(x, y) for x, y in zip(a, b))
    with pytest.raises(ValueError):
        McConfig(0)


def test_mc_mean_uniform():
    mean, se = mc_mean(lambda r, n: r.random(n), McConfig(100_000, seed=1))
    assert abs(mean - 0.5) < 4 * se
    assert se == pytest.approx(math.sqrt(1 / 12 / 100_000), rel=0.02)


def test_run_report_rejects_negative_error():
    with pytest.raises(ValueError):
        RunReport(1.0, -1.0, 1)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 6), st.integers(0, 10_000))
def test_laplace_expansion_matches_det(dim, seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, dim))
    A = rng.standard_normal((dim, m))
    B = rng.standard_normal((dim, dim - m))
    subsets, comp, sign = wedge_index(dim, m)
    pa = wedge_coordinates(A)
    pb = wedge_coordinates(B)
    total = float(np.sum(sign * pa * pb[comp]))
    assert total == pytest.approx(np.linalg.det(np.hstack([A, B])), abs=1e-9)


def test_det_columns_square_only():
    assert det_columns([[1, 0], [0, 2]]) == pytest.approx(2.0)
    with pytest.raises(DimensionError):
        det_columns([[1, 0, 0], [0, 1, 0]])


def test_ode_solve_harmonic_oscillator():
    sol = ode_solve(lambda t: 0 * t, lambda t: 1 + 0 * t, 0.0, 1.0, 0.0, (-3, 3),
                    tolerance=1e-12)
    t = np.linspace(-3, 3, 41)
    assert np.max(np.abs(sol.f(t) - np.cos(t))) < 1e-10
    assert np.max(np.abs(sol.df(t) + np.sin(t))) < 1e-10
    assert np.max(np.abs(sol.d2f(t) + np.cos(t))) < 1e-10
    with pytest.raises(ValueError):
        sol.f(4.0)


def test_ode_solve_detects_singular_coefficient():
    with pytest.raises(IntegrationError):
        ode_solve(lambda t: 1 / np.tan(t), lambda t: 0 * t, 1.0, 1.0, 0.0, (0.0, 2.0))
