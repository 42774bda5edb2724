import math

import numpy as np
import pytest

from mahlerlink.bodies import ball, cube, ellipsoid, lp_ball
from mahlerlink.core import GeometryError, Signature
from mahlerlink.kernels import solve_pseudosphere_kernel
from mahlerlink.necks import (PolynomialDisplacement, body_necks,
                              coincident_functional, diamond_volume,
                              filled_join_volume, flat_neck, graph_neck,
                              join_prefactor, random_graph_neck,
                              riemannian_neck_volume, sample_neck,
                              validate_neck, verify_starlike,
                              weighted_invariant)
from mahlerlink.volumes import closed_form_constants


def flat_pair(a, b):
    sig = Signature(a, b)
    return flat_neck(sig, "positive"), flat_neck(sig, "negative")


def test_join_prefactor():
    assert join_prefactor(2, 2) == pytest.approx(1 / 24)
    assert join_prefactor(1, 1) == pytest.approx(0.5)


def test_flat_necks_in_plane_give_two():
    # R^(1,1): the necks are {+-e1} and {+-e2}; the join is the unit square diamond
    r = filled_join_volume(*flat_pair(1, 1))
    assert r.value == 2.0


def test_flat_necks_in_r31():
    r = filled_join_volume(*flat_pair(3, 1), resolution=64)
    assert r.value == pytest.approx(2 * math.pi / 3, rel=1e-10)


def test_ball_necks_give_diamond_formula():
    r = filled_join_volume(*body_necks(ball(2)), resolution=64)
    assert r.value == pytest.approx(2 * math.pi**2 / 3, rel=1e-10)


@pytest.mark.parametrize("method", ["pairwise", "factorized"])
def test_ball3_diamond(method):
    r = filled_join_volume(*body_necks(ball(3)), resolution=48, method=method)
    assert r.value == pytest.approx(closed_form_constants(3).vol_Bn_diamond, rel=1e-5)


def test_diamond_is_linear_invariant():
    A = np.array([[2.0, 0.5], [0.5, 1.0]])
    v = diamond_volume(ellipsoid(A)).value
    assert v == pytest.approx(2 * math.pi**2 / 3, rel=1e-8)


def test_validate_neck():
    sig = Signature(2, 2)
    for side in ("positive", "negative"):
        v = validate_neck(flat_neck(sig, side))
        assert v.valid and v.membership_error < 1e-12
    v = validate_neck(random_graph_neck(sig, "positive", 0.3, 4))
    assert v.valid and v.causal_margin > 0


def test_graph_necks_lie_on_pseudospheres():
    sig = Signature(3, 2)
    rng = np.random.default_rng(0)
    for side, level in (("positive", 1.0), ("negative", -1.0)):
        N = random_graph_neck(sig, side, 0.5, rng)
        s = sample_neck(N, 16)
        assert np.allclose(N.inner(s.points, s.points), level, atol=1e-12)


def test_offset_flat_neck():
    sig = Signature(2, 2)
    N = flat_neck(sig, "positive", [0.5, 0.0])
    assert validate_neck(N).valid
    with pytest.raises(GeometryError):
        flat_neck(sig, "positive", [0.5])


def test_displacement_degree_limit():
    with pytest.raises(ValueError):
        PolynomialDisplacement(2, 2, (((5, 0), (1.0, 0.0)),))
    with pytest.raises(ValueError):
        graph_neck(Signature(2, 2), "positive",
                   PolynomialDisplacement.constant(3, [1.0, 0.0]))


def test_valid_necks_are_starlike():
    sig = Signature(2, 2)
    for seed in range(5):
        r = verify_starlike(random_graph_neck(sig, "positive", 0.3, seed),
                            random_graph_neck(sig, "negative", 0.3, seed + 50),
                            samples=2000)
        assert not r.sign_change and r.positive_fraction == 1.0


def test_acausal_neck_breaks_starlikeness():
    sig = Signature(2, 2)
    bad = random_graph_neck(sig, "positive", 2.0, 0)
    assert not validate_neck(bad).valid
    r = verify_starlike(bad, random_graph_neck(sig, "negative", 2.0, 10), 2000)
    assert r.sign_change and r.witness[0] > 0 > r.witness[1]


def test_body_necks_need_smoothness():
    with pytest.raises(GeometryError):
        body_necks(cube(2))
    n_plus, n_minus = body_necks(lp_ball(2, 4.0))
    assert validate_neck(n_plus).valid and validate_neck(n_minus).valid


def test_invariant_equals_volume_for_flat_necks():
    r = weighted_invariant(*flat_pair(2, 2))
    assert r.value == pytest.approx(r.w, rel=1e-12)
    assert r.domination_holds


@pytest.mark.parametrize("ab", [(2, 2), (3, 2), (2, 1)])
def test_bottleneck_property(ab):
    sig = Signature(*ab)
    flat = weighted_invariant(*flat_pair(*ab), resolution=32)
    kern = solve_pseudosphere_kernel(*ab, 4.0)
    for seed in range(3):
        rng = np.random.default_rng(seed)
        pair = (random_graph_neck(sig, "positive", 0.3, rng),
                random_graph_neck(sig, "negative", 0.3, rng))
        r = weighted_invariant(*pair, kernel=kern, resolution=32)
        assert r.value == pytest.approx(flat.value, rel=1e-6)
        assert r.w >= flat.w - 3 * r.details["w_error"]
        assert r.domination_holds


def test_kernel_mismatch_is_rejected():
    with pytest.raises(ValueError):
        weighted_invariant(*flat_pair(2, 2), kernel=solve_pseudosphere_kernel(3, 2))


def test_riemannian_length_of_circle_neck():
    n_plus, _ = body_necks(ball(2))
    r = riemannian_neck_volume(n_plus, 64)
    # the neck is theta -> (theta, theta); a tangent (t, t) has duplex norm |t|
    assert r.value == pytest.approx(2 * math.pi, rel=1e-10)


def test_coincident_functional_matches_join_for_ball():
    n_plus, n_minus = body_necks(ball(2))
    c = coincident_functional(n_plus, n_plus, 64)
    w = filled_join_volume(n_plus, n_minus, 64)
    assert c.value == pytest.approx(w.value, rel=1e-8)


def test_cube_diamond_smoothing_sequence():
    r = diamond_volume(cube(2))
    seq = r.details["sequence"]
    assert r.details["monotone"] and seq[-1] == r.value
    assert abs(r.value - 8.0) / 8.0 < 0.02
    assert abs(r.details["extrapolated"] - 8.0) < abs(r.value - 8.0)
