"""Acceptance suite: ten criteria at their stated tolerances and time limits.

Each test records a one-line verdict; ``conftest.py`` prints the lines at
the end of the run.  ``python tests/test_acceptance.py`` runs the suite
without pytest and prints the same lines.
"""

from __future__ import annotations

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest
from scipy.special import comb

from mahlerlink.bodies import (ball, cross_polytope, cube, linear_image,
                               lp_ball, simplex)
from mahlerlink.core import McConfig, Signature
from mahlerlink.kernels import (closed_form_kernel, energy,
                                hyperbolic_regular_closed_form,
                                hyperbolic_singular_closed_form, residual,
                                s3_kernel, sign_changes,
                                solve_hyperbolic_kernel,
                                solve_pseudosphere_kernel, solve_sphere_kernel)
from mahlerlink.linking import (cone_mc_estimator, crossing_oracle,
                                doubled_pair, hopf_pair, hyperbolic_hopf_pair,
                                link_hyperbolic, link_sphere, unlinked_pair,
                                window_integral)
from mahlerlink.necks import (body_necks, diamond_volume, filled_join_volume,
                              flat_neck, random_graph_neck, weighted_invariant)
from mahlerlink.volumes import (check_inequalities, closed_form_constants,
                                constant_identities, mahler_volume,
                                rogers_shephard_ratio, volume)

RESULTS: dict[int, str] = {}


@contextmanager
def criterion(number: int, title: str, limit: float):
    """Time a criterion, record PASS/FAIL and enforce its runtime limit."""
    notes: list[str] = []
    t0 = time.perf_counter()
    try:
        yield notes
    except AssertionError as exc:
        dt = time.perf_counter() - t0
        RESULTS[number] = f"FAIL criterion {number:2d} ({title}, {dt:.1f}s): {exc}"
        raise
    dt = time.perf_counter() - t0
    ok = dt < limit
    verdict = "PASS" if ok else "FAIL"
    detail = "; ".join(notes)
    RESULTS[number] = f"{verdict} criterion {number:2d} ({title}, {dt:.1f}s < {limit:g}s): {detail}"
    assert ok, f"runtime {dt:.1f}s exceeds {limit}s"


def test_criterion_01_closed_form_constants():
    with criterion(1, "closed-form constants", 1.0) as notes:
        worst = 0.0
        for n in range(1, 9):
            r = constant_identities(n)
            worst = max(worst, r["gamma"], r["delta"])
        assert worst < 1e-12, f"identity residual {worst:.2e}"
        g1 = closed_form_constants(1).gamma_n
        assert abs(g1 / (4 / math.pi) - 1) < 1e-12, f"gamma_1 = {g1}"
        g = [closed_form_constants(n).gamma_n for n in range(1, 41)]
        assert all(b > a for a, b in zip(g, g[1:])), "gamma_n not increasing"
        assert g[-1] < math.sqrt(2), "gamma_n exceeds sqrt 2"
        notes.append(f"max identity residual {worst:.1e}, gamma_40 = {g[-1]:.6f}")


def test_criterion_02_volumes():
    with criterion(2, "volumes", 60.0) as notes:
        b2 = volume(ball(2)).value
        assert abs(b2 - math.pi) < 1e-6, f"Vol B2 = {b2}"
        b4 = volume(ball(4), mc=McConfig(1_000_000, seed=0)).value
        assert abs(b4 / (math.pi**2 / 2) - 1) < 0.01, f"Vol B4 = {b4}"
        c2 = mahler_volume(cube(2)).mahler
        assert abs(c2 / 8 - 1) < 0.01, f"v(C2) = {c2}"
        s2 = mahler_volume(simplex(2)).mahler
        assert abs(s2 / 6.75 - 1) < 0.015, f"v(simplex) = {s2}"
        notes.append(f"B2 {b2:.9f}, B4 {b4:.6f}, v(C2) {c2:.5f}, v(D2) {s2:.5f}")


def test_criterion_03_filled_join_oracles():
    with criterion(3, "filled-join oracle triple", 300.0) as notes:
        s11 = Signature(1, 1)
        w11 = filled_join_volume(flat_neck(s11, "positive"), flat_neck(s11, "negative")).value
        assert w11 == 2.0, f"R^(1,1) gives {w11}"
        s31 = Signature(3, 1)
        w31 = filled_join_volume(flat_neck(s31, "positive"), flat_neck(s31, "negative")).value
        assert abs(w31 / (2 * math.pi / 3) - 1) < 0.005, f"R^(3,1) gives {w31}"
        wb2 = filled_join_volume(*body_necks(ball(2))).value
        assert abs(wb2 / (2 * math.pi**2 / 3) - 1) < 0.005, f"B2 necks give {wb2}"
        formula = 2**3 * math.factorial(3) ** 2 * math.pi**3 / (
            math.factorial(6) * math.gamma(2.5) ** 2)
        wb3 = filled_join_volume(*body_necks(ball(3)), resolution=64).value
        assert abs(wb3 / formula - 1) < 0.01, f"B3 diamond {wb3} vs {formula}"
        notes.append(f"{w11}, {w31:.10f}, {wb2:.10f}, B3 {wb3:.7f} vs {formula:.7f}")


def test_criterion_04_kernel_closed_forms():
    with criterion(4, "kernel closed forms", 10.0) as notes:
        t = np.linspace(-3, 3, 601)
        worst = 0.0
        for a in range(1, 11):
            sol = solve_pseudosphere_kernel(a, 1, 3.0)
            worst = max(worst, float(np.max(np.abs(sol.f(t) - np.cosh(t) ** (-a)))))
        assert worst < 1e-8, f"(a,1) deviation {worst:.2e}"
        sph = solve_sphere_kernel(2, 2)
        ts = np.linspace(0.1, 3.0, 291)
        dev = float(np.max(np.abs(sph.f(ts) - s3_kernel().f(ts))))
        norm = float(sph.f(math.pi / 2)) * 4 * math.pi**2
        assert dev < 1e-6 and abs(norm - 1) < 1e-6, f"sphere dev {dev:.2e}, norm {norm}"
        th = np.linspace(0.05, 5.0, 200)
        res = []
        for fn in (hyperbolic_regular_closed_form, hyperbolic_singular_closed_form):
            k = closed_form_kernel("hyperbolic", fn, 2, 2, (1e-3, 6.0))
            res.append(float(np.max(residual(k, th))))
        for parity in ("even", "odd"):
            res.append(float(np.max(residual(solve_hyperbolic_kernel(2, 2, parity), th))))
        assert max(res) < 1e-8, f"hyperbolic residuals {res}"
        notes.append(f"(a,1) {worst:.1e}, s3 {dev:.1e}, norm-1 {abs(norm - 1):.1e}, "
                     f"hyperbolic residual {max(res):.1e}")


def test_criterion_05_energy_lemma():
    with criterion(5, "energy lemma", 10.0) as notes:
        t = np.linspace(0, 2, 201)[1:]
        ta = np.linspace(0.05, 3.0, 600)
        for ab in [(2, 2), (3, 2), (9, 9)]:
            sol = solve_pseudosphere_kernel(*ab, 3.0)
            E = energy(sol, t)
            assert np.all(np.diff(E) < 0), f"E not decreasing for {ab}"
            fmax = float(np.max(np.abs(sol.f(ta))))
            assert fmax < 1, f"|f| = {fmax} for {ab}"
        z = sign_changes(solve_pseudosphere_kernel(9, 9, 2.0), 0, 2.0)
        assert len(z) >= 2 and 0.1 < z[0] < z[1] < 0.7, f"(9,9) zeros {z[:2]}"
        notes.append(f"(9,9) sign changes {z[0]:.4f}, {z[1]:.4f}")


def test_criterion_06_bottleneck():
    with criterion(6, "bottleneck theorem", 900.0) as notes:
        for ab, res in (((2, 2), 48), ((3, 2), 24)):
            sig = Signature(*ab)
            flat = weighted_invariant(flat_neck(sig, "positive"),
                                      flat_neck(sig, "negative"), resolution=res)
            kern = solve_pseudosphere_kernel(*ab, 4.0)
            ells, ws, worst_w = [], [], math.inf
            for seed in range(20):
                rng = np.random.default_rng(seed)
                eps = 0.3 * (seed + 1) / 20
                r = weighted_invariant(random_graph_neck(sig, "positive", eps, rng),
                                       random_graph_neck(sig, "negative", eps, rng),
                                       kernel=kern, resolution=res)
                sigma = max(r.details["w_error"], r.std_error)
                assert r.w >= flat.w - 3 * sigma, f"{ab} seed {seed}: w {r.w} < {flat.w}"
                assert r.value <= r.w and r.domination_holds, f"{ab} seed {seed}: domination"
                ells.append(r.value)
                ws.append(r.w)
                worst_w = min(worst_w, r.w - flat.w)
            spread = (max(ells) - min(ells)) / abs(flat.value)
            assert spread < 1e-3, f"{ab}: l spread {spread:.2e}"
            notes.append(f"{ab}: l spread {spread:.1e}, min w-w_flat {worst_w:.2e}")


def test_criterion_07_hanner_equality():
    with criterion(7, "Hanner equality for C2", 600.0) as notes:
        r = diamond_volume(cube(2))
        gap = abs(r.value - 8.0) / 8.0
        assert r.details["smoothing"][-1] == 64.0
        assert r.details["monotone"], f"sequence {r.details['sequence']}"
        assert gap < 0.02, f"gap {gap:.4f}"
        seq = ", ".join(f"{v:.4f}" for v in r.details["sequence"])
        notes.append(f"p=8..64: {seq}; gap at 64 {gap:.2%}")


def test_criterion_08_linking_three_way():
    with criterion(8, "linking three-way agreement", 300.0) as notes:
        for name, pair, lk in (("hopf", hopf_pair(), 1), ("unlinked", unlinked_pair(), 0),
                               ("doubled", doubled_pair(), 2)):
            k = link_sphere(*pair)
            assert abs(k.value - lk) < 1e-3, f"{name} kernel {k.value}"
            x = crossing_oracle(*pair)
            assert x == lk, f"{name} crossings {x}"
            m = cone_mc_estimator(*pair, McConfig(10_000, seed=0))
            assert abs(m.value - lk) <= 3 * m.std_error, f"{name} cone {m.value} +- {m.std_error}"
            notes.append(f"{name} {k.value:.6f}/{x}/{m.value:.4f}")
        for alpha in (0.3, 1.0, 2.0):
            closed = ((math.pi - alpha) * math.cos(alpha) + math.sin(alpha)) / 2
            numer = window_integral(alpha) * 2 * math.pi**2 * math.sin(alpha) ** 3
            assert abs(numer / closed - 1) < 1e-10, f"window identity at {alpha}"


def test_criterion_09_hyperbolic_flat_limit():
    with criterion(9, "hyperbolic flat limit", 120.0) as notes:
        r = link_hyperbolic(*hyperbolic_hopf_pair(0.1))
        assert abs(r.value - 1) < 1e-2, f"value {r.value}"
        notes.append(f"lk = {r.value:.8f}")


def test_criterion_10_inequality_suite():
    with criterion(10, "inequality suite", 600.0) as notes:
        rng = np.random.default_rng(2024)
        failures = []
        count = 0
        for n in (2, 3):
            T = rng.standard_normal((n, n)) + 2 * np.eye(n)
            bodies = [ball(n), cube(n), cross_polytope(n), lp_ball(n, 4.0),
                      linear_image(ball(n), T)]
            for K in bodies:
                checks = check_inequalities(K)
                for key in ("santalo", "lower_bound"):
                    count += 1
                    if not checks[key].holds:
                        failures.append(f"{K.describe()} {key}")
        assert not failures, f"violations: {failures}"
        ratios = []
        for n in (2, 3):
            r = rogers_shephard_ratio(simplex(n)).value
            assert abs(r / comb(2 * n, n) - 1) < 0.01, f"RS ratio n={n}: {r}"
            ratios.append(r)
        notes.append(f"{count} bound checks hold; RS ratios {ratios[0]:.5f}, {ratios[1]:.4f}")


if __name__ == "__main__":
    import sys

    status = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                status = 1
    for k in sorted(RESULTS):
        print(RESULTS[k])
    sys.exit(status)
