"""Volumes, Mahler volumes and the closed-form constants around them."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import comb, gammaln

from .bodies import ConvexBody, ball, cube, difference_body, polar, simplex
from .core import McConfig, RunReport, mc_mean, sphere_grid, sphere_volume, uniform_sphere

DEFAULT_RESOLUTION = {2: 4096, 3: 256}


def volume(K: ConvexBody, resolution: int | None = None,
           mc: McConfig | None = None) -> RunReport:
    """Volume from the radial formula ``Vol K = int_S 1 / (n ||x||_K^n)``.

    For ``n <= 3`` (and no ``mc``) the sphere integral uses a product grid;
    its error estimate is the change from the grid of half resolution.
    Otherwise uniform directions are averaged and the standard error is
    reported.

    Parameters
    ----------
    K : ConvexBody
    resolution : int, optional
        Azimuthal grid resolution (deterministic path).
    mc : McConfig, optional
        Forces the Monte Carlo path with this budget.
    """
    n = K.n
    if n == 1:
        v = float(1.0 / K.gauge(np.array([1.0])) + 1.0 / K.gauge(np.array([-1.0])))
        return RunReport(v, 0.0, 2, details={"method": "quadrature"})
    if mc is None and n <= 3:
        res = resolution or DEFAULT_RESOLUTION[n]
        fine = _grid_volume(K, res)
        coarse = _grid_volume(K, max(4, res // 2))
        nodes = len(sphere_grid(n - 1, res))
        return RunReport(fine, abs(fine - coarse), nodes,
                         details={"method": "quadrature", "resolution": res})
    mc = mc or McConfig(200_000, seed=0)
    area = sphere_volume(n - 1)

    def sample(rng, size):
        u = uniform_sphere(rng, size, n)
        return area / (n * K.gauge(u) ** n)

    mean, se = mc_mean(sample, mc)
    return RunReport(mean, se, mc.sample_count, seed=mc.seed,
                     details={"method": "monte_carlo"})


def _grid_volume(K: ConvexBody, res: int) -> float:
    grid = sphere_grid(K.n - 1, res)
    return grid.integrate(1.0 / (K.n * K.gauge(grid.nodes) ** K.n))


@dataclass
class MahlerReport:
    """``v(K) = Vol K * Vol K°`` with its propagated error."""

    n: int
    family: str
    vol_K: float
    vol_polar: float
    mahler: float
    method: str
    std_error: float
    seed: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def mahler_volume(K: ConvexBody, resolution: int | None = None,
                  mc: McConfig | None = None) -> MahlerReport:
    """Mahler volume of K; errors of both factors combine in quadrature."""
    a = volume(K, resolution, mc)
    b = volume(polar(K), resolution, mc)
    m = a.value * b.value
    rel = math.hypot(a.std_error / a.value, b.std_error / b.value)
    return MahlerReport(K.n, K.family, a.value, b.value, m,
                        a.details["method"], m * rel, a.seed)


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------


def _lf(x):
    """log Gamma(x + 1), i.e. log x! for half-integers too."""
    return float(gammaln(x + 1.0))


@dataclass(frozen=True)
class ClosedFormConstants:
    n: int
    vol_Bn: float
    v_Cn: float
    v_Simplex: float
    vol_Bn_diamond: float
    gamma_n: float
    delta_n: float
    lower_bound_symmetric: float
    lower_bound_asymmetric: float
    v_Bn: float = field(default=0.0)

    def to_dict(self) -> dict:
        return asdict(self)


def closed_form_constants(n: int) -> ClosedFormConstants:
    """Exact constants in dimension ``n`` (half-integer factorials via log-Gamma).

    * ``vol_Bn = pi^(n/2) / (n/2)!``
    * ``v_Cn = 4^n / n!`` and ``v_Simplex = (n+1)^(n+1) / n!^2``
    * ``vol_Bn_diamond = 2^n n!^2 pi^n / ((2n)! (n/2)!^2)``, the volume of
      the filled join of two orthogonal n-balls of radius sqrt 2
    * ``gamma_n = n!^3 2^n / ((2n)! (n/2)!^2)``, so that
      ``gamma_n (pi/4)^n v_Cn = vol_Bn_diamond``
    * ``delta_n = 8^n n!^6 e^n / ((2n)!^2 (n/2)!^2 (n+1)^(n+1))``, so that
      ``delta_n (pi/2e)^n v_Simplex = 4^n n!^4 pi^n / ((2n)!^2 (n/2)!^2)``
    """
    if int(n) != n or n < 1:
        raise ValueError("n must be a positive integer")
    n = int(n)
    lpi, l2 = math.log(math.pi), math.log(2.0)
    lfn, lf2n, lfh = _lf(n), _lf(2 * n), _lf(n / 2)
    vol_b = math.exp(0.5 * n * lpi - lfh)
    v_c = math.exp(n * 2 * l2 - lfn)
    v_s = math.exp((n + 1) * math.log(n + 1) - 2 * lfn)
    diamond = math.exp(n * l2 + 2 * lfn + n * lpi - lf2n - 2 * lfh)
    gamma = math.exp(3 * lfn + n * l2 - lf2n - 2 * lfh)
    delta = math.exp(3 * n * l2 + 6 * lfn + n - 2 * lf2n - 2 * lfh
                     - (n + 1) * math.log(n + 1))
    asym = math.exp(2 * n * l2 + 4 * lfn + n * lpi - 2 * lf2n - 2 * lfh)
    return ClosedFormConstants(n, vol_b, v_c, v_s, diamond, gamma, delta,
                               diamond, asym, vol_b * vol_b)


def constant_identities(n: int) -> dict:
    """Relative residuals of the two product identities (should be ~1e-16)."""
    c = closed_form_constants(n)
    sym = c.gamma_n * (math.pi / 4) ** n * c.v_Cn
    asym = c.delta_n * (math.pi / (2 * math.e)) ** n * c.v_Simplex
    return {"gamma": abs(sym / c.vol_Bn_diamond - 1),
            "delta": abs(asym / c.lower_bound_asymmetric - 1)}


# ---------------------------------------------------------------------------
# inequalities
# ---------------------------------------------------------------------------


@dataclass
class InequalityCheck:
    """``lhs <= rhs`` with the margin ``(rhs - lhs) / sigma``."""

    name: str
    lhs: float
    rhs: float
    sigma: float
    holds: bool
    margin: float


def _check(name, lhs, rhs, sigma, nsig=3.0):
    sigma = max(sigma, 1e-10 * max(abs(lhs), abs(rhs)))
    margin = (rhs - lhs) / sigma
    return InequalityCheck(name, lhs, rhs, sigma, bool(margin >= -nsig), margin)


def check_inequalities(K: ConvexBody, resolution: int | None = None,
                       mc: McConfig | None = None,
                       nsig: float = 3.0) -> dict[str, InequalityCheck]:
    """Evaluate the volume inequalities for K.

    Returns checks for the Santalo upper bound ``v(K) <= v(B_n)``, the
    lower bound ``v(K) >= vol_Bn_diamond`` (symmetric K) or the asymmetric
    lower bound otherwise, the Rogers-Shephard bound
    ``Vol(K-K) <= C(2n,n) Vol K`` and the Jensen step
    ``Vol (K-K)° <= 2^-n Vol K°``.  Each holds if it is violated by no
    more than ``nsig`` combined error units.
    """
    n = K.n
    c = closed_form_constants(n)
    vk = volume(K, resolution, mc)
    vp = volume(polar(K), resolution, mc)
    m = vk.value * vp.value
    sm = m * math.hypot(vk.std_error / vk.value, vp.std_error / vp.value)
    out = {}
    out["santalo"] = _check("santalo", m, c.v_Bn, sm, nsig)
    lower = c.lower_bound_symmetric if K.symmetric else c.lower_bound_asymmetric
    out["lower_bound"] = _check("lower_bound", lower, m, sm, nsig)
    D = difference_body(K)
    vd = volume(D, resolution, mc)
    rs = float(comb(2 * n, n))
    out["rogers_shephard"] = _check(
        "rogers_shephard", vd.value, rs * vk.value,
        math.hypot(vd.std_error, rs * vk.std_error), nsig)
    vdp = volume(polar(D), resolution, mc)
    out["jensen"] = _check(
        "jensen", vdp.value, 2.0**-n * vp.value,
        math.hypot(vdp.std_error, 2.0**-n * vp.std_error), nsig)
    return out


def rogers_shephard_ratio(K: ConvexBody, resolution: int | None = None,
                          mc: McConfig | None = None) -> RunReport:
    """``Vol(K - K) / Vol K`` (equals C(2n, n) exactly for simplices)."""
    a = volume(difference_body(K), resolution, mc)
    b = volume(K, resolution, mc)
    r = a.value / b.value
    err = r * math.hypot(a.std_error / a.value, b.std_error / b.value)
    return RunReport(r, err, a.budget_used + b.budget_used, seed=a.seed)


def reference_bodies(n: int) -> dict[str, ConvexBody]:
    return {"ball": ball(n), "cube": cube(n), "simplex": simplex(n)}
