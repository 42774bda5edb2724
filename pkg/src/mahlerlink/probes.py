"""Monte Carlo probes of statistics on ``K x K°`` and of the diamond body.

The probes are evidence generators: they report values with error bars
next to the value for the ellipsoid of the same dimension, and never
decide the conjectured direction themselves.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import dblquad
from scipy.special import betainc

from .bodies import ConvexBody, custom_body, polar
from .core import GeometryError, McConfig, ball_volume, uniform_sphere
from .necks import Neck, body_necks, diamond_volume
from .volumes import mahler_volume, volume


@dataclass
class ProbeReport:
    """A probe statistic with its standard error and ellipsoid comparison."""

    statistic: str
    value: float
    std_error: float
    body: str
    comparison: float | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.std_error >= 0:
            raise ValueError("std_error must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


def _require_symmetric(K: ConvexBody):
    if not K.symmetric:
        raise GeometryError("probe statistics are defined for symmetric bodies")


def bounding_box(K: ConvexBody) -> np.ndarray:
    """Half-widths ``max(h(e_i), h(-e_i))`` of the smallest enclosing box."""
    E = np.eye(K.n)
    return np.maximum(K.support(E), K.support(-E))


def sample_uniform(K: ConvexBody, rng: np.random.Generator, count: int
                   ) -> np.ndarray:
    """Uniform points of K by rejection from its bounding box.

    Drawing a uniform direction and the radius ``u^(1/n) / gauge`` gives
    density proportional to ``gauge^-n`` of the direction, which is uniform
    only for balls, so rejection is used instead.
    """
    half = bounding_box(K)
    out = []
    got = 0
    while got < count:
        m = max(2 * (count - got), 64)
        z = (2 * rng.random((m, K.n)) - 1) * half
        z = z[K.gauge(z) <= 1.0]
        out.append(z)
        got += len(z)
    return np.concatenate(out)[:count]


def _pair_batches(K: ConvexBody, mc: McConfig):
    P = polar(K)
    for rng, size in mc.batches():
        yield sample_uniform(K, rng, size), sample_uniform(P, rng, size)


# ---------------------------------------------------------------------------
# pairing statistics
# ---------------------------------------------------------------------------


def ball_xy_moment(n: int) -> float:
    """``E[(x.y)^2]`` for independent uniform x, y in B_n: ``n / (n+2)^2``."""
    return n / (n + 2) ** 2


def xy_second_moment(K: ConvexBody, mc: McConfig) -> ProbeReport:
    """``E[(x.y)^2]`` for independent uniform ``x in K`` and ``y in K°``."""
    _require_symmetric(K)
    s = s2 = 0.0
    for x, y in _pair_batches(K, mc):
        v = np.sum(x * y, axis=1) ** 2
        s += math.fsum(v)
        s2 += math.fsum(v * v)
    N = mc.sample_count
    mean = s / N
    se = math.sqrt(max(s2 / N - mean * mean, 0.0) / max(N - 1, 1))
    return ProbeReport("xy_second_moment", mean, se, K.describe(),
                       ball_xy_moment(K.n), {"samples": N, "seed": mc.seed})


def sphere_cap_probability(n: int, c: float) -> float:
    """``P[u_1 >= c]`` for u uniform on S^(n-1)."""
    if c <= -1:
        return 1.0
    if c >= 1:
        return 0.0
    if n == 1:
        return 0.5 if c <= 0 else 0.0
    tail = 0.5 * betainc((n - 1) / 2, 0.5, 1 - c * c)
    return float(tail if c >= 0 else 1 - tail)


def ball_pairing_tail(n: int, c: float, normalized: bool) -> float:
    """``p_B(c)`` or ``q_B(c)`` for the Euclidean ball.

    ``q`` is a spherical cap probability.  For ``p`` the radii have density
    ``n r^(n-1)`` and the cap threshold is ``c / (r1 r2)``.
    """
    if normalized:
        return sphere_cap_probability(n, c)
    val, _ = dblquad(lambda r2, r1: n * n * (r1 * r2) ** (n - 1)
                     * sphere_cap_probability(n, c / (r1 * r2)),
                     0, 1, 0, 1, epsabs=1e-11, epsrel=1e-10)
    return val


def pairing_tail(K: ConvexBody, c: float, normalized: bool, mc: McConfig
                 ) -> ProbeReport:
    """``p_K(c) = P[x.y >= c]`` or ``q_K(c) = P[x.y >= c ||x||_K ||y||_K°]``.

    The standard error is the binomial one.
    """
    _require_symmetric(K)
    hits = 0
    for x, y in _pair_batches(K, mc):
        xy = np.sum(x * y, axis=1)
        if normalized:
            thr = c * K.gauge(x) * K.support(y)
        else:
            thr = c
        hits += int(np.sum(xy >= thr))
    N = mc.sample_count
    p = hits / N
    se = math.sqrt(p * (1 - p) / N)
    name = "q_K" if normalized else "p_K"
    return ProbeReport(name, p, se, K.describe(),
                       ball_pairing_tail(K.n, c, normalized),
                       {"c": c, "samples": N, "seed": mc.seed})


# ---------------------------------------------------------------------------
# isotropic constant
# ---------------------------------------------------------------------------


def ball_isotropic_constant_sq(n: int) -> float:
    """``L(B_n)^2 = 1 / ((n+2) Vol(B_n)^(2/n))``."""
    return 1.0 / ((n + 2) * ball_volume(n) ** (2.0 / n))


def isotropic_constant(K: ConvexBody, mc: McConfig, groups: int = 20
                       ) -> ProbeReport:
    """Squared isotropic constant ``L(K)^2``.

    With covariance ``S`` of the uniform measure on K, the volume-preserving
    map ``T = det(S)^(1/2n) S^(-1/2)`` puts K in isotropic position, where
    ``E|Tx|^2 = n det(S)^(1/n)``; hence ``L^2 = det(S)^(1/n) / Vol(K)^(2/n)``.
    The error bar comes from the spread over ``groups`` disjoint subsamples.
    """
    _require_symmetric(K)
    xs = []
    for rng, size in mc.batches():
        xs.append(sample_uniform(K, rng, size))
    x = np.concatenate(xs)
    n = K.n
    vol = volume(K).value

    def stat(pts):
        S = pts.T @ pts / len(pts)  # symmetric body: mean is 0
        d = np.linalg.det(S)
        if not d > 0:
            raise GeometryError("singular covariance; degenerate body")
        return d ** (1.0 / n) / vol ** (2.0 / n)

    value = stat(x)
    parts = [stat(g) for g in np.array_split(x, groups)]
    se = float(np.std(parts, ddof=1) / math.sqrt(groups))
    return ProbeReport("isotropic_constant_sq", value, se, K.describe(),
                       ball_isotropic_constant_sq(n),
                       {"samples": len(x), "seed": mc.seed, "volume": vol})


# ---------------------------------------------------------------------------
# diamond convexity
# ---------------------------------------------------------------------------


def _normalize(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _join_point(n_plus, n_minus, a1, a2, t):
    P = n_plus.chart(_normalize(a1))
    Q = n_minus.chart(_normalize(a2))
    return (1 - t)[:, None] * P + t[:, None] * Q


def _radial_solve(n_plus, n_minus, w, a1, a2, t, iters=40, tol=1e-11):
    """Solve ``join(a1, a2, t) parallel to w`` by Gauss-Newton.

    Returns the radius ``join . w`` and a convergence mask.
    """
    m, k1 = a1.shape
    z = np.concatenate([a1, a2, t[:, None]], axis=1)
    d = z.shape[1]

    def resid(z):
        J = _join_point(n_plus, n_minus, z[:, :k1], z[:, k1:-1], z[:, -1])
        return J - np.sum(J * w, axis=1, keepdims=True) * w, J

    h = 1e-7
    for _ in range(iters):
        F, J = resid(z)
        if np.max(np.linalg.norm(F, axis=1)) < tol:
            break
        Jac = np.empty((m, F.shape[1], d))
        for j in range(d):
            dz = np.zeros(d)
            dz[j] = h
            Jac[:, :, j] = (resid(z + dz)[0] - resid(z - dz)[0]) / (2 * h)
        step = np.einsum("mij,mj->mi", np.linalg.pinv(Jac, rcond=1e-10), F)
        z = z - step
        z[:, -1] = np.clip(z[:, -1], 0.0, 1.0)
        z[:, :k1] = _normalize(z[:, :k1])
        z[:, k1:-1] = _normalize(z[:, k1:-1])
    F, J = resid(z)
    radius = np.sum(J * w, axis=1)
    ok = (np.linalg.norm(F, axis=1) < 1e-8) & (radius > 0)
    return radius, ok


def _param_samples(neck: Neck, rng, m):
    k = neck.param_dim + 1
    return uniform_sphere(rng, m, k)


def diamond_convexity_sample(K: ConvexBody | None = None, samples: int = 2000,
                             seed: int = 0, necks: tuple[Neck, Neck] | None = None,
                             tol: float = 1e-7) -> ProbeReport:
    """Midpoint convexity test of ``∂K⋄ = K+ * K-``.

    Pairs of join points ``(1-t) p + t q`` are drawn, and each midpoint is
    compared with the boundary radius of ``K⋄`` in its direction, found by
    solving for the join point on that ray.  A midpoint beyond the boundary
    is a violation; the worst one is returned as a certificate.  ``necks``
    may replace ``body_necks(K)`` to test arbitrary neck pairs.
    """
    if necks is None:
        if K is None:
            raise ValueError("need a body or a neck pair")
        necks = body_necks(K)
        label = K.describe()
    else:
        label = f"{necks[0].label}*{necks[1].label}"
    n_plus, n_minus = necks
    rng = np.random.default_rng(seed)
    a = [_param_samples(n_plus, rng, samples) for _ in range(2)]
    b = [_param_samples(n_minus, rng, samples) for _ in range(2)]
    t = [rng.random(samples) for _ in range(2)]
    z1 = _join_point(n_plus, n_minus, a[0], b[0], t[0])
    z2 = _join_point(n_plus, n_minus, a[1], b[1], t[1])
    mid = 0.5 * (z1 + z2)
    r_mid = np.linalg.norm(mid, axis=1)
    keep = r_mid > 1e-6
    w = mid / np.maximum(r_mid, 1e-300)[:, None]
    radius = np.full(samples, np.nan)
    solved = np.zeros(samples, bool)
    # starts: blended parameters, then each endpoint's own parameters
    starts = [(_blend(a[0], a[1], rng), _blend(b[0], b[1], rng),
               0.5 * (t[0] + t[1])),
              (a[0], b[0], t[0]), (a[1], b[1], t[1])]
    for s1, s2, s3 in starts:
        todo = keep & ~solved
        if not np.any(todo):
            break
        rad, ok = _radial_solve(n_plus, n_minus, w[todo], s1[todo], s2[todo],
                                s3[todo].copy())
        idx = np.nonzero(todo)[0]
        radius[idx[ok]] = rad[ok]
        solved[idx[ok]] = True
    excess = np.where(solved, r_mid / radius - 1.0, np.nan)
    viol = solved & (excess > tol)
    cert = None
    if np.any(viol):
        i = int(np.nanargmax(np.where(viol, excess, -np.inf)))
        cert = {"p": z1[i].tolist(), "q": z2[i].tolist(),
                "midpoint_radius": float(r_mid[i]),
                "boundary_radius": float(radius[i]),
                "excess": float(excess[i])}
    count = int(np.sum(viol))
    return ProbeReport("diamond_convexity_violations", float(count), 0.0, label,
                       0.0, {"samples": samples, "solved": int(np.sum(solved)),
                             "max_excess": float(np.nanmax(excess)) if np.any(solved) else None,
                             "certificate": cert, "seed": seed})


def _blend(u, v, rng):
    s = u + v
    bad = np.linalg.norm(s, axis=1) < 1e-3
    if np.any(bad):
        s[bad] = u[bad] + 0.1 * rng.standard_normal(u[bad].shape)
    return _normalize(s)


def star_body(radial, n: int = 2) -> ConvexBody:
    """Planar star-shaped body with smooth radial function ``radial(phi)``.

    Used to build deliberately nonconvex test inputs; the support oracle is
    a crude grid maximum and only serves bounding-box purposes.
    """
    if n != 2:
        raise ValueError("star bodies are planar")
    phis = np.linspace(0, 2 * np.pi, 4096, endpoint=False)
    rim = radial(phis)[:, None] * np.column_stack([np.cos(phis), np.sin(phis)])

    def gauge(x):
        x = np.asarray(x, dtype=float)
        phi = np.arctan2(x[..., 1], x[..., 0])
        return np.linalg.norm(x, axis=-1) / radial(phi)

    def support(y):
        return np.max(np.asarray(y, dtype=float) @ rim.T, axis=-1)

    return custom_body(2, gauge, support, family="star")


# ---------------------------------------------------------------------------
# Hanner equality
# ---------------------------------------------------------------------------


def hanner_equality(K: ConvexBody, resolution: int | None = None,
                    smoothing_p=None) -> ProbeReport:
    """Relative gap ``(v(K) - Vol K⋄) / v(K)``.

    For nonsmooth bodies the diamond volume is taken from the l_p smoothing
    sequence and extrapolated in ``1/p``; the gap at the largest p is kept
    in the details.  Hanner polytopes should give a gap near 0; other
    bodies a positive gap.
    """
    _require_symmetric(K)
    dia = diamond_volume(K, resolution, smoothing_p)
    mv = mahler_volume(K)
    d_ext = dia.details.get("extrapolated", dia.value)
    gap_last = (mv.mahler - dia.value) / mv.mahler
    gap = (mv.mahler - d_ext) / mv.mahler
    if dia.details.get("smoothing"):
        seq = dia.details["sequence"]
        # extrapolation error: distance from the last smoothing value
        d_err = abs(d_ext - seq[-1]) if len(seq) > 1 else dia.std_error
        d_err = max(dia.std_error, 0.5 * d_err)
    else:
        d_err = dia.std_error
    se = math.hypot(d_err, mv.std_error * d_ext / mv.mahler) / mv.mahler
    return ProbeReport("hanner_gap", gap, se, K.describe(), 0.0,
                       {"mahler": mv.mahler, "diamond": dia.value,
                        "diamond_extrapolated": d_ext, "gap_last": gap_last,
                        "smoothing": dia.details.get("smoothing"),
                        "sequence": dia.details.get("sequence"),
                        "monotone": dia.details.get("monotone")})
