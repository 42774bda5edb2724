"""Gauss linking integrals for closed curves in S^3 and H^3.

The spherical integral is

    lk = int int f(alpha) det[x, y, x', y'] ds dt,   alpha = arccos(x . y),

with ``f(alpha) = ((pi - alpha) cos alpha + sin alpha) / (4 pi^2 sin^3 alpha)``.
In H^3 (the sheet ``x1 > 0`` of ``x . x = 1`` in signature (1, 3)) the
kernel is ``cosh alpha / (4 pi sinh^3 alpha)`` with ``cosh alpha = x . y``.
Two independent estimates are provided: a signed crossing count of a
stereographic projection, and the Monte Carlo estimator that counts signed
intersections of the geodesic cone from a random point over one curve with
the other curve.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.stats import special_ortho_group

from .core import GeometryError, IntegrationError, McConfig, sphere_frame, wedge_index
from .kernels import s3_kernel

SPACES = ("sphere3", "hyperbolic3")
MIN_SEPARATION = 0.05
H3_METRIC = np.diag([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class ClosedCurve:
    """Smooth closed curve ``[0, 2 pi) -> R^4`` on S^3 or on H^3."""

    space: str
    chart: Callable = field(repr=False)
    derivative: Callable = field(repr=False)
    label: str = "curve"

    def __post_init__(self):
        if self.space not in SPACES:
            raise ValueError(f"space must be one of {SPACES}")

    def sample(self, count: int):
        t = 2.0 * np.pi * np.arange(count) / count
        return self.chart(t), self.derivative(t)

    def reversed(self) -> "ClosedCurve":
        return ClosedCurve(self.space, lambda t: self.chart(-np.asarray(t)),
                           lambda t: -self.derivative(-np.asarray(t)),
                           self.label + "-rev")

    def transformed(self, M) -> "ClosedCurve":
        """Image under a linear isometry ``M`` of the ambient space."""
        M = np.asarray(M, dtype=float)
        return ClosedCurve(self.space, lambda t: self.chart(t) @ M.T,
                           lambda t: self.derivative(t) @ M.T, self.label)

    def regularity(self, count: int = 512) -> tuple[float, float]:
        """Largest constraint violation and smallest speed on a sample."""
        x, dx = self.sample(count)
        if self.space == "sphere3":
            err = np.abs(np.sum(x * x, axis=1) - 1)
        else:
            err = np.abs(np.einsum("mi,ij,mj->m", x, H3_METRIC, x) - 1)
        return float(np.max(err)), float(np.min(np.linalg.norm(dx, axis=1)))


def trig_curve(space: str, cos_coeffs, sin_coeffs, label: str = "trig"
               ) -> ClosedCurve:
    """Curve from a trigonometric polynomial.

    ``cos_coeffs[k]`` and ``sin_coeffs[k]`` are the vectors multiplying
    ``cos kt`` and ``sin kt``.  On S^3 the polynomial (in R^4) is
    normalized to unit length.  On H^3 the polynomial gives the spatial
    part ``s(t)`` in R^3 and the curve is ``(sqrt(1 + |s|^2), s)``.
    """
    C = np.atleast_2d(np.asarray(cos_coeffs, dtype=float))
    S = np.atleast_2d(np.asarray(sin_coeffs, dtype=float))
    if C.shape != S.shape:
        raise ValueError("cosine and sine coefficient arrays differ in shape")
    width = 4 if space == "sphere3" else 3
    if C.shape[1] != width:
        raise ValueError(f"{space} coefficients need {width} components")
    k = np.arange(C.shape[0])

    def raw(t):
        t = np.asarray(t, dtype=float)[:, None]
        c, s = np.cos(k * t), np.sin(k * t)
        return c @ C + s @ S, (-k * s) @ C + (k * c) @ S

    if space == "sphere3":
        def chart(t):
            p, _ = raw(t)
            return p / np.linalg.norm(p, axis=1, keepdims=True)

        def derivative(t):
            p, dp = raw(t)
            r = np.linalg.norm(p, axis=1, keepdims=True)
            u = p / r
            return (dp - np.sum(dp * u, axis=1, keepdims=True) * u) / r
    elif space == "hyperbolic3":
        def chart(t):
            s, _ = raw(t)
            return np.concatenate(
                [np.sqrt(1 + np.sum(s * s, axis=1, keepdims=True)), s], axis=1)

        def derivative(t):
            s, ds = raw(t)
            r = np.sqrt(1 + np.sum(s * s, axis=1, keepdims=True))
            return np.concatenate([np.sum(s * ds, axis=1, keepdims=True) / r,
                                   ds], axis=1)
    else:
        raise ValueError(f"unknown space {space!r}")
    return ClosedCurve(space, chart, derivative, label)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------


def _circle(space, center, u, v, radius=1.0, freq=1, label="circle"):
    C = np.zeros((freq + 1, 4 if space == "sphere3" else 3))
    S = np.zeros_like(C)
    C[0] = center
    C[freq] = radius * np.asarray(u, dtype=float)
    S[freq] = radius * np.asarray(v, dtype=float)
    return trig_curve(space, C, S, label)


def hopf_pair() -> tuple[ClosedCurve, ClosedCurve]:
    """Two orthogonal great circles, oriented to link +1."""
    e = np.eye(4)
    c1 = _circle("sphere3", 0, e[0], e[1], label="hopf-1")
    c2 = _circle("sphere3", 0, e[2], -e[3], label="hopf-2")
    return c1, c2


def unlinked_pair(r: float = 0.3) -> tuple[ClosedCurve, ClosedCurve]:
    """Two small circles around distant centers."""
    e = np.eye(4)
    h = math.sqrt(1 - r * r)
    c1 = _circle("sphere3", h * e[0], e[1], e[2], r, label="small-1")
    c2 = _circle("sphere3", h * e[3], e[0], e[2], r, label="small-2")
    return c1, c2


def doubled_pair(r: float = 0.3) -> tuple[ClosedCurve, ClosedCurve]:
    """A great circle and a curve winding twice around it (lk = 2)."""
    e = np.eye(4)
    c1 = _circle("sphere3", 0, e[0], e[1], label="core")
    h = math.sqrt(1 - r * r)
    C = np.zeros((3, 4))
    S = np.zeros((3, 4))
    C[1] = r * e[0]
    S[1] = r * e[1]
    C[2] = h * e[2]
    S[2] = -h * e[3]
    c2 = trig_curve("sphere3", C, S, "doubled")
    return c1, c2


def perturbed(curve_coeffs, rng, amplitude, degree=3):
    C, S = curve_coeffs
    width = C.shape[1]
    C2 = np.zeros((max(C.shape[0], degree + 1), width))
    S2 = np.zeros_like(C2)
    C2[:C.shape[0]] = C
    S2[:S.shape[0]] = S
    C2[1:] += amplitude * rng.standard_normal(C2[1:].shape) / np.arange(1, C2.shape[0])[:, None]
    S2[1:] += amplitude * rng.standard_normal(S2[1:].shape) / np.arange(1, C2.shape[0])[:, None]
    return C2, S2


def random_isotopy_pair(seed: int, amplitude: float = 0.08
                        ) -> tuple[ClosedCurve, ClosedCurve]:
    """Hopf pair moved by a random rotation and small harmonics (lk = 1)."""
    rng = np.random.default_rng(seed)
    e = np.eye(4)
    base1 = (np.array([np.zeros(4), e[0]]), np.array([np.zeros(4), e[1]]))
    base2 = (np.array([np.zeros(4), e[2]]), np.array([np.zeros(4), -e[3]]))
    R = special_ortho_group.rvs(4, random_state=rng)
    curves = []
    for i, base in enumerate((base1, base2)):
        C, S = perturbed(base, rng, amplitude)
        curves.append(trig_curve("sphere3", C @ R.T, S @ R.T,
                                 f"isotopy{seed}-{i + 1}"))
    return curves[0], curves[1]


def hyperbolic_hopf_pair(radius: float = 0.1) -> tuple[ClosedCurve, ClosedCurve]:
    """Small Hopf-style pair in H^3 near ``e1``, linked once.

    In the spatial coordinates the first circle lies in the (x2, x3) plane
    around 0 and the second passes through its center in the (x2, x4) plane.
    """
    e = np.eye(3)
    c1 = _circle("hyperbolic3", 0, e[0], e[1], radius, label="h-hopf-1")
    c2 = _circle("hyperbolic3", radius * e[0], e[0], e[2], radius,
                 label="h-hopf-2")
    return c1, c2


def hyperbolic_unlinked_pair(radius: float = 0.2, gap: float = 3.0):
    e = np.eye(3)
    c1 = _circle("hyperbolic3", 0, e[0], e[1], radius, label="h-far-1")
    c2 = _circle("hyperbolic3", gap * e[2], e[0], e[1], radius, label="h-far-2")
    return c1, c2


PRESETS = {
    "hopf": hopf_pair,
    "unlinked": unlinked_pair,
    "doubled": doubled_pair,
    "hyperbolic-hopf": hyperbolic_hopf_pair,
    "hyperbolic-unlinked": hyperbolic_unlinked_pair,
}


def preset(name: str):
    if name.startswith("isotopy"):
        return random_isotopy_pair(int(name[7:] or 0))
    try:
        return PRESETS[name]()
    except KeyError:
        raise ValueError(f"unknown preset {name!r}") from None


def lorentz_boost(rapidity: float, axis: int = 1) -> np.ndarray:
    """Timelike rotation of R^(1,3) mixing x1 with ``x_(axis+1)``."""
    M = np.eye(4)
    c, s = math.cosh(rapidity), math.sinh(rapidity)
    M[0, 0] = M[axis, axis] = c
    M[0, axis] = M[axis, 0] = s
    return M


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


@dataclass
class LinkReport:
    method: str
    value: float
    rounded: int
    residual: float
    std_error: float = 0.0
    seed: int | None = None
    details: dict = field(default_factory=dict)

    @classmethod
    def from_value(cls, method, value, std_error=0.0, seed=None, **details):
        r = int(round(value))
        return cls(method, float(value), r, abs(value - r), std_error, seed,
                   details)

    @property
    def link_value(self) -> float:
        return self.value

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("details")
        return d


# ---------------------------------------------------------------------------
# kernel quadrature
# ---------------------------------------------------------------------------


def _det_pairs(x, dx, y, dy):
    """Matrix of ``det[x_i, y_j, x'_i, y'_j]`` via Plücker coordinates."""
    subsets, comp, sign = wedge_index(4, 2)
    P = x[:, subsets[:, 0]] * dx[:, subsets[:, 1]] - x[:, subsets[:, 1]] * dx[:, subsets[:, 0]]
    Q = y[:, subsets[:, 0]] * dy[:, subsets[:, 1]] - y[:, subsets[:, 1]] * dy[:, subsets[:, 0]]
    # det[x, y, x', y'] = -det[x, x', y, y']
    return -(P * sign) @ Q[:, comp].T


def _kernel_sum(c1, c2, n, kernel_fn, angle_fn):
    x, dx = c1.sample(n)
    y, dy = c2.sample(n)
    total = 0.0
    min_angle = math.inf
    chunk = max(1, int(2e6 // n))
    for i in range(0, n, chunk):
        D = _det_pairs(x[i:i + chunk], dx[i:i + chunk], y, dy)
        ang = angle_fn(x[i:i + chunk], y)
        min_angle = min(min_angle, float(np.min(ang)))
        if min_angle < MIN_SEPARATION:
            raise GeometryError(
                f"curves come within {min_angle:.3g} of each other; the kernel "
                f"quadrature needs separation >= {MIN_SEPARATION}")
        total += float(np.sum(kernel_fn(ang) * D))
    return total * (2 * np.pi / n) ** 2, min_angle


def _adaptive(c1, c2, kernel_fn, angle_fn, method, start, max_nodes, rtol):
    n = start
    prev, _ = _kernel_sum(c1, c2, n, kernel_fn, angle_fn)
    while True:
        n *= 2
        if n > max_nodes:
            raise IntegrationError("linking quadrature did not converge")
        val, min_angle = _kernel_sum(c1, c2, n, kernel_fn, angle_fn)
        if abs(val - prev) <= rtol * max(1.0, abs(val)):
            return LinkReport.from_value(method, val, abs(val - prev),
                                         nodes=n, min_angle=min_angle)
        prev = val


def _check_space(c1, c2, space):
    if c1.space != space or c2.space != space:
        raise ValueError(f"both curves must live in {space}")


def link_sphere(c1: ClosedCurve, c2: ClosedCurve, start: int = 64,
                max_nodes: int = 4096, rtol: float = 1e-6) -> LinkReport:
    """Linking number of two curves in S^3 by the invariant kernel integral.

    The product trapezoid rule (spectrally accurate for smooth periodic
    integrands) is doubled from ``start`` nodes per curve until successive
    values agree to ``rtol``.
    """
    _check_space(c1, c2, "sphere3")
    kern = s3_kernel(alpha_min=1e-6)

    def angle(x, y):
        return np.arccos(np.clip(x @ y.T, -1.0, 1.0))

    return _adaptive(c1, c2, kern.f_fn, angle, "kernel", start, max_nodes, rtol)


def hyperbolic_kernel_scaled(alpha):
    """``cosh alpha / (4 pi sinh^3 alpha)``."""
    return np.cosh(alpha) / (4 * np.pi * np.sinh(alpha) ** 3)


def link_hyperbolic(c1: ClosedCurve, c2: ClosedCurve, start: int = 64,
                    max_nodes: int = 4096, rtol: float = 1e-6) -> LinkReport:
    """Linking number of two curves in H^3 (signature (1, 3), sheet x1 > 0)."""
    _check_space(c1, c2, "hyperbolic3")

    def angle(x, y):
        return np.arccosh(np.maximum(x @ H3_METRIC @ y.T, 1.0))

    return _adaptive(c1, c2, hyperbolic_kernel_scaled, angle, "kernel", start,
                     max_nodes, rtol)


# ---------------------------------------------------------------------------
# crossing oracle
# ---------------------------------------------------------------------------


def gauss_linking_r3(p, dp, q, dq) -> float:
    """Classical Gauss integral for sampled closed curves in R^3.

    ``p, dp`` (and ``q, dq``) are positions and derivatives at equispaced
    parameters in ``[0, 2 pi)``.
    """
    d = p[:, None, :] - q[None, :, :]
    cr = np.cross(dp[:, None, :], dq[None, :, :])
    val = np.einsum("ijk,ijk->ij", d, cr) / np.linalg.norm(d, axis=2) ** 3
    return float(np.sum(val) * (2 * np.pi / len(p)) * (2 * np.pi / len(q)) / (4 * np.pi))


def _rotation_to_e4(q) -> np.ndarray:
    """Proper rotation of R^4 taking the unit vector q to e4."""
    rest = sphere_frame(q[None, :])[0]  # (3, 4), det[q, rest] = +1
    R = np.vstack([rest, q])  # rows; det R = det[rest; q] = -det[q; rest]
    if np.linalg.det(R) < 0:
        R[0] = -R[0]
    return R


def stereographic(x) -> np.ndarray:
    """Projection of S^3 minus e4 to R^3: ``x_123 / (1 - x_4)``."""
    return x[..., :3] / (1.0 - x[..., 3:4])


def _planar_crossings(P, Q, eps=1e-9):
    """Signed crossings between two closed polylines projected to the xy-plane.

    Returns the Gauss-convention linking number (half the signed sum of
    inter-curve crossings) or None when the projection is degenerate.
    """
    a, b = P, np.roll(P, -1, axis=0)
    c, d = Q, np.roll(Q, -1, axis=0)
    r = (b - a)[:, None, :2]
    s = (d - c)[None, :, :2]
    qp = c[None, :, :2] - a[:, None, :2]
    den = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (qp[..., 0] * s[..., 1] - qp[..., 1] * s[..., 0]) / den
        v = (qp[..., 0] * r[..., 1] - qp[..., 1] * r[..., 0]) / den
    hit = (u >= 0) & (u < 1) & (v >= 0) & (v < 1)
    close = (np.abs(den) < eps) | (np.minimum(u, 1 - u) < eps) | (np.minimum(v, 1 - v) < eps)
    box = (u > -eps) & (u < 1 + eps) & (v > -eps) & (v < 1 + eps)
    if np.any(close & box):
        return None
    total = 0
    for i, j in zip(*np.nonzero(hit)):
        z1 = a[i, 2] + u[i, j] * (b[i, 2] - a[i, 2])
        z2 = c[j, 2] + v[i, j] * (d[j, 2] - c[j, 2])
        if abs(z1 - z2) < eps:
            return None
        t1, t2 = r[i, 0], s[0, j]
        cross = t1[0] * t2[1] - t1[1] * t2[0]
        # right-handed convention with the viewer on the +z side
        sgn = np.sign(cross) if z1 > z2 else -np.sign(cross)
        total += sgn
    return total / 2.0


def _spatial_embedding(c1, c2, rng, count):
    """Closed polylines in R^3 for both curves (orientation of the ambient kept)."""
    x, dx = c1.sample(count)
    y, dy = c2.sample(count)
    if c1.space == "hyperbolic3":
        return x[:, 1:], dx[:, 1:], y[:, 1:], dy[:, 1:]
    # pole far from both curves and their antipodes
    cand = rng.standard_normal((256, 4))
    cand /= np.linalg.norm(cand, axis=1, keepdims=True)
    pts = np.vstack([x, y])
    score = np.min(1 - cand @ pts.T, axis=1)
    q = cand[np.argmax(score)]
    R = _rotation_to_e4(q)
    xr, yr = x @ R.T, y @ R.T
    return stereographic(xr), None, stereographic(yr), None


def crossing_oracle(c1: ClosedCurve, c2: ClosedCurve, count: int = 1024,
                    seed: int = 0, retries: int = 20) -> int:
    """Linking number from a signed crossing count.

    S^3 curves are rotated so that a point far from both goes to ``e4`` and
    are then projected stereographically (orientation preserving near the
    antipode ``-e4``); H^3 curves use their spatial coordinates.  After a
    random rotation the polylines are projected to a plane and the signed
    inter-curve crossings are counted.  The sign is flipped at the end to
    match the ``det[x, y, x', y']`` orientation used by the kernel
    integrals.
    """
    if c1.space != c2.space:
        raise ValueError("curves live in different spaces")
    rng = np.random.default_rng(seed)
    P, _, Q, _ = _spatial_embedding(c1, c2, rng, count)
    for _ in range(retries):
        R = special_ortho_group.rvs(3, random_state=rng)
        lk = _planar_crossings(P @ R.T, Q @ R.T)
        if lk is not None:
            return int(round(-lk))
    raise GeometryError("no generic projection found")


# ---------------------------------------------------------------------------
# cone Monte Carlo
# ---------------------------------------------------------------------------

_VIEWS = np.array([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1],
                   [0, 0, -1], [1, 1, 1], [-1, -1, 1], [1, -1, -1], [-1, 1, -1]],
                  dtype=float)
_VIEWS /= np.linalg.norm(_VIEWS, axis=1, keepdims=True)


def _view_bases():
    out = []
    for w in _VIEWS:
        f = sphere_frame(w[None, :])[0]
        out.append(f)
    return np.array(out)  # (V, 2, 3)


_VIEW_BASES = _view_bases()


def _cone_counts(p, x, dx, y, dy, exclusion):
    """Signed count of intersections of ``cone(c1, p)`` with c2 for each p.

    Points are described from p by their direction in the tangent space
    at p and their distance ``beta``.  A point of c2 lies on the cone when
    its direction equals that of a point of c1 that is farther away.
    """
    B = len(p)
    E = sphere_frame(p)  # (B, 3, 4), orthonormal basis of p-perp
    ux = np.einsum("bkn,mn->bmk", E, x)
    uy = np.einsum("bkn,mn->bmk", E, y)
    bx = np.arccos(np.clip(p @ x.T, -1, 1))
    by = np.arccos(np.clip(p @ y.T, -1, 1))
    ux /= np.linalg.norm(ux, axis=2, keepdims=True)
    uy /= np.linalg.norm(uy, axis=2, keepdims=True)
    # view direction far from both direction curves
    allu = np.concatenate([ux, uy], axis=1)
    score = np.max(np.einsum("bmk,vk->bvm", allu, _VIEWS), axis=2)
    vi = np.argmin(score, axis=1)
    w = _VIEWS[vi]
    basis = _VIEW_BASES[vi]  # (B, 2, 3)

    def project(u):
        den = 1.0 - np.einsum("bmk,bk->bm", u, w)
        return np.einsum("bmk,bjk->bmj", u, basis) / den[..., None]

    X, Y = project(ux), project(uy)
    a, b = X, np.roll(X, -1, axis=1)
    c, d = Y, np.roll(Y, -1, axis=1)
    r = (b - a)[:, :, None, :]
    s = (d - c)[:, None, :, :]
    qp = c[:, None, :, :] - a[:, :, None, :]
    den = r[..., 0] * s[..., 1] - r[..., 1] * s[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (qp[..., 0] * s[..., 1] - qp[..., 1] * s[..., 0]) / den
        v = (qp[..., 0] * r[..., 1] - qp[..., 1] * r[..., 0]) / den
    hit = (u >= 0) & (u < 1) & (v >= 0) & (v < 1)
    counts = np.zeros(B)
    m = x.shape[0]
    for bi, i, j in zip(*np.nonzero(hit)):
        uu, vv = u[bi, i, j], v[bi, i, j]
        i2, j2 = (i + 1) % m, (j + 1) % y.shape[0]
        b1 = bx[bi, i] + uu * (bx[bi, i2] - bx[bi, i])
        b2 = by[bi, j] + vv * (by[bi, j2] - by[bi, j])
        if b2 >= b1:
            continue
        xs = x[i] + uu * (x[i2] - x[i])
        ys = y[j] + vv * (y[j2] - y[j])
        dxs = dx[i] + uu * (dx[i2] - dx[i])
        dys = dy[j] + vv * (dy[j2] - dy[j])
        det = np.linalg.det(np.column_stack([xs, ys, dxs, dys]))
        counts[bi] += np.sign(det)
    return counts


def cone_mc_estimator(c1: ClosedCurve, c2: ClosedCurve, mc: McConfig,
                      nodes: int = 128, exclusion: float = 0.05) -> LinkReport:
    """Linking number as the expected signed count ``C(c1, p) . c2``.

    ``p`` is uniform on S^3.  Samples within ``exclusion`` of c1, c2 or
    ``-c1`` are redrawn.  For generic p the count equals the linking number,
    so the sample variance mostly measures discretization failures.
    """
    _check_space(c1, c2, "sphere3")
    x, dx = c1.sample(nodes)
    y, dy = c2.sample(nodes)
    avoid = np.vstack([x, y, -x])
    cos_ex = math.cos(exclusion)
    total = 0.0
    total_sq = 0.0
    drawn = 0
    resampled = 0
    for rng, size in mc.batches():
        got = np.empty((0, 4))
        while len(got) < size:
            z = rng.standard_normal((size, 4))
            z /= np.linalg.norm(z, axis=1, keepdims=True)
            ok = np.max(z @ avoid.T, axis=1) < cos_ex
            resampled += int(np.sum(~ok))
            got = np.vstack([got, z[ok]])
        got = got[:size]
        for i in range(0, size, 64):
            cnt = _cone_counts(got[i:i + 64], x, dx, y, dy, exclusion)
            total += float(np.sum(cnt))
            total_sq += float(np.sum(cnt * cnt))
        drawn += size
    mean = total / drawn
    var = max(total_sq / drawn - mean * mean, 0.0)
    se = math.sqrt(var / max(drawn - 1, 1))
    return LinkReport.from_value("cone_mc", mean, se, mc.seed,
                                 samples=drawn, resampled=resampled)


# ---------------------------------------------------------------------------
# window density
# ---------------------------------------------------------------------------


def window_density(alpha, beta):
    """Density ``sin(beta - alpha) sin(beta) / (2 pi^2 sin^3 alpha)``.

    It is zero for ``beta < alpha``, where the window is empty.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    if np.any((alpha <= 0) | (alpha >= np.pi)):
        raise ValueError("alpha must lie in (0, pi)")
    val = np.sin(beta - alpha) * np.sin(beta) / (2 * np.pi**2 * np.sin(alpha) ** 3)
    out = np.where(beta < alpha, 0.0, val)
    return float(out) if out.ndim == 0 else out


def window_integral(alpha: float) -> float:
    """``int_alpha^pi window_density(alpha, beta) d beta`` by adaptive quadrature."""
    val, _ = quad(lambda b: window_density(alpha, b), alpha, np.pi,
                  epsabs=1e-14, epsrel=1e-13, limit=200)
    return val
