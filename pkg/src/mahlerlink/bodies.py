"""Convex bodies as oracle bundles.

A body is described by its gauge (Minkowski functional) and its support
function, which is the gauge of the polar body, together with their
gradients.  All oracles are vectorized over leading axes: an array of
shape ``(..., n)`` maps to ``(...)`` (or ``(..., n)`` for gradients).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .core import DimensionError, GeometryError, sphere_grid

Oracle = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ConvexBody:
    """Gauge/support oracle bundle for a convex body with 0 in its interior.

    Attributes
    ----------
    n : int
        Ambient dimension.
    gauge, support : callable
        ``||x||_K`` and ``h_K(y) = ||y||_{K°}``.
    gauge_gradient, support_gradient : callable
        Their gradients (subgradients almost everywhere for polytopes).
    symmetric : bool
        Whether ``K = -K``.
    smooth : bool
        Whether the gauge is C^2 away from the origin.
    polar_smooth : bool
        Whether the support function is C^2 away from the origin.
    family : str
        Descriptive tag such as ``"cube"`` or ``"lp_ball"``.
    smoothing : callable or None
        ``p -> ConvexBody``, a smooth approximation that converges to this
        body as ``p`` grows (nonsmooth families only).
    """

    n: int
    gauge: Oracle = field(repr=False)
    support: Oracle = field(repr=False)
    gauge_gradient: Oracle = field(repr=False)
    support_gradient: Oracle = field(repr=False)
    symmetric: bool = True
    smooth: bool = True
    polar_smooth: bool = True
    family: str = "custom"
    params: dict = field(default_factory=dict, repr=False)
    smoothing: Callable[[float], "ConvexBody"] | None = field(default=None, repr=False)
    c1: bool = True

    def describe(self) -> str:
        extra = ", ".join(f"{k}={v}" for k, v in self.params.items()
                          if isinstance(v, (int, float, str)))
        return f"{self.family}(n={self.n}{', ' + extra if extra else ''})"


def _as_points(x, n):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != n:
        raise DimensionError(f"expected vectors of length {n}, got {x.shape[-1]}")
    return x


def numeric_gradient(fn: Oracle, rel_step: float = 1e-5) -> Oracle:
    """Central-difference gradient with a step relative to ``|x|``."""

    def grad(x):
        x = np.asarray(x, dtype=float)
        h = rel_step * np.maximum(np.linalg.norm(x, axis=-1, keepdims=True), 1e-12)
        out = np.empty_like(x)
        for i in range(x.shape[-1]):
            e = np.zeros(x.shape[-1])
            e[i] = 1.0
            out[..., i] = (fn(x + h * e) - fn(x - h * e)) / (2 * h[..., 0])
        return out

    return grad


def custom_body(n: int, gauge: Oracle, support: Oracle, gauge_gradient=None,
                support_gradient=None, **flags) -> ConvexBody:
    """Body from user oracles; missing gradients use central differences."""
    return ConvexBody(n, gauge, support,
                      gauge_gradient or numeric_gradient(gauge),
                      support_gradient or numeric_gradient(support), **flags)


# ---------------------------------------------------------------------------
# families
# ---------------------------------------------------------------------------


def ellipsoid(A) -> ConvexBody:
    """``{x : x^T A^-1 x <= 1}``, the image of the unit ball under A^(1/2)."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or not np.allclose(A, A.T):
        raise ValueError("ellipsoid matrix must be square and symmetric")
    if np.min(np.linalg.eigvalsh(A)) <= 0:
        raise ValueError("ellipsoid matrix must be positive definite")
    Ainv = np.linalg.inv(A)

    def gauge(x):
        x = _as_points(x, n)
        return np.sqrt(np.einsum("...i,ij,...j->...", x, Ainv, x))

    def support(y):
        y = _as_points(y, n)
        return np.sqrt(np.einsum("...i,ij,...j->...", y, A, y))

    def ggrad(x):
        x = _as_points(x, n)
        return (x @ Ainv) / gauge(x)[..., None]

    def sgrad(y):
        y = _as_points(y, n)
        return (y @ A) / support(y)[..., None]

    return ConvexBody(n, gauge, support, ggrad, sgrad, family="ellipsoid",
                      params={"A": A})


def ball(n: int) -> ConvexBody:
    body = lp_ball(n, 2.0)
    return replace(body, family="ball")


def _pnorm(x, p):
    a = np.abs(x)
    if np.isinf(p):
        return np.max(a, axis=-1)
    m = np.max(a, axis=-1)
    safe = np.where(m > 0, m, 1.0)
    return m * np.sum((a / safe[..., None]) ** p, axis=-1) ** (1.0 / p)


def _pnorm_grad(x, p):
    a = np.abs(x)
    nrm = _pnorm(x, p)
    safe = np.where(nrm > 0, nrm, 1.0)
    return np.sign(x) * (a / safe[..., None]) ** (p - 1)


def conjugate_exponent(p: float) -> float:
    """Hölder conjugate ``q = p / (p - 1)`` of ``p >= 1``."""
    if not p >= 1:
        raise ValueError(f"exponent must be at least 1, got {p}")
    if np.isinf(p):
        return 1.0
    if p == 1:
        return math.inf
    return p / (p - 1.0)


def lp_ball(n: int, p: float) -> ConvexBody:
    """Unit ball of the l_p norm, 1 < p < inf; its polar is the l_q ball."""
    if not 1 < p < math.inf:
        raise ValueError(f"l_p ball needs 1 < p < inf, got {p}")
    q = conjugate_exponent(p)

    def gauge(x):
        return _pnorm(_as_points(x, n), p)

    def support(y):
        return _pnorm(_as_points(y, n), q)

    def ggrad(x):
        return _pnorm_grad(_as_points(x, n), p)

    def sgrad(y):
        return _pnorm_grad(_as_points(y, n), q)

    return ConvexBody(n, gauge, support, ggrad, sgrad, smooth=p >= 2,
                      polar_smooth=p <= 2, family="lp_ball", params={"p": p})


def cube(n: int) -> ConvexBody:
    """``C_n = [-1, 1]^n`` with exact piecewise oracles."""

    def gauge(x):
        return np.max(np.abs(_as_points(x, n)), axis=-1)

    def support(y):
        return np.sum(np.abs(_as_points(y, n)), axis=-1)

    def ggrad(x):
        x = _as_points(x, n)
        i = np.argmax(np.abs(x), axis=-1)
        out = np.zeros_like(x)
        np.put_along_axis(out, i[..., None],
                          np.sign(np.take_along_axis(x, i[..., None], -1)), -1)
        return out

    def sgrad(y):
        return np.sign(_as_points(y, n))

    return ConvexBody(n, gauge, support, ggrad, sgrad, smooth=False,
                      polar_smooth=False, c1=False, family="cube",
                      smoothing=lambda p: lp_ball(n, p))


def cross_polytope(n: int) -> ConvexBody:
    """Unit ball of l_1, the polar of the cube."""
    body = polar(cube(n))
    return replace(body, family="cross_polytope",
                   smoothing=lambda p: lp_ball(n, conjugate_exponent(p)))


def simplex_vertices(n: int) -> np.ndarray:
    """Vertices of a regular simplex centered at 0 with unit circumradius."""
    e = np.eye(n + 1) - 1.0 / (n + 1)
    # orthonormal basis of the hyperplane sum = 0
    q, _ = np.linalg.qr(e[:, :n])
    w = e @ q
    return w / np.linalg.norm(w, axis=1, keepdims=True)


def simplex(n: int) -> ConvexBody:
    """Centered regular simplex ``conv(w_0..w_n)`` with ``|w_j| = 1``.

    Its facets are ``-w_j . x <= 1/n``, so the gauge is
    ``max_j (-n w_j . x)`` and the support function is ``max_j w_j . y``.
    """
    w = simplex_vertices(n)

    def gauge(x):
        return np.max(-n * (_as_points(x, n) @ w.T), axis=-1)

    def support(y):
        return np.max(_as_points(y, n) @ w.T, axis=-1)

    def ggrad(x):
        i = np.argmax(-(_as_points(x, n) @ w.T), axis=-1)
        return -n * w[i]

    def sgrad(y):
        i = np.argmax(_as_points(y, n) @ w.T, axis=-1)
        return w[i]

    return ConvexBody(n, gauge, support, ggrad, sgrad, symmetric=False,
                      smooth=False, polar_smooth=False, c1=False,
                      family="simplex", params={"vertices": w})


# ---------------------------------------------------------------------------
# Hanner polytopes
# ---------------------------------------------------------------------------


def hanner_dimension(tree) -> int:
    if tree == "seg":
        return 1
    op, *kids = tree
    if op not in ("prod", "sum") or len(kids) < 2:
        raise ValueError(f"bad Hanner node {tree!r}")
    return sum(hanner_dimension(k) for k in kids)


def _hanner_eval(tree, x, start, mode, p):
    """Value and gradient of the gauge (mode 'gauge') or support function.

    With ``p`` set, max/sum combinations are replaced by l_p / l_q norms of
    the children so that the smoothed gauge and support stay exactly dual.
    """
    if tree == "seg":
        v = np.abs(x[..., start])
        g = np.zeros_like(x)
        g[..., start] = np.sign(x[..., start])
        return v, g, start + 1
    op, *kids = tree
    vals, grads = [], []
    pos = start
    for k in kids:
        v, g, pos = _hanner_eval(k, x, pos, mode, p)
        vals.append(v)
        grads.append(g)
    vals = np.stack(vals, axis=-1)
    grads = np.stack(grads, axis=-1)  # (..., n, kids)
    # in gauge mode a product takes the max (l_inf), a free sum adds (l_1);
    # the support function does the opposite
    use_max = (op == "prod") == (mode == "gauge")
    if p is None:
        if use_max:
            i = np.argmax(vals, axis=-1)
            v = np.take_along_axis(vals, i[..., None], -1)[..., 0]
            g = np.take_along_axis(grads, i[..., None, None], -1)[..., 0]
        else:
            v = np.sum(vals, axis=-1)
            g = np.sum(grads, axis=-1)
    else:
        r = p if use_max else conjugate_exponent(p)
        v = _pnorm(vals, r)
        w = _pnorm_grad(vals, r)
        g = np.einsum("...nk,...k->...n", grads, w)
    return v, g, pos


def hanner(tree, smoothing_p: float | None = None) -> ConvexBody:
    """Hanner polytope from a tree of ``"seg"``, ``("prod", ...)``, ``("sum", ...)``.

    ``"seg"`` is ``[-1, 1]``; ``prod`` is the Cartesian product and ``sum``
    the free sum (convex hull of the union in complementary subspaces).
    The cube is a product of segments and the cross-polytope a free sum.
    With ``smoothing_p`` the body is the l_p / l_q smoothing used to
    approximate it by C^1 bodies.
    """
    n = hanner_dimension(tree)

    def make(mode, which):
        def fn(x):
            x = _as_points(x, n)
            return _hanner_eval(tree, x, 0, mode, smoothing_p)[which]
        return fn

    smooth = False
    polar_smooth = False
    if smoothing_p is not None:
        ops = _hanner_ops(tree)
        if ops <= {"prod"}:
            smooth = smoothing_p >= 2
        if ops <= {"sum"}:
            polar_smooth = smoothing_p >= 2
    return ConvexBody(n, make("gauge", 0), make("support", 0),
                      make("gauge", 1), make("support", 1), smooth=smooth,
                      polar_smooth=polar_smooth, c1=smoothing_p is not None,
                      family="hanner",
                      params={"tree": tree, "p": smoothing_p},
                      smoothing=None if smoothing_p is not None
                      else (lambda p: hanner(tree, p)))


def _hanner_ops(tree) -> set:
    if tree == "seg":
        return set()
    op, *kids = tree
    out = {op}
    for k in kids:
        out |= _hanner_ops(k)
    return out


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def polar(K: ConvexBody) -> ConvexBody:
    """The polar body: gauge and support function trade places."""
    sm = None
    if K.smoothing is not None:
        sm = lambda p: polar(K.smoothing(p))  # noqa: E731
    fam = K.family[:-6] if K.family.endswith("_polar") else K.family + "_polar"
    return ConvexBody(K.n, K.support, K.gauge, K.support_gradient,
                      K.gauge_gradient, symmetric=K.symmetric,
                      smooth=K.polar_smooth, polar_smooth=K.smooth,
                      family=fam, params=K.params, smoothing=sm, c1=K.c1)


def linear_image(K: ConvexBody, T) -> ConvexBody:
    """``T K``: gauge ``g(T^-1 x)``, support ``h(T^T y)``."""
    T = np.asarray(T, dtype=float)
    n = K.n
    if T.shape != (n, n):
        raise DimensionError(f"need an {n}x{n} matrix")
    if abs(np.linalg.det(T)) < 1e-12 * max(1.0, np.max(np.abs(T))) ** n:
        raise GeometryError("linear map is singular")
    Ti = np.linalg.inv(T)

    def gauge(x):
        return K.gauge(_as_points(x, n) @ Ti.T)

    def support(y):
        return K.support(_as_points(y, n) @ T)

    def ggrad(x):
        return K.gauge_gradient(_as_points(x, n) @ Ti.T) @ Ti

    def sgrad(y):
        return K.support_gradient(_as_points(y, n) @ T) @ T.T

    sm = None
    if K.smoothing is not None:
        sm = lambda p: linear_image(K.smoothing(p), T)  # noqa: E731
    return ConvexBody(n, gauge, support, ggrad, sgrad, symmetric=K.symmetric,
                      smooth=K.smooth, polar_smooth=K.polar_smooth,
                      family="linear_image",
                      params={"base": K.family, "T": T}, smoothing=sm, c1=K.c1)


def scaled(K: ConvexBody, lam: float) -> ConvexBody:
    return linear_image(K, lam * np.eye(K.n))


def translate(K: ConvexBody, c) -> ConvexBody:
    """``K + c`` for ``c`` inside ``K`` (so the origin stays interior).

    The support function is exact; the gauge solves
    ``gauge_K(x / lam - c) = 1`` by bisection in ``lam``.
    """
    c = np.asarray(c, dtype=float)
    n = K.n
    if K.gauge(-c) >= 1:
        raise GeometryError("translation must keep the origin interior")

    def support(y):
        y = _as_points(y, n)
        return K.support(y) + y @ c

    def gauge(x):
        x = _as_points(x, n)
        flat = x.reshape(-1, n)
        nx = np.linalg.norm(flat, axis=1)
        lo = np.zeros(len(flat))
        hi = np.ones(len(flat))
        # grow hi until x/hi - c lies in K
        for _ in range(200):
            bad = K.gauge(flat / np.maximum(hi, 1e-300)[:, None] - c) > 1
            if not np.any(bad):
                break
            hi[bad] *= 2.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            inside = K.gauge(flat / np.maximum(mid, 1e-300)[:, None] - c) <= 1
            hi = np.where(inside, mid, hi)
            lo = np.where(inside, lo, mid)
        out = np.where(nx > 0, hi, 0.0)
        return out.reshape(x.shape[:-1])

    def sgrad(y):
        return K.support_gradient(_as_points(y, n)) + c

    return ConvexBody(n, gauge, support, numeric_gradient(gauge), sgrad,
                      symmetric=False, smooth=False, polar_smooth=False,
                      family="translate", params={"base": K.family, "c": c})


def difference_body(K: ConvexBody, grid_resolution: int | None = None
                    ) -> ConvexBody:
    """``K - K``, with support function ``h_K(y) + h_K(-y)``.

    For symmetric K this is exactly ``2K``.  Otherwise the gauge is the
    dual norm ``max_u x.u / h(u)`` of the support function, computed by
    :func:`dual_norm`.
    """
    n = K.n
    if K.symmetric:
        body = scaled(K, 2.0)
        return replace(body, family="difference", params={"base": K.family})

    def support(y):
        y = _as_points(y, n)
        return K.support(y) + K.support(-y)

    def sgrad(y):
        y = _as_points(y, n)
        return K.support_gradient(y) - K.support_gradient(-y)

    res = grid_resolution or {1: 8, 2: 360, 3: 48}.get(n, 16)

    def gauge(x):
        return dual_norm(_as_points(x, n), support, sgrad, res)

    return ConvexBody(n, gauge, support, numeric_gradient(gauge), sgrad,
                      symmetric=True, smooth=False, polar_smooth=False,
                      c1=False, family="difference", params={"base": K.family})


def dual_norm(x, support: Oracle, support_gradient: Oracle,
              resolution: int = 48, chunk: int = 4096) -> np.ndarray:
    """Evaluate ``max_u x.u / h(u)``, the gauge whose support function is h.

    On the half-space ``x.u > 0`` the ratio is quasi-concave: its
    superlevel sets are the convex cones ``{c h(u) - x.u <= 0}``.  After
    a direction-grid start the maximum is located in the affine slice
    ``u = x/|x| + v, v ⟂ x`` by bisection (n = 2) or the central-cut
    ellipsoid method (n >= 3), using the subgradient of ``c h(u) - x.u``
    as the cutting plane.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[-1]
    flat = x.reshape(-1, n)
    if n == 1:
        out = np.where(flat[:, 0] >= 0, flat[:, 0] / support(np.ones((1, 1)))[0],
                       -flat[:, 0] / support(-np.ones((1, 1)))[0])
        return out.reshape(x.shape[:-1])
    dirs = sphere_grid(n - 1, resolution).nodes
    inv_h = 1.0 / support(dirs)
    step = 4.0 * math.pi / resolution
    parts = []
    for i in range(0, len(flat), chunk):
        parts.append(_dual_norm_chunk(flat[i:i + chunk], support,
                                      support_gradient, dirs, inv_h, step))
    out = np.concatenate(parts) if parts else np.zeros(0)
    return out.reshape(x.shape[:-1])


def _dual_norm_chunk(x, support, sgrad, dirs, inv_h, step):
    from .core import sphere_frame

    m, n = x.shape
    d = n - 1
    norm = np.linalg.norm(x, axis=1)
    zero = norm == 0
    xs = np.where(zero[:, None], 1.0, x)
    xhat = xs / np.linalg.norm(xs, axis=1, keepdims=True)
    scores = (xs @ dirs.T) * inv_h
    k = np.argmax(scores, axis=1)
    best = scores[np.arange(m), k]
    E = sphere_frame(xhat)  # (m, d, n)
    u0 = dirs[k]
    v = np.einsum("mdn,mn->md", E, u0) / np.einsum("mn,mn->m", xhat, u0)[:, None]
    radius = 3.0 * step * (1.0 + np.sum(v * v, axis=1))

    def cut(c):
        u = xhat + np.einsum("md,mdn->mn", c, E)
        val = np.einsum("mn,mn->m", xs, u) / support(u)
        g = val[:, None] * sgrad(u) - xs
        return val, np.einsum("mdn,mn->md", E, g)

    if d == 1:
        lo, hi = v[:, 0] - radius, v[:, 0] + radius
        for _ in range(60):
            c = 0.5 * (lo + hi)
            val, g = cut(c[:, None])
            best = np.maximum(best, val)
            right = g[:, 0] > 0
            hi = np.where(right, c, hi)
            lo = np.where(right, lo, c)
    else:
        c = v.copy()
        P = (radius**2)[:, None, None] * np.eye(d)
        for _ in range(60 * d * (d + 1)):
            val, g = cut(c)
            best = np.maximum(best, val)
            Pg = np.einsum("mij,mj->mi", P, g)
            gPg = np.einsum("mi,mi->m", g, Pg)
            ok = gPg > 1e-300
            scale = np.where(ok, 1.0 / np.sqrt(np.where(ok, gPg, 1.0)), 0.0)
            b = Pg * scale[:, None]
            c = c - b / (d + 1)
            P = (d * d / (d * d - 1.0)) * (
                P - (2.0 / (d + 1)) * np.einsum("mi,mj->mij", b, b))
    return np.where(zero, 0.0, np.maximum(best, 0.0))


# ---------------------------------------------------------------------------
# points
# ---------------------------------------------------------------------------


def boundary_point(K: ConvexBody, theta) -> np.ndarray:
    """Radial projection ``theta / gauge(theta)`` onto the boundary."""
    theta = _as_points(theta, K.n)
    return theta / K.gauge(theta)[..., None]


def dual_point(K: ConvexBody, x, tol: float = 1e-8) -> np.ndarray:
    """The supporting covector ``y = grad gauge(x)`` at a boundary point.

    It satisfies ``x . y = 1`` and ``||y||_{K°} = support(y) = 1``.

    Raises
    ------
    GeometryError
        If K is not smooth or ``x`` is not on the boundary.
    """
    if not K.smooth:
        raise GeometryError(f"{K.family} is not smooth; use an l_p smoothing")
    x = _as_points(x, K.n)
    g = K.gauge(x)
    if np.any(np.abs(g - 1) > tol):
        raise GeometryError("dual_point needs points on the boundary")
    return K.gauge_gradient(x)


# ---------------------------------------------------------------------------
# factory
# ---------------------------------------------------------------------------

FAMILIES = ("ball", "ellipsoid", "lp_ball", "cube", "cross_polytope",
            "simplex", "hanner", "linear_image", "difference")


def make_body(family: str, n: int | None = None, **params) -> ConvexBody:
    """Build a body from a family tag and parameters.

    Examples
    --------
    >>> float(make_body("cube", 2).gauge([3.0, 1.0]))
    3.0
    """
    if family == "ball":
        return ball(_need_n(n))
    if family == "ellipsoid":
        A = np.asarray(params["A"], dtype=float)
        _match_n(n, A.shape[0])
        return ellipsoid(A)
    if family == "lp_ball":
        return lp_ball(_need_n(n), float(params["p"]))
    if family == "cube":
        return cube(_need_n(n))
    if family == "cross_polytope":
        return cross_polytope(_need_n(n))
    if family == "simplex":
        return simplex(_need_n(n))
    if family == "hanner":
        tree = params["tree"]
        _match_n(n, hanner_dimension(tree))
        return hanner(tree, params.get("p"))
    if family == "linear_image":
        base = params["base"]
        T = np.asarray(params["T"], dtype=float)
        _match_n(n, base.n)
        return linear_image(base, T)
    if family == "difference":
        base = params["base"]
        _match_n(n, base.n)
        return difference_body(base)
    raise ValueError(f"unknown body family {family!r}")


def _need_n(n):
    if n is None or int(n) != n or n < 1:
        raise ValueError("dimension n must be a positive integer")
    return int(n)


def _match_n(n, actual):
    if n is not None and n != actual:
        raise DimensionError(f"family has dimension {actual}, not {n}")
