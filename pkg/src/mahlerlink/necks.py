"""Necks of pseudospheres and the integrals over pairs of them.

A neck of ``H+ = {x.x = 1}`` in R^(a,b) is a spacelike (a-1)-sphere; a neck
of ``H- = {x.x = -1}`` is a timelike (b-1)-sphere.  The filled join of a
pair has volume

    w = (a-1)! (b-1)! / (a+b)!  *  int |det[x, v_1..v_(a-1), y, w_1..w_(b-1)]|

over the product of the parameter spheres, where ``v`` and ``w`` are the
pushforwards of an oriented orthonormal frame of the parameter sphere.
Replacing ``|det|`` by ``f(asinh x.y) det`` with the pseudosphere kernel
``f`` gives the homotopy-invariant ``l``; since ``|f| <= 1`` we always have
``l <= w``, with equality for flat, orthogonal, centered necks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Callable, Sequence

import numpy as np

from .bodies import ConvexBody, boundary_point, polar
from .core import (GeometryError, RunReport, Signature, duplex_metric,
                   sphere_frame, sphere_grid, uniform_sphere, wedge_coordinates,
                   wedge_index)
from .kernels import KernelSolution, solve_pseudosphere_kernel

FD_STEP = 1e-3


@dataclass(frozen=True)
class Neck:
    """A parametrized neck ``S^k -> R^(a+b)`` with its pushforward frames.

    Attributes
    ----------
    signature : Signature
        ``(a, b)``; duplex spaces R^n x R^n use ``(n, n)``.
    metric : ndarray
        Gram matrix of the inner product in the chart coordinates.
    side : {"positive", "negative"}
        Which pseudosphere the neck lies on.
    chart : callable
        Maps unit vectors of shape ``(m, k+1)`` to points ``(m, a+b)``.
    tangent : callable or None
        Maps ``(m, k+1)`` to ``(m, k, a+b)``: the images of the oriented
        orthonormal frame of :func:`sphere_frame`.  Central differences
        along great circles are used when absent.
    orientation_sign : int
        Extra sign applied to the signed integrands.
    """

    signature: Signature
    metric: np.ndarray = field(repr=False)
    side: str
    chart: Callable = field(repr=False)
    tangent: Callable | None = field(default=None, repr=False)
    orientation_sign: int = 1
    label: str = "neck"

    def __post_init__(self):
        if self.side not in ("positive", "negative"):
            raise ValueError(f"side must be positive or negative, not {self.side!r}")

    @property
    def dim(self) -> int:
        return self.signature.dim

    @property
    def param_dim(self) -> int:
        """Dimension k of the parameter sphere S^k."""
        s = self.signature
        return s.a - 1 if self.side == "positive" else s.b - 1

    @property
    def level(self) -> float:
        return 1.0 if self.side == "positive" else -1.0

    def frames(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        k = self.param_dim
        if k == 0:
            return np.zeros((len(theta), 0, self.dim))
        if self.tangent is not None:
            return self.tangent(theta)
        return great_circle_derivative(self.chart, theta, FD_STEP)

    def inner(self, u, v):
        return np.einsum("...i,ij,...j->...", u, self.metric, v)


def great_circle_derivative(chart, theta, h=FD_STEP) -> np.ndarray:
    """Fourth-order central differences of ``chart`` along frame great circles."""
    E = sphere_frame(theta)  # (m, k, k+1)
    out = []
    for j in range(E.shape[1]):
        e = E[:, j, :]

        def at(t):
            return chart(math.cos(t) * theta + math.sin(t) * e)

        out.append((-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h))
    return np.stack(out, axis=1)


@dataclass
class NeckSample:
    """Quadrature data of a neck: points, frames, weights and orientations."""

    points: np.ndarray
    frames: np.ndarray
    weights: np.ndarray
    orient: np.ndarray
    params: np.ndarray

    @property
    def columns(self) -> np.ndarray:
        """``[x, v_1, ..., v_k]`` as an array of shape (m, dim, k+1)."""
        return np.concatenate([self.points[:, :, None],
                               np.transpose(self.frames, (0, 2, 1))], axis=2)


def sample_neck(neck: Neck, resolution: int) -> NeckSample:
    """Evaluate a neck on the product grid of its parameter sphere.

    On S^0 the two nodes carry the orientation ``theta = +-1``, which is
    the boundary orientation of a segment; elsewhere it is +1.
    """
    grid = sphere_grid(neck.param_dim, resolution)
    theta = grid.nodes
    pts = neck.chart(theta)
    fr = neck.frames(theta)
    if neck.param_dim == 0:
        orient = theta[:, 0].copy()
    else:
        orient = np.ones(len(theta))
    return NeckSample(pts, fr, np.asarray(grid.weights, dtype=float),
                      orient * neck.orientation_sign, theta)


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolynomialDisplacement:
    """Vector-valued polynomial on a sphere, ``sum_j c_j theta^alpha_j``.

    ``terms`` is a sequence of ``(exponents, coefficients)`` with
    ``len(exponents) == k + 1`` and ``len(coefficients) == target``.
    """

    source_dim: int
    target_dim: int
    terms: tuple = ()

    def __post_init__(self):
        for alpha, c in self.terms:
            if len(alpha) != self.source_dim or len(c) != self.target_dim:
                raise ValueError("displacement term has the wrong shape")
            if min(alpha) < 0 or sum(alpha) > 4:
                raise ValueError("displacement degree must be between 0 and 4")

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape[:-1] + (self.target_dim,))
        for alpha, c in self.terms:
            mono = np.prod(theta ** np.asarray(alpha), axis=-1)
            out += mono[..., None] * np.asarray(c, dtype=float)
        return out

    def scaled(self, factor: float) -> "PolynomialDisplacement":
        return PolynomialDisplacement(
            self.source_dim, self.target_dim,
            tuple((a, tuple(factor * np.asarray(c))) for a, c in self.terms))

    @staticmethod
    def constant(source_dim: int, value) -> "PolynomialDisplacement":
        value = tuple(float(v) for v in value)
        return PolynomialDisplacement(source_dim, len(value),
                                      (((0,) * source_dim, value),))


def graph_neck(sig: Signature, side: str, displacement=None,
               label: str = "graph") -> Neck:
    """Neck that is a graph over the flat centered neck.

    Positive side: ``theta -> (sqrt(1 + |g|^2) theta, g(theta))`` with
    ``g : S^(a-1) -> R^b``.  Negative side:
    ``phi -> (h(phi), sqrt(1 + |h|^2) phi)`` with ``h : S^(b-1) -> R^a``.
    Both satisfy the pseudosphere equation identically.
    """
    a, b = sig.a, sig.b
    if side == "positive":
        src, tgt = a, b
    elif side == "negative":
        if b < 1:
            raise ValueError("negative necks need b >= 1")
        src, tgt = b, a
    else:
        raise ValueError(f"unknown side {side!r}")
    g = displacement
    if g is not None and (g.source_dim != src or g.target_dim != tgt):
        raise ValueError("displacement does not match the signature and side")

    def chart(theta):
        theta = np.asarray(theta, dtype=float)
        d = np.zeros(theta.shape[:-1] + (tgt,)) if g is None else g(theta)
        s = np.sqrt(1.0 + np.sum(d * d, axis=-1, keepdims=True))
        if side == "positive":
            return np.concatenate([s * theta, d], axis=-1)
        return np.concatenate([d, s * theta], axis=-1)

    tangent = None
    if g is None:
        def tangent(theta):
            E = sphere_frame(theta)
            z = np.zeros(E.shape[:-1] + (tgt,))
            if side == "positive":
                return np.concatenate([E, z], axis=-1)
            return np.concatenate([z, E], axis=-1)

    return Neck(sig, sig.metric, side, chart, tangent, label=label)


def flat_neck(sig: Signature, side: str, center_offset=None) -> Neck:
    """Flat neck, centered unless an offset in the other factor is given.

    The offset ``c`` lies in the complementary coordinate factor (R^b for
    the positive side, R^a for the negative side) and the neck becomes
    ``(sqrt(1 + |c|^2) theta, c)`` (resp. ``(c, sqrt(1 + |c|^2) phi)``),
    a translate along the pseudosphere of the unit sphere of its factor.
    """
    if center_offset is None:
        return graph_neck(sig, side, None, label="flat")
    c = np.asarray(center_offset, dtype=float).ravel()
    src, tgt = (sig.a, sig.b) if side == "positive" else (sig.b, sig.a)
    if c.size != tgt:
        raise GeometryError(f"offset must lie in the complementary R^{tgt}")
    if not np.all(np.isfinite(c)):
        raise GeometryError("offset must be finite")
    return graph_neck(sig, side, PolynomialDisplacement.constant(src, c),
                      label="flat-offset")


def random_displacement(source_dim: int, target_dim: int, eps: float,
                        rng: np.random.Generator, degree: int = 3,
                        ) -> PolynomialDisplacement:
    """Random polynomial of degree ``<= degree`` with sup norm about ``eps``."""
    terms = []
    for d in range(0, degree + 1):
        for combo in combinations_with_replacement(range(source_dim), d):
            alpha = [0] * source_dim
            for i in combo:
                alpha[i] += 1
            c = rng.standard_normal(target_dim) / (1.0 + d)
            terms.append((tuple(alpha), tuple(c)))
    g = PolynomialDisplacement(source_dim, target_dim, tuple(terms))
    probe = uniform_sphere(rng, 4096, source_dim) if source_dim > 1 else \
        np.array([[1.0], [-1.0]])
    sup = float(np.max(np.linalg.norm(g(probe), axis=-1)))
    return g.scaled(eps / sup if sup > 0 else 0.0)


def random_graph_neck(sig: Signature, side: str, eps: float,
                      rng: np.random.Generator | int, degree: int = 3) -> Neck:
    rng = np.random.default_rng(rng)
    src, tgt = (sig.a, sig.b) if side == "positive" else (sig.b, sig.a)
    g = random_displacement(src, tgt, eps, rng, degree)
    return graph_neck(sig, side, g, label=f"graph(eps={eps:g})")


def body_necks(K: ConvexBody, allow_c1: bool = False) -> tuple[Neck, Neck]:
    """The necks ``K+ = {(x, y) : x.y = 1}`` and ``K- = {(x, -y)}`` of K.

    ``x(theta)`` is the boundary point in direction theta and ``y`` the
    dual point ``grad ||x||_K``; both live in R^n x R^n with the duplex
    inner product, signature (n, n).
    """
    if not K.symmetric:
        raise GeometryError("body necks need a centrally symmetric body")
    if not (K.smooth or (allow_c1 and K.c1)):
        raise GeometryError(f"{K.family} is not smooth; use an l_p smoothing")
    n = K.n
    sig = Signature(n, n)
    G = duplex_metric(n)

    def plus(theta):
        x = boundary_point(K, theta)
        return np.concatenate([x, K.gauge_gradient(x)], axis=-1)

    def minus(theta):
        x = boundary_point(K, theta)
        return np.concatenate([x, -K.gauge_gradient(x)], axis=-1)

    return (Neck(sig, G, "positive", plus, label="K+"),
            Neck(sig, G, "negative", minus, label="K-"))


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass
class NeckValidation:
    membership_error: float
    causal_margin: float
    valid: bool


def validate_neck(neck: Neck, resolution: int = 32, tol: float = 1e-8
                  ) -> NeckValidation:
    """Pseudosphere membership and spacelike/timelike margin on the grid.

    The margin is the smallest eigenvalue of the tangent Gram matrix
    (positive side) or of its negative (negative side).
    """
    s = sample_neck(neck, resolution)
    mem = float(np.max(np.abs(neck.inner(s.points, s.points) - neck.level)))
    if neck.param_dim == 0:
        margin = math.inf
    else:
        gram = np.einsum("mia,ab,mjb->mij", s.frames, neck.metric, s.frames)
        if neck.side == "negative":
            gram = -gram
        margin = float(np.min(np.linalg.eigvalsh(gram)))
    return NeckValidation(mem, margin, mem <= tol and margin > 0)


def _check_pair(n_plus: Neck, n_minus: Neck):
    if n_plus.side != "positive" or n_minus.side != "negative":
        raise ValueError("need a positive neck and a negative neck")
    if n_plus.signature != n_minus.signature or not np.allclose(
            n_plus.metric, n_minus.metric):
        raise ValueError("necks live in different spaces")


@dataclass
class StarlikeReport:
    samples: int
    min_abs: float
    positive_fraction: float
    sign_change: bool
    witness: tuple | None = None


def verify_starlike(n_plus: Neck, n_minus: Neck, samples: int = 4096,
                    seed: int = 0) -> StarlikeReport:
    """Sample the join Jacobian numerator and look for a sign change.

    At the join point ``(1-t) x + t y`` the numerator of the radial
    Jacobian is ``(1-t)^(a-1) t^(b-1) det[v's, w's, y - x, (1-t) x + t y]``
    and the determinant reduces to ``det[v's, w's, y, x]``, independent of
    t.  A sign change means the filled join is not starlike about 0.
    """
    _check_pair(n_plus, n_minus)
    rng = np.random.default_rng(seed)
    A = _random_columns(n_plus, samples, rng)
    B = _random_columns(n_minus, samples, rng)
    mat = np.concatenate([A[0], B[0]], axis=2)
    D = np.linalg.det(mat) * A[1] * B[1]
    pos = D > 0
    frac = float(np.mean(pos))
    change = bool(np.any(pos) and np.any(D < 0))
    witness = None
    if change:
        i, j = int(np.argmax(D)), int(np.argmin(D))
        witness = (float(D[i]), float(D[j]))
    return StarlikeReport(samples, float(np.min(np.abs(D))), frac, change,
                          witness)


def _random_columns(neck, m, rng):
    k = neck.param_dim
    if k == 0:
        theta = rng.choice([-1.0, 1.0], size=(m, 1))
        orient = theta[:, 0]
    else:
        theta = uniform_sphere(rng, m, k + 1)
        orient = np.ones(m)
    pts = neck.chart(theta)
    fr = neck.frames(theta)
    cols = np.concatenate([pts[:, :, None], np.transpose(fr, (0, 2, 1))], axis=2)
    return cols, orient * neck.orientation_sign


# ---------------------------------------------------------------------------
# integrals
# ---------------------------------------------------------------------------


def join_prefactor(a: int, b: int) -> float:
    return math.factorial(a - 1) * math.factorial(b - 1) / math.factorial(a + b)


def _laplace_factors(sp: NeckSample, sm: NeckSample):
    """Per-node Plücker vectors whose inner products are the join determinants."""
    A = wedge_coordinates(sp.columns)  # (m1, C)
    B = wedge_coordinates(sm.columns)  # (m2, C')
    dim = sp.points.shape[1]
    a = sp.columns.shape[2]
    _, comp, sign = wedge_index(dim, a)
    return A * sign, B[:, comp]


def join_determinants(n_plus: Neck, n_minus: Neck, resolution: int
                      ) -> tuple[np.ndarray, NeckSample, NeckSample]:
    """All pairwise ``det[x, v.., y, w..]`` times node orientations."""
    _check_pair(n_plus, n_minus)
    sp, sm = sample_neck(n_plus, resolution), sample_neck(n_minus, resolution)
    A, B = _laplace_factors(sp, sm)
    D = (A @ B.T) * sp.orient[:, None] * sm.orient[None, :]
    return D, sp, sm


PAIRWISE_LIMIT = 2e7


def _definite(hi, lo, rel=1e-9):
    """Constant sign up to round-off relative to the largest value."""
    tol = rel * max(hi, -lo)
    return hi <= tol or lo >= -tol


def _join_value(n_plus, n_minus, resolution, method, check_samples, seed):
    sp, sm = sample_neck(n_plus, resolution), sample_neck(n_minus, resolution)
    A, B = _laplace_factors(sp, sm)
    A = A * sp.orient[:, None]
    B = B * sm.orient[:, None]
    pairs = len(sp.weights) * len(sm.weights)
    if method == "auto":
        method = "pairwise" if pairs <= PAIRWISE_LIMIT else "factorized"
    info = {"method": method, "pairs": pairs}
    if method == "pairwise":
        total = 0.0
        chunk = max(1, int(4e6 // max(len(sm.weights), 1)))
        hi = lo = 0.0
        for i in range(0, len(sp.weights), chunk):
            D = A[i:i + chunk] @ B.T
            hi, lo = max(hi, float(D.max())), min(lo, float(D.min()))
            total += float(sp.weights[i:i + chunk] @ np.abs(D) @ sm.weights)
        info["sign_definite"] = _definite(hi, lo)
        return total, info
    if method != "factorized":
        raise ValueError(f"unknown method {method!r}")
    # the integrand must not change sign for the product formula to hold
    rng = np.random.default_rng(seed)
    i = rng.integers(0, len(sp.weights), check_samples)
    j = rng.integers(0, len(sm.weights), check_samples)
    D = np.einsum("mc,mc->m", A[i], B[j])
    definite = _definite(float(D.max()), float(D.min()))
    info["sign_definite"] = definite
    if not definite:
        raise GeometryError("join integrand changes sign; use method='pairwise'")
    total = abs(float((sp.weights @ A) @ (sm.weights @ B)))
    return total, info


def filled_join_volume(n_plus: Neck, n_minus: Neck, resolution: int = 64,
                       method: str = "auto", check_samples: int = 200_000,
                       seed: int = 0) -> RunReport:
    """Volume of the filled join of a positive and a negative neck.

    Parameters
    ----------
    resolution : int
        Azimuthal resolution of the parameter grids; the error estimate is
        the change from half this resolution.
    method : {"auto", "pairwise", "factorized"}
        ``"pairwise"`` sums ``|det|`` over all node pairs.  ``"factorized"``
        uses the Laplace expansion of the determinant to reduce the double
        integral to inner products of single integrals, which is valid
        when the integrand has constant sign (checked on random pairs).
    """
    _check_pair(n_plus, n_minus)
    a, b = n_plus.signature.a, n_plus.signature.b
    pref = join_prefactor(a, b)
    fine, info = _join_value(n_plus, n_minus, resolution, method,
                             check_samples, seed)
    coarse, _ = _join_value(n_plus, n_minus, max(4, resolution // 2),
                            info["method"], check_samples, seed)
    return RunReport(pref * fine, pref * abs(fine - coarse), info["pairs"],
                     details=info | {"resolution": resolution})


@dataclass
class InvariantReport(RunReport):
    w: float = 0.0
    max_domination_excess: float = 0.0
    domination_holds: bool = True


def _kernel_for(kernel, a, b, xy_max):
    need = math.asinh(xy_max)
    if kernel is None or (kernel.geometry != "pseudosphere") or \
            (kernel.a, kernel.b) != (a, b):
        if kernel is not None:
            raise ValueError(f"kernel solves the ({kernel.a}, {kernel.b}) "
                             f"{kernel.geometry} equation, not ({a}, {b})")
        return solve_pseudosphere_kernel(a, b, need + 1.0)
    if kernel.span[1] < need or kernel.span[0] > -need:
        return solve_pseudosphere_kernel(a, b, need + 1.0)
    return kernel


def weighted_invariant(n_plus: Neck, n_minus: Neck,
                       kernel: KernelSolution | None = None,
                       resolution: int = 64) -> InvariantReport:
    """The kernel-weighted join integral ``l`` and the volume ``w``.

    ``l = prefactor * sgn * sum w_i w_j D_ij f(asinh(x_i . y_j))`` where
    ``D_ij`` is the oriented join determinant and ``sgn`` makes the first
    node pair positive.  Every node is checked for the domination
    ``sgn D f <= |D|``.  If the kernel table does not cover the observed
    rapidities it is re-solved on a larger span, never extrapolated.
    """
    _check_pair(n_plus, n_minus)
    a, b = n_plus.signature.a, n_plus.signature.b
    pref = join_prefactor(a, b)

    def run(res):
        D, sp, sm = join_determinants(n_plus, n_minus, res)
        xy = sp.points @ n_plus.metric @ sm.points.T
        kern = _kernel_for(kernel, a, b, float(np.max(np.abs(xy))))
        f = kern.f(np.arcsinh(xy))
        sgn = 1.0 if D.flat[0] >= 0 else -1.0
        signed = sgn * D * f
        excess = float(np.max(signed - np.abs(D)))
        ell = float(sp.weights @ signed @ sm.weights)
        w = float(sp.weights @ np.abs(D) @ sm.weights)
        return ell, w, excess, D.size

    ell, w, excess, size = run(resolution)
    ell_c, w_c, _, _ = run(max(4, resolution // 2))
    tol = 1e-12 * max(1.0, w / max(size, 1))
    return InvariantReport(pref * ell, pref * abs(ell - ell_c), size,
                           details={"resolution": resolution,
                                    "w_error": pref * abs(w - w_c)},
                           w=pref * w, max_domination_excess=pref * excess,
                           domination_holds=excess <= tol)


def riemannian_neck_volume(n_plus: Neck, resolution: int = 64) -> RunReport:
    """Volume of a spacelike neck in its induced Riemannian metric."""
    if n_plus.side != "positive":
        raise ValueError("the Riemannian volume needs a positive (spacelike) neck")

    def run(res):
        s = sample_neck(n_plus, res)
        if n_plus.param_dim == 0:
            return float(np.sum(s.weights))
        gram = np.einsum("mia,ab,mjb->mij", s.frames, n_plus.metric, s.frames)
        det = np.linalg.det(gram)
        if np.min(np.linalg.eigvalsh(gram)) <= 0:
            raise GeometryError("tangent Gram matrix is not positive definite")
        return float(s.weights @ np.sqrt(det))

    fine = run(resolution)
    coarse = run(max(4, resolution // 2))
    return RunReport(fine, abs(fine - coarse), resolution,
                     details={"resolution": resolution})


def coincident_functional(n1: Neck, n2: Neck, resolution: int = 64,
                          normalized: bool = True) -> RunReport:
    """``int (x ^ dx^(a-1)) . (y ^ dy^(a-1))`` over two positive necks.

    The pairing of a-vectors is the Gram determinant ``det(A^T G B)`` of
    the frames ``A = [x, v..]`` and ``B = [y, w..]``, computed through the
    Cauchy-Binet formula.  The join prefactor is applied and the sign is
    fixed by the first node pair.  With ``normalized`` the value is divided
    by ``sqrt|det G|``, which converts the metric volume form to coordinate
    volume so that the result is comparable with :func:`filled_join_volume`.
    """
    if n1.side != "positive" or n2.side != "positive":
        raise ValueError("coincident functional needs two positive necks")
    if n1.signature != n2.signature or not np.allclose(n1.metric, n2.metric):
        raise ValueError("necks live in different spaces")
    a, b = n1.signature.a, n1.signature.b
    pref = join_prefactor(a, b)
    G = n1.metric
    scale = 1.0 / math.sqrt(abs(np.linalg.det(G))) if normalized else 1.0

    def run(res):
        s1, s2 = sample_neck(n1, res), sample_neck(n2, res)
        A = wedge_coordinates(s1.columns) * s1.orient[:, None]
        B = wedge_coordinates(np.einsum("ij,mjk->mik", G, s2.columns)) * s2.orient[:, None]
        first = float(A[0] @ B[0])
        sgn = 1.0 if first >= 0 else -1.0
        return sgn * float((s1.weights @ A) @ (s2.weights @ B))

    fine, coarse = run(resolution), run(max(4, resolution // 2))
    return RunReport(pref * scale * fine, pref * scale * abs(fine - coarse),
                     resolution, details={"normalized": normalized})


# ---------------------------------------------------------------------------
# diamond bodies
# ---------------------------------------------------------------------------

SMOOTHING_SEQUENCE = (8.0, 16.0, 32.0, 64.0)


def _smooth_diamond(K: ConvexBody, resolution: int, allow_c1: bool = False):
    if not K.smooth and K.polar_smooth:
        # (x, y) -> (y, x) maps the diamond of K onto that of its polar
        K = polar(K)
    allow = allow_c1 or not K.smooth
    n_plus, n_minus = body_necks(K, allow_c1=allow)
    return filled_join_volume(n_plus, n_minus, resolution)


def default_diamond_resolution(n: int, p: float | None) -> int:
    scale = 1.0 if p is None else max(1.0, p / 8.0)
    base = {1: 4, 2: 512, 3: 128}.get(n, 24)
    return int(base * scale)


def diamond_volume(K: ConvexBody, resolution: int | None = None,
                   smoothing_p: Sequence[float] | float | None = None
                   ) -> RunReport:
    """Volume of ``K⋄``, the filled join of the necks ``K+`` and ``K-``.

    Smooth bodies (or bodies with smooth polars) are integrated directly.
    Nonsmooth bodies are replaced by their l_p smoothings for each p in
    ``smoothing_p`` (default 8, 16, 32, 64); the reported value is the one
    at the largest p, and the details hold the sequence, its monotonicity
    and a Richardson extrapolation in 1/p.
    """
    if not K.symmetric:
        raise GeometryError("the diamond body is defined for symmetric bodies")
    if K.smooth or K.polar_smooth:
        res = resolution or default_diamond_resolution(K.n, None)
        rep = _smooth_diamond(K, res)
        rep.details["smoothing"] = None
        return rep
    if K.smoothing is None:
        if K.c1:
            res = resolution or default_diamond_resolution(K.n, None)
            return _smooth_diamond(K, res, allow_c1=True)
        raise GeometryError(f"{K.family} is nonsmooth and has no smoothing")
    ps = SMOOTHING_SEQUENCE if smoothing_p is None else \
        tuple(np.atleast_1d(smoothing_p).astype(float))
    values, errors = [], []
    for p in ps:
        Ks = K.smoothing(p)
        res = resolution or default_diamond_resolution(K.n, p)
        rep = _smooth_diamond(Ks, res, allow_c1=True)
        values.append(rep.value)
        errors.append(rep.std_error)
    diffs = np.diff(values)
    monotone = bool(np.all(diffs >= 0) or np.all(diffs <= 0))
    extrap = values[-1]
    if len(ps) >= 2:
        p1, p2 = ps[-2], ps[-1]
        # V(p) ~ V_inf + c / p
        extrap = (p2 * values[-1] - p1 * values[-2]) / (p2 - p1)
    return RunReport(values[-1], errors[-1], len(ps),
                     details={"smoothing": list(ps), "sequence": values,
                              "errors": errors, "monotone": monotone,
                              "extrapolated": extrap})
