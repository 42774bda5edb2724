"""Shared numerical machinery.

Indefinite inner products, product-angle sphere grids, seeded Monte Carlo
batching, determinants and wedge (Plücker) coordinates, and a dense-output
solver for second-order linear ODEs.  Everything else in the package is
built on these pieces.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Iterator, Sequence

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import gammaln, roots_jacobi


class DimensionError(ValueError):
    """Raised when vector or matrix shapes do not match."""


class IntegrationError(RuntimeError):
    """Raised when a quadrature or ODE integration cannot proceed."""


class GeometryError(ValueError):
    """Raised when an object violates a geometric precondition."""


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Signature ``(a, b)`` of the standard space R^(a,b)."""

    a: int
    b: int = 0

    def __post_init__(self):
        if int(self.a) != self.a or int(self.b) != self.b:
            raise ValueError("signature entries must be integers")
        if self.a < 1 or self.b < 0 or self.a + self.b < 2:
            raise ValueError(f"invalid signature ({self.a}, {self.b})")

    @property
    def dim(self) -> int:
        return self.a + self.b

    @property
    def metric(self) -> np.ndarray:
        return np.diag([1.0] * self.a + [-1.0] * self.b)


def indef_inner(sig: Signature, u, v) -> np.ndarray | float:
    """Inner product of R^(a,b); broadcasts over leading axes."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape[-1] != sig.dim or v.shape[-1] != sig.dim:
        raise DimensionError(
            f"vectors of length {u.shape[-1]}, {v.shape[-1]} in signature "
            f"({sig.a}, {sig.b})")
    a = sig.a
    out = (np.einsum("...i,...i->...", u[..., :a], v[..., :a])
           - np.einsum("...i,...i->...", u[..., a:], v[..., a:]))
    return float(out) if np.ndim(out) == 0 else out


def duplex_inner(x1, y1, x2, y2) -> np.ndarray | float:
    """The pairing ``(x1.y2 + x2.y1) / 2`` on R^n x R^n."""
    x1, y1, x2, y2 = (np.asarray(z, dtype=float) for z in (x1, y1, x2, y2))
    n = x1.shape[-1]
    if any(z.shape[-1] != n for z in (y1, x2, y2)):
        raise DimensionError("duplex_inner needs four vectors of equal length")
    out = 0.5 * (np.einsum("...i,...i->...", x1, y2)
                 + np.einsum("...i,...i->...", x2, y1))
    return float(out) if np.ndim(out) == 0 else out


def duplex_metric(n: int) -> np.ndarray:
    """Gram matrix of :func:`duplex_inner` on stacked coordinates (x, y)."""
    g = np.zeros((2 * n, 2 * n))
    g[:n, n:] = 0.5 * np.eye(n)
    g[n:, :n] = 0.5 * np.eye(n)
    return g


def metric_inner(metric: np.ndarray, u, v) -> np.ndarray:
    return np.einsum("...i,ij,...j->...", u, metric, v)


# ---------------------------------------------------------------------------
# volumes of round objects
# ---------------------------------------------------------------------------


def sphere_volume(d: int) -> float:
    """Volume of the unit sphere S^d (S^0 has two points)."""
    return float(2.0 * math.exp(0.5 * (d + 1) * math.log(math.pi)
                                - gammaln(0.5 * (d + 1))))


def ball_volume(n: int) -> float:
    return float(math.exp(0.5 * n * math.log(math.pi) - gammaln(0.5 * n + 1)))


# ---------------------------------------------------------------------------
# sphere grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphereGrid:
    """Quadrature nodes on S^d with weights summing to Vol S^d."""

    dimension: int
    nodes: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.weights)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def sphere_grid(dimension: int, resolution: int) -> SphereGrid:
    """Product-of-angles quadrature on S^dimension.

    The azimuth uses ``resolution`` equispaced nodes offset by half a step
    (so no node lies on a coordinate hyperplane of the first two axes).
    Every polar angle of weight ``sin^k`` uses ``resolution // 2``
    Gauss-Jacobi nodes in ``cos``, which integrates the Jacobian exactly.
    ``dimension == 0`` gives the two points of S^0 with unit weights.

    Parameters
    ----------
    dimension : int
        Sphere dimension d in 0..5.
    resolution : int
        Azimuthal node count, at least 4.
    """
    if dimension not in range(0, 6):
        raise DimensionError(f"unsupported sphere dimension {dimension}")
    if dimension == 0:
        return SphereGrid(0, np.array([[1.0], [-1.0]]), np.ones(2))
    if resolution < 4:
        raise ValueError("resolution must be at least 4")
    nodes, weights = _product_grid(dimension, int(resolution))
    return SphereGrid(dimension, nodes, weights)


@lru_cache(maxsize=64)
def _product_grid(d: int, resolution: int):
    m = max(2, resolution // 2)
    psi = 2.0 * np.pi * (np.arange(resolution) + 0.5) / resolution
    ws = np.full(resolution, 2.0 * np.pi / resolution)
    # angles[k] is the polar angle carrying weight sin^(d-1-k)
    factors = []
    for k in range(d - 1):
        power = d - 1 - k
        alpha = 0.5 * (power - 1)
        t, w = roots_jacobi(m, alpha, alpha)
        factors.append((np.arccos(t), w))
    grids = np.meshgrid(*[f[0] for f in factors], psi, indexing="ij")
    wgrids = np.meshgrid(*[f[1] for f in factors], ws, indexing="ij")
    angles = [g.ravel() for g in grids]
    weight = np.prod([g.ravel() for g in wgrids], axis=0)
    coords = np.empty((weight.size, d + 1))
    running = np.ones(weight.size)
    for k in range(d - 1):
        coords[:, k] = running * np.cos(angles[k])
        running = running * np.sin(angles[k])
    coords[:, d - 1] = running * np.cos(angles[-1])
    coords[:, d] = running * np.sin(angles[-1])
    coords.setflags(write=False)
    weight.setflags(write=False)
    return coords, weight


def sphere_frame(theta) -> np.ndarray:
    """Orthonormal tangent frames of S^d at ``theta``, shape (..., d, d+1).

    Frames are oriented so that ``det[theta, e_1, ..., e_d] = +1``.
    """
    theta = np.asarray(theta, dtype=float)
    lead = theta.shape[:-1]
    k = theta.shape[-1]
    flat = theta.reshape(-1, k)
    out = np.empty((flat.shape[0], k - 1, k))
    if k == 1:
        return out.reshape(lead + (0, 1))
    pivot = np.argmax(np.abs(flat), axis=1)
    eye = np.eye(k)
    for p in range(k):
        sel = pivot == p
        if not np.any(sel):
            continue
        others = [i for i in range(k) if i != p]
        mats = np.empty((int(sel.sum()), k, k))
        mats[:, :, 0] = flat[sel]
        mats[:, :, 1:] = eye[:, others]
        q, _ = np.linalg.qr(mats)
        # first column of q is +-theta; align it, then fix orientation
        s = np.sign(np.einsum("ij,ij->i", q[:, :, 0], flat[sel]))
        q[:, :, 0] *= s[:, None]
        det = np.linalg.det(q)
        q[:, :, 1] *= np.sign(det)[:, None]
        out[sel] = np.transpose(q[:, :, 1:], (0, 2, 1))
    return out.reshape(lead + (k - 1, k))


def uniform_sphere(rng: np.random.Generator, count: int, ambient: int) -> np.ndarray:
    """Uniform points on S^(ambient-1) by Gaussian normalization."""
    z = rng.standard_normal((count, ambient))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


# ---------------------------------------------------------------------------
# Monte Carlo plumbing
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class McConfig:
    sample_count: int
    seed: int = 0
    batch_size: int = 65536

    def __post_init__(self):
        if self.sample_count < 1:
            raise ValueError("sample_count must be positive")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must fit in 64 bits")

    def batches(self) -> Iterator[tuple[np.random.Generator, int]]:
        """Deterministic (generator, size) pairs covering all samples."""
        nb = -(-self.sample_count // self.batch_size)
        children = np.random.SeedSequence(int(self.seed)).spawn(nb)
        left = self.sample_count
        for child in children:
            size = min(self.batch_size, left)
            left -= size
            yield np.random.default_rng(child), size


@dataclass
class RunReport:
    """Numerical result with its error estimate and budget."""

    value: float
    std_error: float
    budget_used: int
    seed: int | None = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.std_error >= 0:
            raise ValueError("std_error must be nonnegative")


def mc_mean(sampler: Callable[[np.random.Generator, int], np.ndarray],
            mc: McConfig) -> tuple[float, float]:
    """Mean and standard error of i.i.d. samples drawn batch by batch.

    ``sampler(rng, size)`` must return ``size`` real samples.  Per-batch
    sums are reduced with ``math.fsum`` so the result does not depend on
    evaluation order.
    """
    sums, sqs, counts = [], [], 0
    for rng, size in mc.batches():
        v = np.asarray(sampler(rng, size), dtype=float)
        sums.append(float(np.sum(v)))
        sqs.append(float(np.sum(v * v)))
        counts += v.size
    mean = math.fsum(sums) / counts
    var = max(math.fsum(sqs) / counts - mean * mean, 0.0)
    se = math.sqrt(var / max(counts - 1, 1)) if counts > 1 else 0.0
    return mean, se


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("BOTTLENECK_THREADS", "1")))
    except ValueError:
        return 1


def chunked_sum(fn: Callable[[slice], float], total: int, chunk: int) -> float:
    """Sum ``fn`` over a fixed partition of ``range(total)``.

    The partition is independent of the thread count and partial sums are
    combined with ``math.fsum``, so results are reproducible.
    """
    slices = [slice(i, min(i + chunk, total)) for i in range(0, total, chunk)]
    workers = thread_count()
    if workers == 1 or len(slices) == 1:
        parts = [fn(s) for s in slices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, slices))
    return math.fsum(parts)


# ---------------------------------------------------------------------------
# determinants and wedge coordinates
# ---------------------------------------------------------------------------


def det_columns(cols: Sequence) -> float:
    """Determinant of the matrix whose columns are ``cols``."""
    mat = np.column_stack([np.asarray(c, dtype=float) for c in cols])
    if mat.shape[0] != mat.shape[1]:
        raise DimensionError(f"need a square system, got {mat.shape}")
    return float(np.linalg.det(mat))


@lru_cache(maxsize=None)
def wedge_index(dim: int, m: int):
    """Row subsets of size ``m`` with their complements and Laplace signs.

    For ``A`` (dim x m) and ``B`` (dim x (dim-m)),
    ``det[A | B] = sum_S sign[S] * minor(A, S) * minor(B, comp[S])``.
    """
    subsets = list(combinations(range(dim), m))
    comp_subsets = list(combinations(range(dim), dim - m))
    comp_lookup = {s: i for i, s in enumerate(comp_subsets)}
    comp = np.empty(len(subsets), dtype=int)
    sign = np.empty(len(subsets))
    for i, s in enumerate(subsets):
        c = tuple(j for j in range(dim) if j not in s)
        comp[i] = comp_lookup[c]
        sign[i] = (-1.0) ** (sum(s) - m * (m - 1) // 2)
    return np.array(subsets, dtype=int).reshape(len(subsets), m), comp, sign


def wedge_coordinates(cols: np.ndarray) -> np.ndarray:
    """Plücker coordinates of the column span, batched.

    ``cols`` has shape (..., dim, m); the result has shape (..., C(dim, m))
    listing the m x m minors in lexicographic row order.
    """
    cols = np.asarray(cols, dtype=float)
    dim, m = cols.shape[-2:]
    subsets, _, _ = wedge_index(dim, m)
    sub = cols[..., subsets, :]  # (..., C, m, m)
    if m == 1:
        return sub[..., 0, 0]
    return np.linalg.det(sub)


# ---------------------------------------------------------------------------
# second-order linear ODEs
# ---------------------------------------------------------------------------


class OdeSolution:
    """Dense solution of ``f'' + c1(t) f' + c0(t) f = 0``.

    Holds one or more interpolating pieces covering ``span``; an optional
    series piece may cover the neighbourhood of a regular singular point.
    """

    def __init__(self, c1, c0, span, pieces, series=None):
        self.c1 = c1
        self.c0 = c0
        self.span = (float(span[0]), float(span[1]))
        self._pieces = pieces  # list of (lo, hi, dense callable -> (f, f'))
        self._series = series  # optional (lo, hi, callable -> (f, f'))

    def _eval(self, t):
        t = np.asarray(t, dtype=float)
        lo, hi = self.span
        if np.any(t < lo - 1e-12) or np.any(t > hi + 1e-12):
            raise ValueError(f"evaluation point outside span [{lo}, {hi}]")
        flat = t.ravel()
        f = np.empty_like(flat)
        df = np.empty_like(flat)
        done = np.zeros(flat.shape, dtype=bool)
        if self._series is not None:
            slo, shi, fn = self._series
            sel = (flat >= slo) & (flat <= shi)
            if np.any(sel):
                f[sel], df[sel] = fn(flat[sel])
                done |= sel
        for plo, phi, dense in self._pieces:
            sel = ~done & (flat >= plo - 1e-12) & (flat <= phi + 1e-12)
            if np.any(sel):
                y = dense(flat[sel])
                f[sel], df[sel] = y[0], y[1]
                done |= sel
        return f.reshape(t.shape), df.reshape(t.shape)

    def f(self, t):
        return self._eval(t)[0]

    def df(self, t):
        return self._eval(t)[1]

    def d2f(self, t):
        f, df = self._eval(t)
        return -self.c1(t) * df - self.c0(t) * f

    __call__ = f


def ode_solve(c1, c0, init_point: float, f0: float, df0: float, span,
              tolerance: float = 1e-10, series=None) -> OdeSolution:
    """Integrate ``f'' + c1 f' + c0 f = 0`` from ``init_point`` across ``span``.

    Uses the DOP853 embedded Runge-Kutta pair (order 8 with 5/3 error
    estimators) and keeps its dense output.  ``span`` must contain
    ``init_point``; integration runs outward to both ends.  ``series`` is an
    optional ``(lo, hi, fn)`` piece, with ``fn(t) -> (f, f')``, used near a
    regular singular point just outside ``span``.

    Raises
    ------
    IntegrationError
        If a coefficient is non-finite inside the span or the integrator
        fails (for example through step-size underflow).
    """
    lo, hi = float(span[0]), float(span[1])
    if not lo <= init_point <= hi or lo == hi:
        raise ValueError("span must contain init_point and be nondegenerate")
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    probe = np.linspace(lo, hi, 2001)
    with np.errstate(all="ignore"):
        vals = np.concatenate([np.broadcast_to(c1(probe), probe.shape),
                               np.broadcast_to(c0(probe), probe.shape)])
    if not np.all(np.isfinite(vals)):
        raise IntegrationError("singular coefficient inside span")

    def rhs(t, y):
        return [y[1], -c1(t) * y[1] - c0(t) * y[0]]

    full = (lo, hi)
    if series is not None:
        full = (min(lo, series[0]), max(hi, series[1]))
    pieces = []
    for end in (hi, lo):
        if end == init_point:
            continue
        sol = solve_ivp(rhs, (init_point, end), [f0, df0], method="DOP853",
                        rtol=tolerance, atol=tolerance * 1e-2,
                        dense_output=True)
        if sol.status != 0:
            raise IntegrationError(f"ODE integration failed: {sol.message}")
        pieces.append((min(init_point, end), max(init_point, end), sol.sol))
    return OdeSolution(c1, c0, full, pieces, series=series)
