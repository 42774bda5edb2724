"""Invariant linking kernels.

Three families of scalar kernels ``f(alpha)`` solve second-order linear
ODEs whose solutions make double integrals over pairs of necks (or pairs
of curves) homotopy invariant:

* pseudosphere, ``f'' + (a+b) tanh(alpha) f' + ab f = 0``, even, f(0)=1;
* sphere, ``f'' + (a+b) cot(alpha) f' - ab f = 0``, regular at pi;
* hyperbolic, ``f'' + (a+b) coth(alpha) f' + ab f = 0``, with one solution
  regular at 0 (an even function) and one singular like alpha^(1-a-b)
  (an odd function when a+b is even).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import IntegrationError, ode_solve, sphere_volume

GEOMETRIES = ("pseudosphere", "sphere", "hyperbolic")


def coefficients(geometry: str, a: int, b: int):
    """Coefficient callables ``(c1, c0)`` of the kernel ODE."""
    m, p = float(a + b), float(a * b)
    if geometry == "pseudosphere":
        return (lambda t: m * np.tanh(t)), (lambda t: p + 0.0 * np.asarray(t))
    if geometry == "sphere":
        return (lambda t: m / np.tan(t)), (lambda t: -p + 0.0 * np.asarray(t))
    if geometry == "hyperbolic":
        return (lambda t: m / np.tanh(t)), (lambda t: p + 0.0 * np.asarray(t))
    raise ValueError(f"unknown geometry {geometry!r}")


@dataclass(frozen=True)
class KernelSolution:
    """A kernel ``f`` with its derivative on a closed interval ``span``.

    ``f`` and ``df`` are vectorized callables; ``d2f`` comes from the ODE.
    ``scale`` records the factor applied to the raw solution by the
    normalization described in ``note``.
    """

    geometry: str
    a: int
    b: int
    span: tuple[float, float]
    f_fn: Callable = field(repr=False)
    df_fn: Callable = field(repr=False)
    scale: float = 1.0
    parity: str | None = None
    note: str = ""

    def _check(self, alpha):
        alpha = np.asarray(alpha, dtype=float)
        lo, hi = self.span
        tol = 1e-12 * max(1.0, abs(hi))
        if np.any(alpha < lo - tol) or np.any(alpha > hi + tol):
            raise ValueError(f"alpha outside kernel span [{lo:.6g}, {hi:.6g}]")
        return alpha

    def f(self, alpha):
        return self.f_fn(self._check(alpha))

    def df(self, alpha):
        return self.df_fn(self._check(alpha))

    def d2f(self, alpha):
        alpha = self._check(alpha)
        c1, c0 = coefficients(self.geometry, self.a, self.b)
        return -c1(alpha) * self.df_fn(alpha) - c0(alpha) * self.f_fn(alpha)

    __call__ = f

    def covers(self, alpha_max: float) -> bool:
        return self.span[1] >= alpha_max


def _wrap(sol, scale):
    return (lambda t: scale * sol.f(t)), (lambda t: scale * sol.df(t))


def solve_pseudosphere_kernel(a: int, b: int, alpha_max: float = 3.0,
                              tolerance: float = 1e-13) -> KernelSolution:
    """Even solution of ``f'' + (a+b) tanh f' + ab f = 0`` with f(0)=1.

    Parameters
    ----------
    a, b : int
        Signature counts, both at least 1.
    alpha_max : float
        The solution is tabulated on ``[-alpha_max, alpha_max]``.
    """
    _check_ab(a, b)
    if not alpha_max > 0:
        raise ValueError("alpha_max must be positive")
    c1, c0 = coefficients("pseudosphere", a, b)
    sol = ode_solve(c1, c0, 0.0, 1.0, 0.0, (-alpha_max, alpha_max), tolerance)
    f, df = _wrap(sol, 1.0)
    return KernelSolution("pseudosphere", a, b, (-alpha_max, alpha_max), f, df,
                          parity="even", note="f(0) = 1, f'(0) = 0")


def cosh_kernel(a: int, alpha_max: float = 20.0) -> KernelSolution:
    """Closed-form pseudosphere kernel ``1/cosh(alpha)^a`` for b = 1."""
    _check_ab(a, 1)

    def f(t):
        return np.cosh(t) ** (-a)

    def df(t):
        return -a * np.tanh(t) * np.cosh(t) ** (-a)

    return KernelSolution("pseudosphere", a, 1, (-alpha_max, alpha_max), f, df,
                          parity="even", note="closed form 1/cosh^a")


def solve_sphere_kernel(a: int, b: int, alpha_min: float = 1e-2,
                        start: float = 1e-4,
                        tolerance: float = 1e-13) -> KernelSolution:
    """Solution of ``f'' + (a+b) cot f' - ab f = 0`` that is regular at pi.

    Shooting starts at ``pi - start`` from the analytic branch
    ``1 + c2 s^2 + c4 s^4`` in ``s = pi - alpha``, which also serves as the
    solution on ``[pi - start, pi]``.  The result is normalized so that
    ``f(pi/2) Vol S^(a-1) Vol S^(b-1) = 1``, the value making two
    orthogonal great spheres link once.
    """
    _check_ab(a, b)
    m, p = a + b, a * b
    c2 = p / (2.0 * (1 + m))
    c4 = c2 * (p + 2.0 * m / 3.0) / (4.0 * (3 + m))

    def series(t):
        s = math.pi - np.asarray(t, dtype=float)
        return 1 + c2 * s**2 + c4 * s**4, -(2 * c2 * s + 4 * c4 * s**3)

    s0 = start
    f0, df0 = series(math.pi - s0)
    c1, c0 = coefficients("sphere", a, b)
    sol = ode_solve(c1, c0, math.pi - s0, float(f0), float(df0),
                    (alpha_min, math.pi - s0), tolerance,
                    series=(math.pi - s0, math.pi, series))
    raw_mid = float(sol.f(math.pi / 2))
    if raw_mid == 0 or not np.isfinite(raw_mid):
        raise IntegrationError("sphere kernel vanishes at pi/2; cannot normalize")
    scale = 1.0 / (raw_mid * sphere_volume(a - 1) * sphere_volume(b - 1))
    f, df = _wrap(sol, scale)
    return KernelSolution("sphere", a, b, (alpha_min, math.pi), f, df, scale,
                          note="f(pi/2) Vol S^(a-1) Vol S^(b-1) = 1")


def solve_hyperbolic_kernel(a: int, b: int, parity: str = "odd",
                            alpha_max: float = 6.0, alpha_min: float = 1e-3,
                            tolerance: float = 1e-13) -> KernelSolution:
    """Solutions of ``f'' + (a+b) coth f' + ab f = 0`` on ``(0, alpha_max]``.

    Parameters
    ----------
    parity : {"even", "odd", "regular", "singular"}
        ``"even"`` (alias ``"regular"``) is the solution analytic at 0,
        normalized to f(0) = 1; for a = b = 2 it is proportional to
        ``(sinh a - a cosh a)/sinh^3 a``.  ``"odd"`` (alias ``"singular"``)
        behaves like ``alpha^(1-a-b) / Vol S^(a+b-2)`` at 0, which is the
        flat Gauss normalization; for a = b = 2 it equals
        ``cosh a / (4 pi sinh^3 a)``.  The singular solution is odd only
        when a + b is even; otherwise a logarithm enters and ``ValueError``
        is raised.
    """
    _check_ab(a, b)
    kind = {"even": "even", "regular": "even",
            "odd": "odd", "singular": "odd"}.get(parity)
    if kind is None:
        raise ValueError(f"unknown parity {parity!r}")
    m, p = a + b, a * b
    c1, c0 = coefficients("hyperbolic", a, b)
    if kind == "even":
        c2 = -p / (2.0 * (1 + m))
        c4 = -c2 * (p + 2.0 * m / 3.0) / (4.0 * (3 + m))

        def series(t):
            t = np.asarray(t, dtype=float)
            return 1 + c2 * t**2 + c4 * t**4, 2 * c2 * t + 4 * c4 * t**3

        t0 = 1e-3
        lo = 0.0
        scale, note = 1.0, "f(0) = 1"
    else:
        if m % 2:
            raise ValueError("the singular hyperbolic kernel has a definite "
                             "parity only when a + b is even")
        coef = _frobenius_coefficients(a, b, 40)
        r = 1 - m
        lead = 1.0 / sphere_volume(m - 2)

        def series(t):
            t = np.asarray(t, dtype=float)
            k = np.arange(coef.size) * 2
            pw = t[..., None] ** (k + r)
            f = lead * np.sum(coef * pw, axis=-1)
            df = lead * np.sum(coef * (k + r) * pw, axis=-1) / t
            return f, df

        t0 = 0.1
        lo = alpha_min
        scale, note = lead, "alpha^(1-a-b) / Vol S^(a+b-2) near 0"
    f0, df0 = series(t0)
    sol = ode_solve(c1, c0, t0, float(f0), float(df0), (t0, alpha_max),
                    tolerance, series=(lo, t0, series))
    f, df = _wrap(sol, 1.0)
    return KernelSolution("hyperbolic", a, b, (lo, alpha_max), f, df, scale,
                          parity=kind, note=note)


def _frobenius_coefficients(a: int, b: int, terms: int) -> np.ndarray:
    """Even-index coefficients d_0, d_2, ... of the singular series.

    The ODE is multiplied through by sinh so every coefficient is entire:
    ``sinh f'' + m cosh f' + ab sinh f = 0`` with f = sum d_k t^(k+r),
    ``r = 1 - m``.  The indicial factor of d_N is N (N + r).
    """
    m, p = a + b, a * b
    r = 1 - m
    top = 2 * terms
    d = np.zeros(top + 1)
    d[0] = 1.0
    fact = [math.factorial(i) for i in range(top + 3)]
    for n in range(2, top + 1, 2):
        acc = 0.0
        for j in range(1, n // 2 + 1):
            k = n - 2 * j
            acc += d[k] * ((k + r) * (k + r - 1) / fact[2 * j + 1]
                           + m * (k + r) / fact[2 * j])
        for j in range(0, (n - 2) // 2 + 1):
            k = n - 2 - 2 * j
            acc += p * d[k] / fact[2 * j + 1]
        d[n] = -acc / (n * (n + r))
    return d[::2].copy()


def _check_ab(a, b):
    if int(a) != a or int(b) != b or a < 1 or b < 1:
        raise ValueError(f"a and b must be positive integers, got ({a}, {b})")


# ---------------------------------------------------------------------------
# closed forms for a = b = 2
# ---------------------------------------------------------------------------


def s3_kernel(alpha_min: float = 1e-2) -> KernelSolution:
    """Closed-form sphere kernel for a = b = 2.

    ``f = ((pi - alpha) cos alpha + sin alpha) / (4 pi^2 sin^3 alpha)``,
    evaluated near pi through ``s = pi - alpha`` as
    ``(sin s - s cos s) / (4 pi^2 sin^3 s)``.
    """
    c = 4.0 * math.pi**2

    def f(t):
        s = math.pi - np.asarray(t, dtype=float)
        small = np.abs(s) < 1e-2
        with np.errstate(divide="ignore", invalid="ignore"):
            exact = (np.sin(s) - s * np.cos(s)) / (c * np.sin(s) ** 3)
        # near pi: f = (1 + 2 s^2/5 + 2 s^4/21) / (12 pi^2)
        near = (1 + 0.4 * s**2 + 2.0 / 21.0 * s**4) / (3 * c)
        return np.where(small, near, exact)

    def df(t):
        t = np.asarray(t, dtype=float)
        s = math.pi - t
        small = np.abs(s) < 1e-2
        sn, cs = np.sin(t), np.cos(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            exact = (-(math.pi - t) * sn**2
                     - 3 * cs * ((math.pi - t) * cs + sn)) / (c * sn**4)
        return np.where(small, _s3_df_series(s), exact)

    return KernelSolution("sphere", 2, 2, (alpha_min, math.pi), f, df,
                          note="closed form, f(pi/2) = 1/(4 pi^2)")


def _s3_df_series(s):
    # near pi, f = (1 + 2 s^2/5 + 2 s^4/21) / (12 pi^2) and df/dalpha = -df/ds
    return -(0.8 * s + 8.0 / 21.0 * s**3) / (12 * math.pi**2)


def hyperbolic_singular_closed_form(alpha):
    """``cosh / sinh^3``, the singular (odd) a = b = 2 hyperbolic kernel."""
    t = np.asarray(alpha, dtype=float)
    return np.cosh(t) / np.sinh(t) ** 3, (np.sinh(t) ** 2 - 3 * np.cosh(t) ** 2) / np.sinh(t) ** 4


def hyperbolic_regular_closed_form(alpha):
    """``(sinh - alpha cosh) / sinh^3``, the regular (even) a = b = 2 kernel."""
    t = np.asarray(alpha)
    sh, ch = np.sinh(t), np.cosh(t)
    # sinh - t cosh = -sum 2k t^(2k+1) / (2k+1)!, free of cancellation
    series = -sum(2 * k * t ** (2 * k + 1) / math.factorial(2 * k + 1)
                  for k in range(1, 12))
    num = np.where(np.abs(t) < 0.5, series, sh - t * ch)
    f = num / sh**3
    df = (-t * sh**2 - 3 * ch * num) / sh**4
    return f, df


def closed_form_kernel(geometry: str, fn, a: int, b: int, span,
                       note: str = "") -> KernelSolution:
    """Wrap ``fn(alpha) -> (f, f')`` as a :class:`KernelSolution`."""
    return KernelSolution(geometry, a, b, tuple(span),
                          lambda t: fn(t)[0], lambda t: fn(t)[1], note=note)


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------


def energy(sol: KernelSolution, alpha):
    """Oscillator energy ``((f')^2 + ab f^2) / 2`` of a pseudosphere kernel."""
    if sol.geometry != "pseudosphere":
        raise ValueError("energy is defined for pseudosphere kernels")
    f, df = sol.f(alpha), sol.df(alpha)
    return 0.5 * (df * df + sol.a * sol.b * f * f)


def energy_derivative(sol: KernelSolution, alpha):
    """``E' = -(a+b) tanh(alpha) (f')^2``, from the ODE."""
    if sol.geometry != "pseudosphere":
        raise ValueError("energy is defined for pseudosphere kernels")
    return -(sol.a + sol.b) * np.tanh(alpha) * sol.df(alpha) ** 2


def residual(sol: KernelSolution, alpha, step: float = 2e-3):
    """Relative ODE residual ``|f'' + c1 f' + c0 f| / max(1, |f|)``.

    ``f''`` is obtained from ``f'`` independently of the ODE: by a complex
    step when ``f'`` is analytic and accepts complex input (closed forms),
    otherwise by a sixth-order central difference whose step is scaled to
    ``alpha`` so points near a singular endpoint stay usable.
    """
    alpha = np.asarray(alpha, dtype=float)
    d = sol.df_fn
    d2 = _complex_step(d, alpha)
    if d2 is None:
        h = np.maximum(step * np.minimum(1.0, np.abs(alpha)), 1e-6)
        d2 = sum(c * d(alpha + k * h) for k, c in _FD6) / h
    c1, c0 = coefficients(sol.geometry, sol.a, sol.b)
    f = sol.f_fn(alpha)
    r = np.abs(d2 + c1(alpha) * d(alpha) + c0(alpha) * f)
    return r / np.maximum(1.0, np.abs(f))


_FD6 = ((-3, -1 / 60), (-2, 3 / 20), (-1, -3 / 4),
        (1, 3 / 4), (2, -3 / 20), (3, 1 / 60))


def _complex_step(fn, x, h=1e-30):
    try:
        with warnings.catch_warnings(), np.errstate(all="ignore"):
            warnings.simplefilter("ignore")
            out = fn(x + 1j * h)
    except (TypeError, ValueError):
        return None
    if not np.iscomplexobj(out):
        return None
    return np.imag(out) / h


def sign_changes(sol: KernelSolution, lo: float, hi: float,
                 count: int = 4001) -> np.ndarray:
    """Approximate zeros of ``f`` in ``[lo, hi]`` (bracketed, then bisected)."""
    t = np.linspace(lo, hi, count)
    v = sol.f(t)
    idx = np.nonzero(np.sign(v[:-1]) * np.sign(v[1:]) < 0)[0]
    roots = []
    for i in idx:
        x0, x1 = t[i], t[i + 1]
        f0 = v[i]
        for _ in range(60):
            xm = 0.5 * (x0 + x1)
            fm = float(sol.f(xm))
            if np.sign(fm) == np.sign(f0):
                x0, f0 = xm, fm
            else:
                x1 = xm
        roots.append(0.5 * (x0 + x1))
    return np.array(roots)


def solve_kernel(geometry: str, a: int, b: int, **kwargs) -> KernelSolution:
    if geometry == "pseudosphere":
        return solve_pseudosphere_kernel(a, b, **kwargs)
    if geometry == "sphere":
        return solve_sphere_kernel(a, b, **kwargs)
    if geometry == "hyperbolic":
        return solve_hyperbolic_kernel(a, b, **kwargs)
    raise ValueError(f"unknown geometry {geometry!r}")
