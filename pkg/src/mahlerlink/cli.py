"""Command-line interface: ``mahlerlink <verb> [options]``.

Reports are written as JSON envelopes::

    {"schema": "mahlerlink.<verb>/1", "version": ..., "seed": ...,
     "budget": {...}, "report": {...}}

Tables (``kernel``, ``bottleneck-sweep``) are CSV with fixed headers,
preceded by one ``# schema=... version=... seed=...`` comment line.
Exit status is 0 on success, 2 when a checked property fails and 1 on
errors (including malformed documents, reported with their line number).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import __version__
from .bodies import make_body
from .core import McConfig, Signature
from .kernels import energy, solve_kernel
from .linking import (cone_mc_estimator, crossing_oracle, link_hyperbolic,
                      link_sphere, preset)
from .necks import (body_necks, diamond_volume, filled_join_volume, flat_neck,
                    random_graph_neck, validate_neck, verify_starlike,
                    weighted_invariant)
from .probes import (diamond_convexity_sample, hanner_equality,
                     isotropic_constant, pairing_tail, xy_second_moment)
from .specs import NeckSpec, SpecError, parse_body, parse_curves, parse_necks
from .volumes import check_inequalities, closed_form_constants, constant_identities, mahler_volume, volume

EXIT_OK, EXIT_ERROR, EXIT_CHECK = 0, 1, 2
KERNEL_HEADER = ["alpha", "f", "df", "energy"]
SWEEP_HEADER = ["eps", "w", "ell", "w_minus_ell", "status"]


class CheckFailed(Exception):
    """A checked property did not hold; the payload is still emitted."""


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def envelope(verb: str, report: dict, seed=None, budget=None) -> str:
    doc = {"schema": f"mahlerlink.{verb}/1", "version": __version__,
           "seed": seed, "budget": budget or {}, "report": report}
    return json.dumps(_clean(doc), indent=2, sort_keys=False) + "\n"


def table(verb: str, header, rows, seed=None) -> str:
    buf = io.StringIO()
    buf.write(f"# schema=mahlerlink.{verb}/1 version={__version__} seed={seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------


def _read(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _body(args):
    if args.body:
        return parse_body(_read(args.body))
    params = {}
    if args.p is not None:
        params["p"] = args.p
    return make_body(args.family, args.n, **params)


def _mc(args, default):
    return McConfig(args.samples or default, seed=args.seed)


# ---------------------------------------------------------------------------
# verbs
# ---------------------------------------------------------------------------


def cmd_volume(args):
    K = _body(args)
    mc = McConfig(args.samples, args.seed) if args.samples else None
    r = volume(K, args.resolution, mc)
    rep = {"body": K.describe(), "value": r.value, "std_error": r.std_error,
           **r.details}
    return envelope("volume", rep, args.seed,
                    {"samples": args.samples, "resolution": args.resolution,
                     "used": r.budget_used})


def cmd_mahler(args):
    K = _body(args)
    mc = McConfig(args.samples, args.seed) if args.samples else None
    r = mahler_volume(K, args.resolution, mc)
    return envelope("mahler", r.to_dict(), args.seed,
                    {"samples": args.samples, "resolution": args.resolution})


def cmd_constants(args):
    c = closed_form_constants(args.n)
    rep = c.to_dict()
    rep["identity_residuals"] = constant_identities(args.n)
    return envelope("constants", rep, None, {})


def cmd_diamond(args):
    K = _body(args)
    r = diamond_volume(K, args.resolution)
    rep = {"body": K.describe(), "value": r.value, "std_error": r.std_error,
           **r.details}
    return envelope("diamond", rep, None, {"resolution": args.resolution})


def _neck_pair(spec: NeckSpec, eps=None, rng=None):
    if spec.kind == "body":
        return body_necks(spec.body, allow_c1=True)
    eps = spec.eps if eps is None else eps
    if spec.kind == "flat" or eps == 0:
        return flat_neck(spec.signature, "positive"), flat_neck(spec.signature, "negative")
    rng = np.random.default_rng(spec.seed) if rng is None else rng
    return (random_graph_neck(spec.signature, "positive", eps, rng, spec.degree),
            random_graph_neck(spec.signature, "negative", eps, rng, spec.degree))


def _neck_spec(args) -> NeckSpec:
    if args.neck:
        return parse_necks(_read(args.neck))
    if args.body or args.n is not None:
        K = _body(args)
        return NeckSpec(Signature(K.n, K.n), "body", body=K)
    return NeckSpec(Signature(args.a or 2, args.b or 2), "random_graph",
                    eps=args.eps, seed=args.seed)


def cmd_neck_verify(args):
    spec = _neck_spec(args)
    n_plus, n_minus = _neck_pair(spec)
    res = args.resolution or 32
    vp, vm = validate_neck(n_plus, res), validate_neck(n_minus, res)
    star = verify_starlike(n_plus, n_minus, samples=args.samples or 4096,
                           seed=args.seed)
    ok = vp.valid and vm.valid and not star.sign_change
    rep = {"kind": spec.kind, "signature": [spec.signature.a, spec.signature.b],
           "positive": vars(vp), "negative": vars(vm),
           "starlike": {k: v for k, v in vars(star).items() if k != "witness"},
           "witness": star.witness, "valid": ok}
    if ok:
        w = filled_join_volume(n_plus, n_minus, res)
        rep["filled_join_volume"] = w.value
        rep["filled_join_error"] = w.std_error
    out = envelope("neck-verify", rep, args.seed, {"resolution": res})
    if not ok:
        raise CheckFailed(out)
    return out


def bottleneck_sweep(spec: NeckSpec, resolution: int = 48, rtol: float = 1e-3):
    """Rows ``(eps, w, ell, w - ell, status)`` over ``spec.eps_grid``.

    Each row draws a fresh random graph neck pair of size eps.  Rows whose
    necks fail validation are kept with the reason and NaN values.  The
    returned flag says whether ``w >= ell`` with node-wise domination held
    on every row and ``ell`` stayed within ``rtol`` of the first row.
    """
    rng = np.random.default_rng(spec.seed)
    rows, ells, ok = [], [], True
    for eps in spec.eps_grid:
        eps = float(eps)
        n_plus, n_minus = _neck_pair(NeckSpec(spec.signature, "random_graph",
                                              degree=spec.degree), eps, rng)
        vp = validate_neck(n_plus, min(resolution, 32))
        vm = validate_neck(n_minus, min(resolution, 32))
        if not (vp.valid and vm.valid):
            rows.append([eps, math.nan, math.nan, math.nan, "invalid neck"])
            continue
        r = weighted_invariant(n_plus, n_minus, resolution=resolution)
        status = "ok" if r.domination_holds and r.w >= r.value else "domination failed"
        ok &= status == "ok"
        rows.append([eps, r.w, r.value, r.w - r.value, status])
        ells.append(r.value)
    if ells and max(abs(e - ells[0]) for e in ells) > rtol * abs(ells[0]):
        ok = False
    return rows, ok


def cmd_bottleneck_sweep(args):
    spec = _neck_spec(args)
    if spec.kind == "body":
        raise SpecError(1, "bottleneck-sweep needs flat or random_graph necks")
    rows, ok = bottleneck_sweep(spec, args.resolution or 48)
    out = table("bottleneck-sweep", SWEEP_HEADER, rows, spec.seed)
    if not ok:
        raise CheckFailed(out)
    return out


def cmd_kernel(args):
    kwargs = {}
    if args.geometry == "pseudosphere":
        kwargs["alpha_max"] = args.alpha_max
    elif args.geometry == "hyperbolic":
        kwargs["alpha_max"] = args.alpha_max
        kwargs["parity"] = args.parity
    sol = solve_kernel(args.geometry, args.a or 2, args.b or 2, **kwargs)
    lo = max(args.alpha_min, sol.span[0])
    hi = min(args.alpha_max, sol.span[1])
    alpha = np.linspace(lo, hi, args.points)
    f, df = sol.f(alpha), sol.df(alpha)
    if sol.geometry == "pseudosphere":
        E = energy(sol, alpha)
    else:
        E = np.full_like(alpha, math.nan)
    rows = [[float(x), float(y), float(z), "" if math.isnan(e) else float(e)]
            for x, y, z, e in zip(alpha, f, df, E)]
    return table("kernel", KERNEL_HEADER, rows, None)


def cmd_link(args):
    if args.curve:
        c1, c2 = parse_curves(_read(args.curve))
    else:
        name = args.preset or "hopf"
        if args.space == "h3" and not name.startswith("hyperbolic"):
            name = "hyperbolic-" + name
        c1, c2 = preset(name)
    method = args.method
    if method == "kernel":
        fn = link_sphere if c1.space == "sphere3" else link_hyperbolic
        r = fn(c1, c2)
        rep = r.to_dict()
    elif method == "crossings":
        k = crossing_oracle(c1, c2, seed=args.seed)
        rep = {"method": "crossings", "value": float(k), "rounded": k,
               "residual": 0.0, "std_error": 0.0, "seed": args.seed}
    else:
        r = cone_mc_estimator(c1, c2, _mc(args, 10_000))
        rep = r.to_dict()
    out = envelope("link", rep, args.seed, {"samples": args.samples})
    if rep["residual"] > 0.05 and method != "cone_mc":
        raise CheckFailed(out)
    return out


def cmd_probe(args):
    K = _body(args)
    stat = args.statistic
    mc = _mc(args, 100_000)
    if stat == "xy":
        r = xy_second_moment(K, mc)
    elif stat in ("p", "q"):
        r = pairing_tail(K, args.c, stat == "q", mc)
    elif stat == "isotropic":
        r = isotropic_constant(K, mc)
    elif stat == "convexity":
        r = diamond_convexity_sample(K, args.samples or 2000, args.seed)
    else:
        r = hanner_equality(K, args.resolution)
    return envelope("probe", r.to_dict(), args.seed, {"samples": args.samples})


REPORT_FAMILIES = (("ball", {}), ("cube", {}), ("cross_polytope", {}),
                   ("lp_ball", {"p": 4.0}), ("simplex", {}))


def cmd_report(args):
    n = args.n or 2
    rows, ok = [], True
    for fam, params in REPORT_FAMILIES:
        K = make_body(fam, n, **params)
        checks = check_inequalities(K, args.resolution)
        for c in checks.values():
            ok &= c.holds
        rows.append({"body": K.describe(),
                     "checks": {k: vars(v) for k, v in checks.items()}})
    out = envelope("report", {"n": n, "bodies": rows, "all_hold": ok}, None,
                   {"resolution": args.resolution})
    if not ok:
        raise CheckFailed(out)
    return out


VERBS = {
    "volume": cmd_volume, "mahler": cmd_mahler, "constants": cmd_constants,
    "diamond": cmd_diamond, "neck-verify": cmd_neck_verify,
    "bottleneck-sweep": cmd_bottleneck_sweep, "kernel": cmd_kernel,
    "link": cmd_link, "probe": cmd_probe, "report": cmd_report,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mahlerlink", description=__doc__.split("\n")[0])
    p.add_argument("verb", choices=sorted(VERBS))
    p.add_argument("--n", type=int)
    p.add_argument("--a", type=int)
    p.add_argument("--b", type=int)
    p.add_argument("--body", help="body document path")
    p.add_argument("--family", default="ball", help="body family when --body is absent")
    p.add_argument("--p", type=float, help="l_p exponent for --family lp_ball")
    p.add_argument("--curve", help="curve document path")
    p.add_argument("--neck", help="neck document path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int)
    p.add_argument("--resolution", type=int)
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"))
    p.add_argument("--geometry", default="pseudosphere",
                   choices=("pseudosphere", "sphere", "hyperbolic"))
    p.add_argument("--parity", default="odd")
    p.add_argument("--alpha-min", type=float, default=0.0)
    p.add_argument("--alpha-max", type=float, default=3.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--space", default="s3", choices=("s3", "h3"))
    p.add_argument("--preset")
    p.add_argument("--method", default="kernel", choices=("kernel", "crossings", "cone_mc"))
    p.add_argument("--statistic", default="xy",
                   choices=("xy", "p", "q", "isotropic", "convexity", "hanner"))
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--eps", type=float, default=0.2)
    return p


def _check_format(verb, fmt):
    tabular = verb in ("kernel", "bottleneck-sweep")
    if fmt == "csv" and not tabular:
        raise ValueError(f"{verb} emits JSON only")
    if fmt == "json" and tabular:
        raise ValueError(f"{verb} emits CSV only")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    status = EXIT_OK
    try:
        if args.n is None and args.verb in ("constants",):
            raise ValueError("constants needs --n")
        _check_format(args.verb, args.format)
        text = VERBS[args.verb](args)
    except CheckFailed as exc:
        text, status = exc.args[0], EXIT_CHECK
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, RuntimeError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
