"""Plain-text documents describing bodies, curve pairs and neck families.

Every document is a list of ``key = values`` lines; ``#`` starts a comment.
Body document::

    family = ellipsoid      # ball, lp_ball, cube, cross_polytope, simplex,
    n = 2                   # ellipsoid, hanner
    row = 2 0.5             # ellipsoid matrix rows
    row = 0.5 1
    p = 4                   # lp_ball exponent
    tree = prod(seg, sum(seg, seg))   # Hanner composition tree
    transform = 1 1 0 1     # optional linear image, row-major

Curve document (two curves, each opened by a ``curve`` line)::

    space = sphere3         # or hyperbolic3
    curve
    cos 1 = 1 0 0 0         # vector multiplying cos(t)
    sin 1 = 0 1 0 0
    curve
    cos 1 = 0 0 1 0
    sin 1 = 0 0 0 -1

``preset = hopf`` may replace the curves.  Neck document::

    signature = 2 2
    kind = random_graph     # flat, random_graph or body
    eps = 0.2
    eps_grid = 0 0.1 0.2 0.3
    degree = 3
    seed = 0
    family = ...            # body lines, for kind = body
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .bodies import ConvexBody, hanner_dimension, linear_image, make_body
from .core import Signature
from .linking import ClosedCurve, preset, trig_curve


class SpecError(ValueError):
    """Malformed document; the message carries the line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass
class Entry:
    line: int
    key: str
    index: int | None
    value: str


def parse_lines(text: str) -> list[Entry]:
    """Split a document into entries; ``key index = value`` is allowed."""
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" in line:
            lhs, value = (s.strip() for s in line.split("=", 1))
        else:
            lhs, value = line, ""
        parts = lhs.split()
        if not parts or len(parts) > 2 or not re.fullmatch(r"[a-z_]+", parts[0]):
            raise SpecError(no, f"cannot parse {raw.strip()!r}")
        index = None
        if len(parts) == 2:
            try:
                index = int(parts[1])
            except ValueError:
                raise SpecError(no, f"index {parts[1]!r} is not an integer") from None
        out.append(Entry(no, parts[0], index, value))
    return out


def _numbers(e: Entry) -> list[float]:
    try:
        vals = [float(v) for v in e.value.replace(",", " ").split()]
    except ValueError:
        raise SpecError(e.line, f"{e.key} needs numbers, got {e.value!r}") from None
    if not vals:
        raise SpecError(e.line, f"{e.key} needs a value")
    return vals


def _scalar(e: Entry, kind=float):
    vals = _numbers(e)
    if len(vals) != 1:
        raise SpecError(e.line, f"{e.key} takes a single number")
    if kind is int:
        if vals[0] != int(vals[0]):
            raise SpecError(e.line, f"{e.key} must be an integer")
        return int(vals[0])
    return vals[0]


def parse_tree(text: str, line: int = 0):
    """Parse ``prod(seg, sum(seg, seg))`` into nested tuples."""
    tokens = re.findall(r"[a-z]+|[(),]|\S", text)
    pos = 0

    def node():
        nonlocal pos
        if pos >= len(tokens):
            raise SpecError(line, "unexpected end of tree")
        tok = tokens[pos]
        pos += 1
        if tok == "seg":
            return "seg"
        if tok not in ("prod", "sum"):
            raise SpecError(line, f"unknown tree node {tok!r}")
        if pos >= len(tokens) or tokens[pos] != "(":
            raise SpecError(line, f"expected '(' after {tok}")
        pos += 1
        kids = [node()]
        while pos < len(tokens) and tokens[pos] == ",":
            pos += 1
            kids.append(node())
        if pos >= len(tokens) or tokens[pos] != ")":
            raise SpecError(line, "expected ')'")
        pos += 1
        if len(kids) < 2:
            raise SpecError(line, f"{tok} needs at least two children")
        return (tok, *kids)

    tree = node()
    if pos != len(tokens):
        raise SpecError(line, f"trailing text {' '.join(tokens[pos:])!r}")
    return tree


BODY_KEYS = {"family", "n", "row", "p", "tree", "transform"}


def body_from_entries(entries: list[Entry]) -> ConvexBody:
    seen: dict[str, Entry] = {}
    rows = []
    for e in entries:
        if e.key not in BODY_KEYS:
            raise SpecError(e.line, f"unknown body key {e.key!r}")
        if e.key == "row":
            rows.append(e)
            continue
        if e.key in seen:
            raise SpecError(e.line, f"duplicate key {e.key!r}")
        seen[e.key] = e
    if "family" not in seen:
        raise SpecError(entries[0].line if entries else 1, "missing 'family'")
    fam = seen["family"]
    family = fam.value.strip()
    n = _scalar(seen["n"], int) if "n" in seen else None
    params = {}
    if family == "ellipsoid":
        if not rows:
            raise SpecError(fam.line, "ellipsoid needs 'row' lines")
        A = [_numbers(r) for r in rows]
        if any(len(r) != len(rows) for r in A):
            raise SpecError(rows[0].line, "ellipsoid matrix must be square")
        params["A"] = A
    elif rows:
        raise SpecError(rows[0].line, f"'row' is not used by {family}")
    if family == "lp_ball":
        if "p" not in seen:
            raise SpecError(fam.line, "lp_ball needs 'p'")
        params["p"] = _scalar(seen["p"])
    if family == "hanner":
        if "tree" not in seen:
            raise SpecError(fam.line, "hanner needs 'tree'")
        params["tree"] = parse_tree(seen["tree"].value, seen["tree"].line)
        if n is None:
            n = hanner_dimension(params["tree"])
    try:
        K = make_body(family, n, **params)
    except (ValueError, KeyError) as exc:
        raise SpecError(fam.line, str(exc)) from None
    if "transform" in seen:
        e = seen["transform"]
        vals = _numbers(e)
        if len(vals) != K.n * K.n:
            raise SpecError(e.line, f"transform needs {K.n * K.n} entries")
        try:
            K = linear_image(K, np.reshape(vals, (K.n, K.n)))
        except ValueError as exc:
            raise SpecError(e.line, str(exc)) from None
    return K


def parse_body(text: str) -> ConvexBody:
    return body_from_entries(parse_lines(text))


def parse_curves(text: str) -> tuple[ClosedCurve, ClosedCurve]:
    entries = parse_lines(text)
    space = "sphere3"
    curves: list[dict] = []
    preset_name = None
    for e in entries:
        if e.key == "space":
            space = {"s3": "sphere3", "h3": "hyperbolic3"}.get(e.value, e.value)
            if space not in ("sphere3", "hyperbolic3"):
                raise SpecError(e.line, f"unknown space {e.value!r}")
        elif e.key == "preset":
            preset_name = e.value
        elif e.key == "curve":
            curves.append({"line": e.line, "cos": {}, "sin": {}})
        elif e.key in ("cos", "sin"):
            if not curves:
                raise SpecError(e.line, "coefficients before the first 'curve'")
            if e.index is None or e.index < 0:
                raise SpecError(e.line, f"{e.key} needs a nonnegative frequency")
            curves[-1][e.key][e.index] = (e.line, _numbers(e))
        else:
            raise SpecError(e.line, f"unknown curve key {e.key!r}")
    if preset_name is not None:
        if curves:
            raise SpecError(curves[0]["line"], "use either a preset or curves")
        try:
            return preset(preset_name)
        except ValueError as exc:
            raise SpecError(1, str(exc)) from None
    if len(curves) != 2:
        raise SpecError(entries[-1].line if entries else 1,
                        f"need exactly two curves, found {len(curves)}")
    width = 4 if space == "sphere3" else 3
    out = []
    for i, c in enumerate(curves):
        top = max(list(c["cos"]) + list(c["sin"]) + [0])
        C = np.zeros((top + 1, width))
        S = np.zeros((top + 1, width))
        for key, M in (("cos", C), ("sin", S)):
            for k, (line, vals) in c[key].items():
                if len(vals) != width:
                    raise SpecError(line, f"{space} coefficients need {width} numbers")
                M[k] = vals
        if not np.any(C[1:]) and not np.any(S[1:]):
            raise SpecError(c["line"], "curve is constant")
        out.append(trig_curve(space, C, S, f"curve{i + 1}"))
    return out[0], out[1]


@dataclass
class NeckSpec:
    signature: Signature
    kind: str = "flat"
    eps: float = 0.0
    eps_grid: list = field(default_factory=lambda: [0.0, 0.1, 0.2, 0.3])
    degree: int = 3
    seed: int = 0
    body: ConvexBody | None = None


def parse_necks(text: str) -> NeckSpec:
    entries = parse_lines(text)
    body_lines = [e for e in entries if e.key in BODY_KEYS]
    rest = [e for e in entries if e.key not in BODY_KEYS]
    vals: dict = {}
    sig_line = None
    for e in rest:
        if e.key == "signature":
            nums = _numbers(e)
            if len(nums) != 2 or any(v != int(v) for v in nums):
                raise SpecError(e.line, "signature needs two integers")
            try:
                vals["signature"] = Signature(int(nums[0]), int(nums[1]))
            except ValueError as exc:
                raise SpecError(e.line, str(exc)) from None
            sig_line = e.line
        elif e.key == "kind":
            if e.value not in ("flat", "random_graph", "body"):
                raise SpecError(e.line, f"unknown neck kind {e.value!r}")
            vals["kind"] = e.value
        elif e.key == "eps":
            vals["eps"] = _scalar(e)
        elif e.key == "eps_grid":
            vals["eps_grid"] = _numbers(e)
        elif e.key in ("degree", "seed"):
            vals[e.key] = _scalar(e, int)
        else:
            raise SpecError(e.line, f"unknown neck key {e.key!r}")
    if vals.get("kind") == "body":
        if not body_lines:
            raise SpecError(entries[-1].line if entries else 1,
                            "kind = body needs body lines")
        vals["body"] = body_from_entries(body_lines)
        n = vals["body"].n
        vals.setdefault("signature", Signature(n, n))
    elif body_lines:
        raise SpecError(body_lines[0].line, "body lines need kind = body")
    if "signature" not in vals:
        raise SpecError(sig_line or 1, "missing 'signature'")
    return NeckSpec(**vals)
