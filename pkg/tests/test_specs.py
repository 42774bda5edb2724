import numpy as np
import pytest

from mahlerlink.specs import (SpecError, parse_body, parse_curves, parse_lines,
                              parse_necks, parse_tree)


def test_parse_ellipsoid_body():
    K = parse_body("family = ellipsoid\nrow = 4 0\nrow = 0 1  # diagonal\n")
    assert K.n == 2
    assert K.gauge(np.array([[2.0, 0.0]])) == pytest.approx(1.0)


def test_parse_lp_and_transform():
    K = parse_body("family = lp_ball\nn = 3\np = 4\ntransform = 2 0 0 0 1 0 0 0 1\n")
    assert K.gauge(np.array([[2.0, 0.0, 0.0]])) == pytest.approx(1.0)


def test_parse_hanner_tree():
    assert parse_tree("prod(seg, sum(seg, seg))") == ("prod", "seg", ("sum", "seg", "seg"))
    K = parse_body("family = hanner\ntree = sum(seg, seg)\n")
    assert K.n == 2
    with pytest.raises(SpecError):
        parse_tree("prod(seg)")
    with pytest.raises(SpecError):
        parse_tree("prod(seg, seg) seg")


@pytest.mark.parametrize("text,line", [
    ("family = ellipsoid\nrow = 1 x\n", 2),
    ("family = cube\nn = 2\ncolour = red\n", 3),
    ("n = 2\n", 1),
    ("family = lp_ball\nn = 2\n", 1),
    ("family = cube\nn = 2\nn = 3\n", 3),
    ("family = ellipsoid\nrow = 1 0\nrow = 0\n", 2),
    ("family = cube\nn = 2.5\n", 2),
    ("\n\nfamily = dodecahedron\nn = 3\n", 3),
])
def test_body_errors_carry_line_numbers(text, line):
    with pytest.raises(SpecError) as exc:
        parse_body(text)
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")


def test_parse_lines_rejects_garbage():
    with pytest.raises(SpecError):
        parse_lines("family = cube\n1 2 3 = x\n")


CURVES = """space = sphere3
curve
cos 1 = 1 0 0 0
sin 1 = 0 1 0 0
curve
cos 1 = 0 0 1 0
sin 1 = 0 0 0 -1
"""


def test_parse_curves_hopf():
    from mahlerlink.linking import link_sphere
    c1, c2 = parse_curves(CURVES)
    assert link_sphere(c1, c2).rounded == 1


def test_parse_curve_preset_and_errors():
    c1, _ = parse_curves("preset = doubled\n")
    assert c1.space == "sphere3"
    with pytest.raises(SpecError) as exc:
        parse_curves("space = sphere3\ncurve\ncos 1 = 1 0 0\n")
    assert exc.value.line == 3
    with pytest.raises(SpecError):
        parse_curves("space = sphere3\ncos 1 = 1 0 0 0\n")
    with pytest.raises(SpecError):
        parse_curves("space = sphere3\ncurve\ncos 1 = 1 0 0 0\nsin 1 = 0 1 0 0\n")


def test_parse_necks():
    spec = parse_necks("signature = 3 2\nkind = random_graph\neps = 0.2\nseed = 4\n")
    assert (spec.signature.a, spec.signature.b) == (3, 2)
    assert spec.eps == 0.2 and spec.seed == 4
    body = parse_necks("kind = body\nfamily = lp_ball\nn = 2\np = 4\n")
    assert body.body.n == 2 and body.signature.a == 2
    with pytest.raises(SpecError):
        parse_necks("kind = random_graph\n")
    with pytest.raises(SpecError) as exc:
        parse_necks("signature = 2 2\nkind = wiggly\n")
    assert exc.value.line == 2
