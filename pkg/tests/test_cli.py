import json
import math

import pytest

from mahlerlink.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--n", "2")
    doc = json.loads(out)
    assert code == 0
    assert doc["schema"] == "mahlerlink.constants/1" and "version" in doc
    assert doc["report"]["v_Cn"] == pytest.approx(8.0)
    assert doc["report"]["vol_Bn_diamond"] == pytest.approx(2 * math.pi**2 / 3)


def test_mahler_report_fields(capsys):
    code, out, _ = run(capsys, "mahler", "--family", "cube", "--n", "2")
    rep = json.loads(out)["report"]
    assert code == 0
    assert set(rep) == {"n", "family", "vol_K", "vol_polar", "mahler", "method",
                        "std_error", "seed"}


def test_link_hopf(capsys):
    code, out, _ = run(capsys, "link", "--space", "s3", "--preset", "hopf")
    rep = json.loads(out)["report"]
    assert code == 0 and rep["rounded"] == 1
    assert set(rep) == {"method", "value", "rounded", "residual", "std_error", "seed"}


def test_link_methods(capsys):
    for method in ("crossings", "cone_mc"):
        code, out, _ = run(capsys, "link", "--preset", "doubled", "--method", method,
                           "--samples", "300")
        assert code == 0 and json.loads(out)["report"]["rounded"] == 2


def test_link_from_curve_file(tmp_path, capsys):
    p = tmp_path / "c.txt"
    p.write_text("space = h3\ncurve\ncos 1 = 1 0 0\nsin 1 = 0 1 0\n"
                 "curve\ncos 0 = 1 0 0\ncos 1 = 1 0 0\nsin 1 = 0 0 1\n")
    code, out, _ = run(capsys, "link", "--curve", str(p))
    assert code == 0 and json.loads(out)["report"]["rounded"] == 1


def test_kernel_csv(capsys):
    code, out, _ = run(capsys, "kernel", "--geometry", "pseudosphere", "--a", "9",
                       "--b", "9", "--alpha-max", "2")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("# schema=mahlerlink.kernel/1")
    assert lines[1] == "alpha,f,df,energy"
    rows = [list(map(float, l.split(","))) for l in lines[2:]]
    assert rows[0][1] == pytest.approx(1.0)
    f = [r[1] for r in rows]
    alpha = [r[0] for r in rows]
    changes = [alpha[i] for i in range(len(f) - 1) if f[i] * f[i + 1] < 0]
    assert changes[0] == pytest.approx(0.18, abs=0.02)
    assert changes[1] == pytest.approx(0.58, abs=0.02)


def test_output_is_reproducible(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert main(["probe", "--statistic", "xy", "--family", "cube", "--n", "2",
                     "--samples", "2000", "--seed", "3", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_bottleneck_sweep(tmp_path, capsys):
    p = tmp_path / "n.txt"
    p.write_text("signature = 2 2\nkind = random_graph\neps_grid = 0 0.2\nseed = 1\n")
    code, out, _ = run(capsys, "bottleneck-sweep", "--neck", str(p), "--resolution", "32")
    lines = out.splitlines()
    assert code == 0 and lines[1] == "eps,w,ell,w_minus_ell,status"
    flat, bumped = (l.split(",") for l in lines[2:])
    assert float(flat[1]) == pytest.approx(float(flat[2]))
    assert float(bumped[1]) > float(flat[1])
    assert float(bumped[2]) == pytest.approx(float(flat[2]), rel=1e-3)


def test_neck_verify_failure_exit_code(tmp_path, capsys):
    p = tmp_path / "n.txt"
    p.write_text("signature = 2 2\nkind = random_graph\neps = 2.0\nseed = 0\n")
    code, out, _ = run(capsys, "neck-verify", "--neck", str(p))
    assert code == 2 and json.loads(out)["report"]["valid"] is False
    code, out, _ = run(capsys, "neck-verify", "--family", "lp_ball", "--p", "4", "--n", "2")
    assert code == 0 and json.loads(out)["report"]["valid"]


def test_malformed_spec_exit_code(tmp_path, capsys):
    p = tmp_path / "b.txt"
    p.write_text("family = ellipsoid\nrow = 1 0\nrow = 0 q\n")
    code, out, err = run(capsys, "volume", "--body", str(p))
    assert code == 1 and out == "" and "line 3" in err


def test_operational_errors(capsys):
    assert run(capsys, "constants")[0] == 1
    assert run(capsys, "mahler", "--family", "nonagon", "--n", "2")[0] == 1
    assert run(capsys, "kernel", "--format", "json")[0] == 1


def test_diamond_and_report(capsys):
    code, out, _ = run(capsys, "diamond", "--family", "ball", "--n", "2")
    assert code == 0
    assert json.loads(out)["report"]["value"] == pytest.approx(2 * math.pi**2 / 3)
    code, out, _ = run(capsys, "report", "--n", "2")
    assert code == 0 and json.loads(out)["report"]["all_hold"]
