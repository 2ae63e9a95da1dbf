import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from brlab.cli import dispatch
from brlab.geometry import Disc, unit_square
from brlab.io import (format_number, load_set, parse_number, save_set, set_from_dict, set_to_dict)
from brlab.quadratic import QuadraticNumber


@pytest.fixture
def square(tmp_path):
    return str(save_set(unit_square(), tmp_path / "square.json"))


def run(capsys, *argv):
    code = dispatch(list(argv))
    return code, capsys.readouterr()


# -- io -----------------------------------------------------------------------

def test_parse_numbers():
    assert parse_number("3/9") == Fraction(1, 3)
    assert parse_number("0.25") == Fraction(1, 4)
    assert parse_number("4") == 4
    assert parse_number("(-1+1*sqrt(2))") == QuadraticNumber(-1, 1, 2, 1)
    assert parse_number("(-1+1*sqrt(5))/2") == QuadraticNumber(-1, 1, 5, 2)
    with pytest.raises(ValueError):
        parse_number("abc")


def test_set_round_trip(tmp_path):
    d = Disc((Fraction(1, 2), Fraction(2, 5)), Fraction(1, 5))
    assert set_from_dict(set_to_dict(d)) == d
    assert set_from_dict({"disc": {"center": ["1/2", "2/5"], "radius": "1/5"}}) == d
    assert set_from_dict({"polygon": [[0, 0], [1, 0], [1, 1], [0, 1]]}) == unit_square()
    path = save_set(unit_square(), tmp_path / "s.json")
    assert load_set(path) == unit_square()
    assert format_number(QuadraticNumber(-1, 1, 2, 1)) == str(QuadraticNumber(-1, 1, 2, 1))


# -- commands -----------------------------------------------------------------

def test_ostrowski_command(tmp_path, capsys):
    code, out = run(capsys, "cf", "ostrowski", "--alpha", "golden", "--n", "10", "--outdir", str(tmp_path))
    assert code == 0
    assert out.out.strip() == "0,0,1,0,0,1"
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"][:3] == ["brlab", "cf", "ostrowski"]
    assert manifest["seed"] is not None and manifest["version"]


def test_flow_delta_full_square(tmp_path, capsys, square):
    code, out = run(capsys, "flow", "delta", "--set", square, "--alpha", "sqrt2m1", "--x", "0,0", "--t", "100",
                    "--outdir", str(tmp_path))
    assert code == 0
    assert float(out.out.strip()) == 0


def test_special_triangle_recipe(tmp_path, capsys):
    code, out = run(capsys, "exp", "special-triangle", "--alpha", "sqrt2m1", "--tmax", "1e5",
                    "--outdir", str(tmp_path))
    assert code == 0
    report = json.loads((tmp_path / "special-triangle.json").read_text())
    assert report["pass"] is True


def test_cf_expand_and_convergents(tmp_path, capsys):
    code, out = run(capsys, "cf", "expand", "--decimal", "0.41421356237309504880", "--depth", "10",
                    "--outdir", str(tmp_path))
    assert code == 0 and "2" in out.out
    code, _ = run(capsys, "cf", "convergents", "--alpha", "golden", "--depth", "8", "--outdir", str(tmp_path))
    rows = list(csv.reader(open(tmp_path / "convergents.csv")))
    assert rows[0] == ["n", "a_n", "p_n", "q_n"]
    assert [r[3] for r in rows[1:4]] == ["1", "2", "3"]


def test_brf_commands(tmp_path, capsys):
    code, out = run(capsys, "brf", "gridsum", "--hat", "1/3,2/3,1", "--q", "6", "--outdir", str(tmp_path))
    assert code == 0 and out.out.split()[0] == "2"
    code, out = run(capsys, "brf", "decompose", "--alpha", "golden", "--hat", "1/4,1/2,1", "--n", "10",
                    "--outdir", str(tmp_path))
    assert code == 0
    rows = list(csv.reader(open(tmp_path / "decomposition.csv")))
    assert rows[0] == ["l", "b", "k", "m_l", "x_l", "theta_l", "rho", "omega"]
    assert len(rows) == 1 + 2 + 8


def test_geom_commands(tmp_path, capsys, square):
    code, out = run(capsys, "geom", "measure", "--set", square, "--outdir", str(tmp_path))
    assert code == 0 and out.out.strip() == "1"
    code, _ = run(capsys, "geom", "tau", "--set", square, "--alpha", "golden", "--points", "11",
                  "--outdir", str(tmp_path))
    rows = list(csv.reader(open(tmp_path / "profile.csv")))
    assert len(rows) == 12 and all(abs(float(r[1]) - 1) < 1e-30 for r in rows[1:])


# -- exit codes ---------------------------------------------------------------

def test_invalid_subcommand(tmp_path, capsys):
    assert run(capsys, "cf", "bogus")[0] == 2
    assert run(capsys, "nothing")[0] == 2


def test_symbolic_alpha_is_invalid(tmp_path, capsys):
    code, out = run(capsys, "brf", "sum", "--quotients", "1,2,3", "--hat", "1/4,1/2,1", "--n", "5",
                    "--outdir", str(tmp_path))
    assert code == 2
    assert (tmp_path / "manifest.json").exists()


def test_precision_exit_code(tmp_path, capsys):
    code, _ = run(capsys, "cf", "expand", "--decimal", "0.4142135623730950", "--depth", "40",
                  "--outdir", str(tmp_path))
    assert code == 3


def test_missing_set_file(tmp_path, capsys):
    code, _ = run(capsys, "geom", "measure", "--set", str(tmp_path / "none.json"), "--outdir", str(tmp_path))
    assert code == 2


def test_consistency_exit_code(tmp_path, capsys, monkeypatch):
    import brlab.flow as flow
    monkeypatch.setattr(flow, "EQUIVALENCE_BOUND", -1)
    save_set(unit_square(), tmp_path / "sq.json")
    code, _ = run(capsys, "flow", "gap", "--set", str(tmp_path / "sq.json"), "--alpha", "sqrt2m1",
                  "--t", "10", "--outdir", str(tmp_path))
    assert code == 4


def test_bad_precision_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("BRLAB_PRECISION_BITS", "lots")
    code, _ = run(capsys, "cf", "stat", "--alpha", "golden", "--s", "3", "--outdir", str(tmp_path))
    assert code == 2


# -- reproducibility ----------------------------------------------------------

@pytest.mark.parametrize("argv", [
    ["brf", "decompose", "--alpha", "sqrt2m1", "--hat", "1/5,3/5,2", "--n", "400"],
    ["cf", "convergents", "--alpha", "sqrt3m1", "--depth", "25"],
    ["exp", "triangle-7a", "--levels", "3"],
])
def test_artifacts_byte_identical(tmp_path, capsys, argv):
    outs = []
    for name in ("a", "b"):
        d = tmp_path / name
        assert run(capsys, *argv, "--outdir", str(d))[0] == 0
        outs.append({p.name: p.read_bytes() for p in d.iterdir() if p.name != "manifest.json"})
    assert outs[0] and outs[0] == outs[1]


def test_console_entry_point(tmp_path):
    res = subprocess.run([sys.executable, "-m", "brlab", "cf", "ostrowski", "--alpha", "golden", "--n", "10",
                          "--outdir", str(tmp_path)], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == "0,0,1,0,0,1"
