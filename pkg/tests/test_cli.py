import io
import json
import subprocess
import sys

import pytest

from supertoric.catalog import (
    WILD_CHAIN_OVERRIDE_JSON,
    even_smooth_singular_fan,
    projective_fan,
    projective_line_decorated,
    three_chain_orthant,
    wild_chain_fan,
)
from supertoric.cli import run
from supertoric.decofan import MorphismData
from supertoric.superlie import SupertorusData


def _write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def _run(*argv):
    buf = io.StringIO()
    code = run(list(argv), buf)
    return code, buf.getvalue()


@pytest.fixture
def files(tmp_path):
    return {
        "three": _write(tmp_path, "three.json", three_chain_orthant().to_json()),
        "wild": _write(tmp_path, "wild.json", wild_chain_fan().to_json()),
        "override": _write(tmp_path, "override.json", WILD_CHAIN_OVERRIDE_JSON),
        "singular": _write(tmp_path, "singular.json", even_smooth_singular_fan().to_json()),
        "dec": _write(tmp_path, "dec.json", projective_line_decorated(True).to_json()),
        "plain": _write(tmp_path, "plain.json", projective_line_decorated(False).to_json()),
        "map": _write(tmp_path, "map.json", MorphismData.identity(1, 1).to_json()),
        "p2": _write(tmp_path, "p2.json", projective_fan(2).to_json()),
        "bad": str(tmp_path / "bad.json"),
        "irrational": _write(
            tmp_path,
            "irr.json",
            {
                "torus": SupertorusData.q1n(2).to_json(),
                "fan": {"rank": 2, "rays": [[1, 2]], "cones": [[0]]},
                "decorations": {"0": {"signs": [1, 1]}},
            },
        ),
    }


def test_validate(files):
    code, out = _run("validate", files["three"])
    assert code == 0
    data = json.loads(out)
    assert data["valid"] is True and data["qualifier"] == "verified up to degree 2"


def test_weight_space(files):
    code, out = _run("weight-space", files["three"], "--cone", "0,1,2", "--m", "5,5,5")
    assert code == 0
    data = json.loads(out)
    assert data["dim"] == 6


def test_smooth_and_resolve(files):
    code, out = _run("smooth", files["singular"])
    assert code == 0 and json.loads(out)["smooth"] is False
    code, out = _run("resolve", files["singular"])
    assert code == 0


def test_ds_check(files):
    code, out = _run("ds-check", files["wild"], "--ray", "0")
    assert code == 0 and json.loads(out)["pass"] is True
    code, out = _run("ds-check", files["wild"], "--ray", "0", "--override", files["override"])
    data = json.loads(out)
    assert code == 0 and data["pass"] is False
    assert data["verdicts"][0]["witness"] == "t^2*xi2*xi3"


def test_morphism(files):
    code, out = _run("morphism", files["plain"], files["dec"], "--map", files["map"])
    assert code == 0 and json.loads(out)["morphism"] is True
    code, out = _run("morphism", files["dec"], files["plain"], "--map", files["map"])
    assert code == 0 and json.loads(out)["morphism"] is False


def test_morphism_out_of_scope(files):
    code, _ = _run("morphism", files["three"], files["three"], "--map", files["map"])
    assert code == 3


def test_enumerate(files):
    code, out = _run("enumerate", "--fan", files["p2"])
    assert code == 0 and json.loads(out)["count"] == 12


def test_qgr():
    code, out = _run("qgr", "--r", "1", "--n", "2")
    data = json.loads(out)
    assert code == 0 and data["roundtrip"] is True and data["matches_hypersimplex"] is True


def test_irrational_decoration(files):
    code, out = _run("validate", files["irrational"])
    assert code == 0 and json.loads(out)["valid"] is True
    code, _ = _run("chart", files["irrational"], "--ray", "0")
    assert code == 3


def test_malformed_inputs(files, tmp_path, capsys):
    (tmp_path / "bad.json").write_text("{\"fan\": ")
    code, _ = _run("validate", files["bad"])
    assert code == 2
    assert "line" in capsys.readouterr().err
    code, _ = _run("validate", str(tmp_path / "missing.json"))
    assert code == 2
    code, _ = _run("validate", _write(tmp_path, "nofan.json", {"torus": {"p": 1, "q": 1}}))
    assert code == 2
    code, _ = _run("weight-space", files["three"], "--cone", "0", "--m=-1,0,0")
    assert code == 2


def test_text_format(files):
    code, out = _run("validate", files["three"], "--format", "text")
    assert code == 0 and "valid: true" in out


def test_output_is_byte_stable(files):
    cmd = [sys.executable, "-m", "supertoric", "weight-space", files["three"], "--cone", "0,1,2", "--m", "5,5,5"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd + ["--seed", "7"], capture_output=True, check=True).stdout
    assert first == second
    assert first == _run("weight-space", files["three"], "--cone", "0,1,2", "--m", "5,5,5")[1].encode()
